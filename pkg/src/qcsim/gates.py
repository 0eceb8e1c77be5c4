"""Gate matrix definitions and the mnemonic table of the instruction set.

Matrix index convention: the first bound qubit is the most significant bit of
the matrix index, so the printed CNOT/CZ/CR matrices act on |control,target>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonUnitaryU4, UnsupportedGate

SQRT1_2 = 1.0 / math.sqrt(2.0)

H = np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
T = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
I2 = np.eye(2, dtype=complex)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
# off-diagonal entries are -i, matching the instruction-set table as printed
ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, -1j, 0], [0, -1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)

_FIXED_1Q = {"H": H, "X": X, "Y": Y, "Z": Z, "S": S, "T": T}
_PROJECTORS = {"P0": P0, "P1": P1}

# mnemonics whose matrix is diagonal for every parameter value
DIAGONAL_MNEMONICS = frozenset({"Z", "S", "T", "RZ", "CZ", "CR", "P0", "P1"})

# gates that are their own conjugate transpose
SELF_ADJOINT = frozenset({"H", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "TOFFOLI"})

# mnemonic -> (qubit arity, number of leading control args, number of angles)
GATE_TABLE = {
    "H": (1, 0, 0),
    "X": (1, 0, 0),
    "Y": (1, 0, 0),
    "Z": (1, 0, 0),
    "S": (1, 0, 0),
    "T": (1, 0, 0),
    "RX": (1, 0, 1),
    "RY": (1, 0, 1),
    "RZ": (1, 0, 1),
    "U4": (1, 0, 0),
    "CNOT": (2, 1, 0),
    "CZ": (2, 1, 0),
    "CR": (2, 1, 1),
    "SWAP": (2, 0, 0),
    "iSWAP": (2, 0, 0),
    "TOFFOLI": (3, 2, 0),
    "P0": (1, 0, 0),
    "P1": (1, 0, 0),
}


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
    )


def phase(theta: float) -> np.ndarray:
    """diag(1, e^{i theta}) -- the target action of CR."""
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def u4_from_angles(alpha: float, beta: float, gamma: float, delta: float) -> np.ndarray:
    """ZYZ parameterization e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)."""
    return np.exp(1j * alpha) * (rz(beta) @ ry(gamma) @ rz(delta))


def max_unitarity_defect(u: np.ndarray) -> float:
    d = u @ u.conj().T - np.eye(u.shape[0])
    return float(np.abs(d).max())


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    return max_unitarity_defect(u) <= tol


@dataclass(frozen=True)
class GateMatrix:
    """Dense gate matrix bound to concrete qubits (first qubit = MSB)."""

    dimension: int
    entries: np.ndarray
    qubits: tuple[int, ...]
    is_unitary: bool = True


def base_matrix(inst) -> np.ndarray:
    """The 2x2 or 4x4 matrix acting on the instruction's target qubit(s)."""
    name = inst.name
    if name in _FIXED_1Q:
        return _FIXED_1Q[name]
    if name in _PROJECTORS:
        return _PROJECTORS[name]
    if name == "RX":
        return rx(inst.params[0])
    if name == "RY":
        return ry(inst.params[0])
    if name == "RZ":
        return rz(inst.params[0])
    if name == "CR":
        return phase(inst.params[0])
    if name == "CNOT":
        return X
    if name == "CZ":
        return Z
    if name == "TOFFOLI":
        return X
    if name == "U4":
        m = np.array(inst.matrix, dtype=complex).reshape(2, 2)
        if max_unitarity_defect(m) > 1e-9:
            raise NonUnitaryU4(
                f"U4 element matrix fails U*U^dag = I (defect {max_unitarity_defect(m):.2e})",
                inst.line,
            )
        return m
    if name == "SWAP":
        return SWAP
    if name == "iSWAP":
        return ISWAP
    raise UnsupportedGate(f"no matrix for mnemonic {name!r}", inst.line)


def controlled_form(inst) -> tuple[np.ndarray, tuple[int, ...], tuple[int, ...]]:
    """Split an instruction into (base matrix, target qubits, control qubits).

    Mnemonic-level controls (CNOT/CZ/CR/TOFFOLI) and CONTROL-expanded controls
    are merged into one control set; the base matrix stays 2x2 or 4x4.
    """
    arity, n_ctrl, _ = GATE_TABLE[inst.name]
    controls = inst.qubits[:n_ctrl] + inst.controls
    targets = inst.qubits[n_ctrl:]
    return base_matrix(inst), targets, controls


def embed_controls(base: np.ndarray, n_ctrl: int) -> np.ndarray:
    """Full matrix of a controlled gate: identity except the all-controls-1 block."""
    dim_t = base.shape[0]
    dim = dim_t << n_ctrl
    full = np.eye(dim, dtype=complex)
    full[dim - dim_t :, dim - dim_t :] = base
    return full


def gate_matrix(inst) -> GateMatrix:
    """Dense matrix of a gate instruction over all its qubits (controls first).

    Controls occupy the high matrix bits, so e.g. CNOT comes out exactly as
    printed in the instruction-set table.
    """
    base, targets, controls = controlled_form(inst)
    qubits = controls + targets
    if len(qubits) > 3:
        raise UnsupportedGate(
            f"dense matrix limited to 3 qubits, got {len(qubits)}", inst.line
        )
    full = embed_controls(base, len(controls))
    unitary = inst.name not in _PROJECTORS
    return GateMatrix(full.shape[0], full, qubits, is_unitary=unitary)
