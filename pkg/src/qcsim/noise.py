"""Kraus noise channels and stochastic noisy-gate sampling.

Six single-qubit channels; two-qubit channels are Kronecker products of one
channel per qubit. A noisy gate is simulated by one quantum trajectory:
branch probabilities come from the Kraus operators acting on the pre-gate
state, one uniform draw picks the branch, and the composed (gate x Kraus)
matrix is applied through the full-amplitude kernels.

Intensity convention: for the flip channels p -> 1 means no noise; for the
damping and depolarizing channels p -> 0 means no noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gates
from .errors import DegenerateBranch, InvalidProbability
from .parallel import WorkerPool
from .statevector import StateVector, apply_single_qubit, apply_two_qubit

KINDS = (
    "bitflip",
    "phaseflip",
    "bitphaseflip",
    "ampdamp",
    "phasedamp",
    "depolarizing",
)


def kraus_ops(kind: str, p: float) -> list[np.ndarray]:
    """The exact operator set of the named channel at intensity p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"noise intensity {p} outside [0, 1]")
    sp, s1p = math.sqrt(p), math.sqrt(1.0 - p)
    if kind == "bitflip":
        return [sp * gates.I2, s1p * gates.X]
    if kind == "phaseflip":
        return [sp * gates.I2, s1p * gates.Z]
    if kind == "bitphaseflip":
        return [sp * gates.I2, s1p * gates.Y]
    if kind == "ampdamp":
        return [
            np.array([[1, 0], [0, s1p]], dtype=complex),
            np.array([[0, sp], [0, 0]], dtype=complex),
        ]
    if kind == "phasedamp":
        return [
            np.array([[1, 0], [0, s1p]], dtype=complex),
            np.array([[0, 0], [0, sp]], dtype=complex),
        ]
    if kind == "depolarizing":
        h = 0.5 * sp
        return [
            math.sqrt(1.0 - 0.75 * p) * gates.I2,
            h * gates.X,
            h * gates.Y,
            h * gates.Z,
        ]
    raise InvalidProbability(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class NoiseChannel:
    kind: str
    p: float

    @property
    def kraus(self) -> list[np.ndarray]:
        return kraus_ops(self.kind, self.p)


def two_qubit_kraus(a: NoiseChannel, b: NoiseChannel) -> list[np.ndarray]:
    """All pairwise Kronecker products {K_i (x) M_j}; completeness carries over."""
    return [np.kron(k, m) for k in a.kraus for m in b.kraus]


@dataclass(frozen=True)
class NoiseRule:
    mnemonics: frozenset[str] | None  # None = every gate
    channel_a: NoiseChannel
    channel_b: NoiseChannel


@dataclass
class NoiseModel:
    """Assignment of channels to gate classes (first matching rule wins)."""

    rules: list[NoiseRule]

    def __post_init__(self):
        seen: set[str] = set()
        for rule in self.rules:
            names = rule.mnemonics or frozenset({"*"})
            overlap = seen & names
            if overlap:
                raise InvalidProbability(
                    f"gate class {sorted(overlap)} assigned noise more than once"
                )
            seen |= names

    def kraus_for(self, inst, n_qubits: int) -> list[np.ndarray] | None:
        for rule in self.rules:
            if rule.mnemonics is None or inst.name in rule.mnemonics:
                if n_qubits == 1:
                    return rule.channel_a.kraus
                return two_qubit_kraus(rule.channel_a, rule.channel_b)
        return None


def make_noise_model(kind: str, p: float, mnemonics=None) -> NoiseModel:
    ch = NoiseChannel(kind, p)
    ch.kraus  # validate kind and p eagerly
    names = frozenset(mnemonics) if mnemonics else None
    return NoiseModel([NoiseRule(names, ch, ch)])


def parse_noise_spec(spec: str) -> NoiseModel:
    """CLI syntax kind:p[:MNEMONIC,MNEMONIC,...]; default is all gates."""
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise InvalidProbability(f"bad noise spec {spec!r}; want kind:p[:gates]")
    kind = parts[0].strip().lower()
    if kind not in KINDS:
        raise InvalidProbability(f"unknown noise kind {parts[0]!r}")
    try:
        p = float(parts[1])
    except ValueError:
        raise InvalidProbability(f"bad noise intensity {parts[1]!r}") from None
    mnemonics = None
    if len(parts) == 3:
        mnemonics = [m.strip() for m in parts[2].split(",") if m.strip()]
    return make_noise_model(kind, p, mnemonics)


# --------------------------------------------------------------------------
# trajectory sampling
# --------------------------------------------------------------------------


def _operator_views(state: StateVector, qubits: tuple[int, ...]) -> list[np.ndarray]:
    """Slices of the state grouped by the operator's local basis index."""
    n = state.qubit_count
    t = state.amplitudes.reshape((2,) * n)
    views = []
    for bits in range(1 << len(qubits)):
        idx = [slice(None)] * n
        for pos, q in enumerate(qubits):
            idx[n - 1 - q] = (bits >> (len(qubits) - 1 - pos)) & 1
        views.append(t[tuple(idx)])
    return views


def _branch_norm_sq(k: np.ndarray, views: list[np.ndarray]) -> float:
    """|| K |psi> ||^2 from precomputed basis slices."""
    total = 0.0
    for r in range(k.shape[0]):
        acc = None
        for c in range(k.shape[0]):
            if k[r, c] == 0:
                continue
            term = k[r, c] * views[c]
            acc = term if acc is None else acc + term
        if acc is not None:
            total += float(np.sum(acc.real**2 + acc.imag**2))
    return total


def branch_probabilities(
    state: StateVector, kraus: list[np.ndarray], qubits: tuple[int, ...]
) -> list[float]:
    """|| K_i |psi> ||^2 for every operator, without modifying the state."""
    descending = tuple(range(state.qubit_count - 1, -1, -1))
    if kraus[0].shape[0] == state.amplitudes.size and qubits == descending:
        # the operator covers the whole register in layout order
        return [
            float(np.vdot(k @ state.amplitudes, k @ state.amplitudes).real)
            for k in kraus
        ]
    views = _operator_views(state, qubits)
    return [_branch_norm_sq(k, views) for k in kraus]


def sample_noisy_gate(
    state: StateVector,
    u: np.ndarray,
    qubits: tuple[int, ...],
    kraus: list[np.ndarray],
    rng: np.random.Generator,
    pool: WorkerPool | None = None,
) -> int:
    """One trajectory step: sample a Kraus branch, apply U . K_i, renormalize.

    Returns the sampled branch index. Renormalization is skipped when the
    norm is already within 1e-12 of 1, so noiseless limits reproduce clean
    runs bit for bit.
    """
    probs = branch_probabilities(state, kraus, qubits)
    total = sum(probs)
    if total < 1e-12:
        raise DegenerateBranch("all Kraus branches have ~zero probability")
    r = rng.random() * total
    acc = 0.0
    choice = len(probs) - 1
    for i, p in enumerate(probs):
        acc += p
        if r < acc:
            choice = i
            break
    noisy = u @ kraus[choice]
    if len(qubits) == 1:
        apply_single_qubit(state, noisy, qubits[0], pool)
    else:
        apply_two_qubit(state, noisy, qubits[0], qubits[1], pool)
    norm_sq = state.norm_sq()
    if abs(norm_sq - 1.0) > 1e-12:
        state.amplitudes /= math.sqrt(norm_sq)
    return choice
