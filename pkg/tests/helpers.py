"""Shared test oracles: dense Kronecker-product matrices built by direct
index arithmetic, independent of the chunked kernels they check."""

from __future__ import annotations

import numpy as np

from qcsim import gates
from qcsim.program import Program


def dense_embed(u: np.ndarray, qubits, n: int) -> np.ndarray:
    """2^n x 2^n matrix of u acting on the listed qubits.

    The first listed qubit is the most significant bit of u's index; all
    other qubits are untouched. Built by explicit bit surgery, not by the
    engine's kernels.
    """
    k = len(qubits)
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    clear = ~sum(1 << q for q in qubits)
    for i in range(dim):
        in_local = 0
        for pos, q in enumerate(qubits):
            in_local |= ((i >> q) & 1) << (k - 1 - pos)
        base = i & clear
        for out_local in range(1 << k):
            j = base
            for pos, q in enumerate(qubits):
                j |= ((out_local >> (k - 1 - pos)) & 1) << q
            full[j, i] += u[out_local, in_local]
    return full


def dense_instruction_matrix(inst, n: int) -> np.ndarray:
    base, targets, controls = gates.controlled_form(inst)
    full = gates.embed_controls(base, len(controls))
    return dense_embed(full, controls + targets, n)


def dense_circuit_matrix(program: Program, n: int | None = None) -> np.ndarray:
    n = n or program.qubit_count
    total = np.eye(1 << n, dtype=complex)
    for inst in program.gate_instructions():
        total = dense_instruction_matrix(inst, n) @ total
    return total


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
