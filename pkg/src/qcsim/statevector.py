"""Full-amplitude backend: all 2^n amplitudes updated gate by gate.

Index convention: qubit k corresponds to bit weight 2^k of the amplitude
index (little-endian). The array is processed in contiguous chunks of
2^chunk_log2 amplitudes; a pair (i, i + 2^k) is owned by the chunk holding
the lower index i, so partner amplitudes may be read and written across the
chunk boundary while per-gate write sets stay disjoint. Workers own
contiguous chunk spans and a barrier separates consecutive gates.

The per-pair updates run in numba kernels that release the GIL, so the
thread pool gets real concurrency on large states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import gates
from .errors import DegenerateState, TooManyQubits, UnsupportedGate
from .parallel import WorkerPool
from .program import Instruction, Program

DEFAULT_MAX_QUBITS = 30

_INLINE = WorkerPool(1)


@dataclass
class StateVector:
    qubit_count: int
    amplitudes: np.ndarray
    chunk_log2: int

    @property
    def chunk_count(self) -> int:
        return 1 << (self.qubit_count - self.chunk_log2)

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def default_chunk_log2(n: int, workers: int = 1) -> int:
    """A few chunks per worker, never more than the state itself."""
    want = max(4, 4 * max(1, workers))
    return max(0, n - (max(1, want - 1).bit_length()))


def init_state(
    n: int, *, chunk_log2: int | None = None, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """|0...0> on n qubits."""
    if n < 1:
        raise TooManyQubits(f"need at least 1 qubit, got {n}")
    if n > max_qubits:
        raise TooManyQubits(f"{n} qubits exceed the {max_qubits}-qubit memory ceiling")
    if chunk_log2 is None:
        chunk_log2 = default_chunk_log2(n)
    chunk_log2 = min(max(chunk_log2, 0), n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps, chunk_log2)


# --------------------------------------------------------------------------
# numba kernels (indices are absolute positions in the amplitude array)
# --------------------------------------------------------------------------


@njit(nogil=True, cache=True)
def _k_pair(amps, a, b, c, d, k, p0, p1):
    step = 1 << k
    mask = step - 1
    for p in range(p0, p1):
        i = ((p >> k) << (k + 1)) | (p & mask)
        j = i | step
        x0 = amps[i]
        x1 = amps[j]
        amps[i] = a * x0 + b * x1
        amps[j] = c * x0 + d * x1


@njit(nogil=True, cache=True)
def _k_pair_offset(amps, a, b, c, d, step, s, e):
    for i in range(s, e):
        x0 = amps[i]
        x1 = amps[i + step]
        amps[i] = a * x0 + b * x1
        amps[i + step] = c * x0 + d * x1


@njit(nogil=True, cache=True)
def _k_ctrl_pair(amps, a, b, c, d, k, cmask, s, e):
    step = 1 << k
    for i in range(s, e):
        if (i & cmask) == cmask and (i & step) == 0:
            j = i | step
            x0 = amps[i]
            x1 = amps[j]
            amps[i] = a * x0 + b * x1
            amps[j] = c * x0 + d * x1


@njit(nogil=True, cache=True)
def _k_ctrl_pair_offset(amps, a, b, c, d, step, cmask, s, e):
    for i in range(s, e):
        if (i & cmask) == cmask:
            x0 = amps[i]
            x1 = amps[i + step]
            amps[i] = a * x0 + b * x1
            amps[i + step] = c * x0 + d * x1


@njit(nogil=True, cache=True)
def _k_diag(amps, d0, d1, k, cmask, s, e):
    step = 1 << k
    for i in range(s, e):
        if (i & cmask) == cmask:
            if i & step:
                amps[i] *= d1
            else:
                amps[i] *= d0


@njit(nogil=True, cache=True)
def _k_scale(amps, factor, cmask, s, e):
    for i in range(s, e):
        if (i & cmask) == cmask:
            amps[i] *= factor


@njit(nogil=True, cache=True)
def _k_quad(amps, u, off_hi, off_lo, tmask, cmask, s, e):
    for i in range(s, e):
        if (i & cmask) == cmask and (i & tmask) == 0:
            i01 = i + off_lo
            i10 = i + off_hi
            i11 = i10 + off_lo
            x0 = amps[i]
            x1 = amps[i01]
            x2 = amps[i10]
            x3 = amps[i11]
            amps[i] = u[0, 0] * x0 + u[0, 1] * x1 + u[0, 2] * x2 + u[0, 3] * x3
            amps[i01] = u[1, 0] * x0 + u[1, 1] * x1 + u[1, 2] * x2 + u[1, 3] * x3
            amps[i10] = u[2, 0] * x0 + u[2, 1] * x1 + u[2, 2] * x2 + u[2, 3] * x3
            amps[i11] = u[3, 0] * x0 + u[3, 1] * x1 + u[3, 2] * x2 + u[3, 3] * x3


# --------------------------------------------------------------------------
# chunk dispatch
# --------------------------------------------------------------------------


def _chunk_spans(state: StateVector, workers: int) -> list[range]:
    m = state.chunk_count
    workers = max(1, workers)
    spans = []
    for w in range(workers):
        lo, hi = w * m // workers, (w + 1) * m // workers
        if hi > lo:
            spans.append(range(lo, hi))
    return spans


def _chunk_single(state, chunk, u, k, cmask_low, high_controls) -> None:
    cl = state.chunk_log2
    for q in high_controls:
        if not (chunk >> (q - cl)) & 1:
            return
    amps = state.amplitudes
    s = chunk << cl
    e = s + (1 << cl)
    a, b, c, d = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    if b == 0 and c == 0:  # diagonal: every chunk scales its own elements
        if k >= cl:
            factor = d if (chunk >> (k - cl)) & 1 else a
            if factor != 1:
                _k_scale(amps, factor, cmask_low, s, e)
        else:
            _k_diag(amps, a, d, k, cmask_low, s, e)
        return
    if k >= cl:
        if (chunk >> (k - cl)) & 1:
            return  # the partner chunk with the lower index owns these pairs
        step = 1 << k
        if cmask_low:
            _k_ctrl_pair_offset(amps, a, b, c, d, step, cmask_low, s, e)
        else:
            _k_pair_offset(amps, a, b, c, d, step, s, e)
    elif cmask_low:
        _k_ctrl_pair(amps, a, b, c, d, k, cmask_low, s, e)
    else:
        _k_pair(amps, a, b, c, d, k, s >> 1, e >> 1)


def _chunk_quad(state, chunk, u, t_hi, t_lo, cmask_low, high_controls) -> None:
    cl = state.chunk_log2
    for q in high_controls:
        if not (chunk >> (q - cl)) & 1:
            return
    tmask = 0
    for q in (t_hi, t_lo):
        if q >= cl:
            if (chunk >> (q - cl)) & 1:
                return
        else:
            tmask |= 1 << q
    s = chunk << cl
    _k_quad(
        state.amplitudes, u, 1 << t_hi, 1 << t_lo, tmask, cmask_low, s, s + (1 << cl)
    )


def _apply_gate(
    state: StateVector,
    u: np.ndarray,
    targets: tuple[int, ...],
    controls: tuple[int, ...] = (),
    pool: WorkerPool | None = None,
) -> None:
    pool = pool or _INLINE
    u = np.ascontiguousarray(u, dtype=np.complex128)
    cl = state.chunk_log2
    cmask_low = 0
    high_controls = []
    for q in controls:
        if q >= cl:
            high_controls.append(q)
        else:
            cmask_low |= 1 << q
    if len(targets) == 1:
        work = lambda chunk: _chunk_single(
            state, chunk, u, targets[0], cmask_low, high_controls
        )
    else:
        work = lambda chunk: _chunk_quad(
            state, chunk, u, targets[0], targets[1], cmask_low, high_controls
        )

    def run(span: range) -> None:
        for chunk in span:
            work(chunk)

    pool.run_tasks([lambda s=s: run(s) for s in _chunk_spans(state, pool.workers)])


# --------------------------------------------------------------------------
# public kernels
# --------------------------------------------------------------------------


def apply_single_qubit(
    state: StateVector, u: np.ndarray, k: int, pool: WorkerPool | None = None
) -> None:
    """(a_i, a_{i+2^k}) <- U (a_i, a_{i+2^k}) for every index with bit k = 0."""
    _apply_gate(state, u, (k,), (), pool)


def apply_controlled(
    state: StateVector,
    u: np.ndarray,
    controls,
    k: int,
    pool: WorkerPool | None = None,
) -> None:
    """Pair update on indices whose control bits are all 1; others untouched."""
    _apply_gate(state, u, (k,), tuple(controls), pool)


def apply_two_qubit(
    state: StateVector,
    u: np.ndarray,
    q_hi: int,
    q_lo: int,
    pool: WorkerPool | None = None,
    controls=(),
) -> None:
    """4x4 update; q_hi indexes the high matrix bit, q_lo the low one."""
    _apply_gate(state, u, (q_hi, q_lo), tuple(controls), pool)


def apply_projector(
    state: StateVector, p: np.ndarray, k: int, pool: WorkerPool | None = None
) -> None:
    """Non-unitary diagonal update (no renormalization)."""
    _apply_gate(state, p, (k,), (), pool)


def probability_bit0(state: StateVector, k: int) -> float:
    v = state.amplitudes.reshape(-1, 2, 1 << k)
    half = v[:, 0, :]
    return float(np.sum(half.real**2 + half.imag**2))


def measure(state: StateVector, k: int, rng: np.random.Generator) -> int:
    """Projective measurement of qubit k: collapse and renormalize."""
    p0 = probability_bit0(state, k)
    p1 = state.norm_sq() - p0
    if p0 < 1e-12 and p1 < 1e-12:
        raise DegenerateState(f"both outcomes of qubit {k} have ~zero probability")
    outcome = 0 if rng.random() < p0 else 1
    v = state.amplitudes.reshape(-1, 2, 1 << k)
    v[:, 1 - outcome, :] = 0.0
    state.amplitudes /= math.sqrt(p0 if outcome == 0 else p1)
    return outcome


def pmeasure(state: StateVector, qubits) -> np.ndarray:
    """Probability table over the listed qubits; first listed qubit is the
    most significant bit of the table index. The state is not modified."""
    qubits = tuple(qubits)
    m = len(qubits)
    n = state.qubit_count
    table = np.zeros(1 << m, dtype=np.float64)
    block = 1 << min(n, 22)
    amps = state.amplitudes
    for start in range(0, amps.size, block):
        seg = amps[start : start + block]
        p = seg.real**2 + seg.imag**2
        idx = np.arange(start, start + seg.size, dtype=np.intp)
        key = np.zeros(seg.size, dtype=np.intp)
        for pos, q in enumerate(qubits):
            key |= ((idx >> q) & 1) << (m - 1 - pos)
        table += np.bincount(key, weights=p, minlength=1 << m)
    return table


# --------------------------------------------------------------------------
# program execution
# --------------------------------------------------------------------------


@dataclass
class RunResult:
    cregs: list[int]
    tables: list[tuple[tuple[int, ...], np.ndarray]] = field(default_factory=list)
    state: StateVector | None = None


def _noisy_dispatch(state, inst, base, targets, controls, noise, rng, pool) -> bool:
    """Apply inst through its noise channel; False if it is not noisy."""
    if noise is None:
        return False
    total = controls + targets
    if len(total) > 2:
        return False  # noise operators are defined for 1- and 2-qubit gates only
    kraus = noise.kraus_for(inst, len(total))
    if kraus is None:
        return False
    from .noise import sample_noisy_gate

    full = gates.embed_controls(base, len(controls))
    sample_noisy_gate(state, full, total, kraus, rng, pool)
    return True


def apply_instruction(
    state: StateVector,
    inst: Instruction,
    pool: WorkerPool | None = None,
    rng: np.random.Generator | None = None,
    noise=None,
    result: RunResult | None = None,
) -> None:
    """Execute one expanded instruction against the state."""
    if inst.name == "MEASURE":
        if rng is None:
            raise UnsupportedGate("MEASURE needs a random stream", inst.line)
        bit = measure(state, inst.qubits[0], rng)
        if result is not None:
            result.cregs[inst.creg] = bit
        return
    if inst.name == "PMEASURE":
        table = pmeasure(state, inst.qubits)
        if result is not None:
            result.tables.append((inst.qubits, table))
        return
    base, targets, controls = gates.controlled_form(inst)
    if _noisy_dispatch(state, inst, base, targets, controls, noise, rng, pool):
        return
    if len(targets) == 1:
        if inst.name in ("P0", "P1"):
            apply_projector(state, base, targets[0], pool)
        elif controls:
            apply_controlled(state, base, controls, targets[0], pool)
        else:
            apply_single_qubit(state, base, targets[0], pool)
    elif len(targets) == 2:
        apply_two_qubit(state, base, targets[0], targets[1], pool, controls)
    else:
        raise UnsupportedGate(f"{inst.name} targets {targets}", inst.line)


def run_full(
    program: Program,
    rng: np.random.Generator | None = None,
    noise=None,
    *,
    workers: int = 1,
    pool: WorkerPool | None = None,
    chunk_log2: int | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    initial_index: int = 0,
) -> RunResult:
    """Run a program on the full-amplitude backend.

    Measurement draws come from one seeded stream consumed in program order,
    so a fixed seed makes the whole run reproducible.
    """
    owned = pool is None
    pool = pool or WorkerPool(workers)
    if chunk_log2 is None:
        chunk_log2 = default_chunk_log2(program.qubit_count, pool.workers)
    try:
        state = init_state(
            program.qubit_count, chunk_log2=chunk_log2, max_qubits=max_qubits
        )
        if initial_index:
            state.amplitudes[0] = 0.0
            state.amplitudes[initial_index] = 1.0
        result = RunResult(cregs=[0] * program.creg_count, state=state)
        for inst in program.instructions:
            apply_instruction(state, inst, pool, rng, noise, result)
        return result
    finally:
        if owned:
            pool.close()
