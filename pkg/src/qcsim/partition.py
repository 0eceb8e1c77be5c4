"""Partial-amplitude backend: cut the qubit register, decompose crossing
controlled gates into projector branches, simulate the independent halves
with the full-amplitude engine and recombine branch products.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import gates
from .errors import BranchExplosion, MalformedTarget, UncuttableGate, UnsupportedGate
from .parallel import WorkerPool
from .program import Instruction, Program
from .statevector import run_full

DEFAULT_BRANCH_BUDGET = 1 << 16


@dataclass(frozen=True)
class CrossingGate:
    position: int  # index into program.instructions
    control: int
    target: int
    base: tuple[complex, ...]  # 2x2 target action, row-major


@dataclass(frozen=True)
class PartitionPlan:
    program: Program
    cut: int
    qubit_count: int
    crossing_gates: tuple[CrossingGate, ...]

    @property
    def c(self) -> int:
        return len(self.crossing_gates)

    @property
    def branch_count(self) -> int:
        return 1 << self.c

    @property
    def subcircuit_count(self) -> int:
        return 2 << self.c


@dataclass(frozen=True)
class BranchCircuit:
    branch_id: int
    upper_program: Program
    lower_program: Program


def plan_partition(
    program: Program, cut: int, branch_budget: int = DEFAULT_BRANCH_BUDGET
) -> PartitionPlan:
    """Locate crossing gates and verify each is a controlled two-qubit gate."""
    n = program.qubit_count
    if not 0 < cut < n:
        raise UncuttableGate(f"cut {cut} outside (0, {n})")
    crossing = []
    for pos, inst in enumerate(program.instructions):
        if inst.name == "MEASURE":
            raise UnsupportedGate("MEASURE is not supported in partial mode", inst.line)
        if not inst.is_gate:
            continue
        qs = inst.all_qubits()
        lower = [q for q in qs if q < cut]
        upper = [q for q in qs if q >= cut]
        if not lower or not upper:
            continue
        base, targets, controls = gates.controlled_form(inst)
        if len(qs) != 2 or len(controls) != 1 or len(targets) != 1:
            raise UncuttableGate(
                f"crossing gate {inst.name} is not a controlled two-qubit gate",
                inst.line,
            )
        crossing.append(
            CrossingGate(pos, controls[0], targets[0], tuple(base.reshape(-1).tolist()))
        )
    if (1 << len(crossing)) > branch_budget:
        raise BranchExplosion(
            f"2^{len(crossing)} branches exceed the budget of {branch_budget}"
        )
    return PartitionPlan(program, cut, n, tuple(crossing))


def _route(inst: Instruction, cut: int) -> tuple[str, Instruction]:
    qs = inst.all_qubits()
    if all(q < cut for q in qs):
        return "lower", inst
    shifted = replace(
        inst,
        qubits=tuple(q - cut for q in inst.qubits),
        controls=tuple(q - cut for q in inst.controls),
    )
    return "upper", shifted


def decompose_crossing(plan: PartitionPlan) -> list[BranchCircuit]:
    """One BranchCircuit per projector selector in {0,1}^c.

    Selector bit j = 0 keeps the P0 projector on crossing gate j's control
    (identity on the target); bit j = 1 keeps P1 plus the local target action.
    """
    cut = plan.cut
    program = plan.program
    crossing_at = {cg.position: (j, cg) for j, cg in enumerate(plan.crossing_gates)}
    branches = []
    for branch_id in range(plan.branch_count):
        lower: list[Instruction] = []
        upper: list[Instruction] = []
        sides = {"lower": lower, "upper": upper}
        for pos, inst in enumerate(program.instructions):
            if not inst.is_gate:
                continue  # PMEASURE is irrelevant to amplitude recombination
            if pos not in crossing_at:
                side, routed = _route(inst, cut)
                sides[side].append(routed)
                continue
            j, cg = crossing_at[pos]
            bit = (branch_id >> j) & 1
            ctrl_local = cg.control if cg.control < cut else cg.control - cut
            ctrl_side = "lower" if cg.control < cut else "upper"
            sides[ctrl_side].append(
                Instruction("P1" if bit else "P0", (ctrl_local,), line=inst.line)
            )
            if bit:
                tgt_local = cg.target if cg.target < cut else cg.target - cut
                tgt_side = "lower" if cg.target < cut else "upper"
                sides[tgt_side].append(
                    Instruction("U4", (tgt_local,), matrix=cg.base, line=inst.line)
                )
        branches.append(
            BranchCircuit(
                branch_id,
                upper_program=Program(plan.qubit_count - cut, 0, tuple(upper)),
                lower_program=Program(cut, 0, tuple(lower)),
            )
        )
    return branches


def parse_target(text: str, n: int) -> int:
    """An n-character 0/1 string, qubit n-1 leftmost, to an amplitude index."""
    s = text.strip()
    if len(s) != n or any(ch not in "01" for ch in s):
        raise MalformedTarget(f"target {text!r} is not an {n}-bit 0/1 string")
    return int(s, 2)


def run_partial(
    program: Program,
    cut: int,
    targets,
    *,
    workers: int = 1,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
    max_qubits: int = 30,
) -> dict[str, complex]:
    """Amplitudes of the requested basis strings via branch recombination."""
    plan = plan_partition(program, cut, branch_budget)
    branches = decompose_crossing(plan)
    n = program.qubit_count
    target_list = [(t, parse_target(t, n)) for t in targets]

    def simulate(branch: BranchCircuit):
        pool = None  # branches are the unit of parallelism
        up = run_full(branch.upper_program, max_qubits=max_qubits, pool=pool)
        lo = run_full(branch.lower_program, max_qubits=max_qubits, pool=pool)
        return up.state.amplitudes, lo.state.amplitudes

    with WorkerPool(workers) as pool:
        if len(branches) == 1:
            # a single branch may subdivide its own state-vector work
            b = branches[0]
            up = run_full(b.upper_program, pool=pool, max_qubits=max_qubits)
            lo = run_full(b.lower_program, pool=pool, max_qubits=max_qubits)
            vectors = [(up.state.amplitudes, lo.state.amplitudes)]
        else:
            vectors = pool.map_ordered(simulate, branches)

    out: dict[str, complex] = {}
    low_mask = (1 << cut) - 1
    for text, index in target_list:
        t_lower = index & low_mask
        t_upper = index >> cut
        amp = 0.0 + 0.0j
        for up_amps, lo_amps in vectors:  # fixed branch_id order
            amp += complex(up_amps[t_upper]) * complex(lo_amps[t_lower])
        out[text] = amp
    return out
