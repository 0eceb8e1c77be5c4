"""Single-amplitude backend: contract an undirected graphical model of the
circuit.

Each qubit worldline is a chain of Boolean variables; a non-diagonal gate
advances the variables it touches and becomes an edge tensor, a diagonal
gate attaches an edge to the current variables without advancing them.
Contraction alternates edge merging (elementwise product over shared
variables, no summation) with integral vertex elimination (summing one
index); differential elimination fixes a variable to 0 and 1 and doubles
the graph count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import gates
from .errors import (
    MalformedTarget,
    SharedVertexNotMerged,
    TensorTooLarge,
    UnsupportedGate,
)
from .parallel import WorkerPool
from .program import Program

DEFAULT_RANK_CAP = 26


class Var(NamedTuple):
    """One Boolean worldline variable: (qubit, position along the worldline)."""

    qubit: int
    index: int


@dataclass(frozen=True, eq=False)
class EdgeTensor:
    """Complex tensor attached to a graph edge; one axis per variable.

    values has shape (2,)*rank; flattening it in C order gives the entries in
    lexicographic order of the index bits.
    """

    variables: tuple[Var, ...]
    values: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.variables)

    def fixed(self, v: Var, bit: int) -> "EdgeTensor":
        ax = self.variables.index(v)
        sliced = np.take(self.values, bit, axis=ax)
        rest = self.variables[:ax] + self.variables[ax + 1 :]
        return EdgeTensor(rest, sliced)

    def summed(self, v: Var) -> "EdgeTensor":
        ax = self.variables.index(v)
        rest = self.variables[:ax] + self.variables[ax + 1 :]
        return EdgeTensor(rest, self.values.sum(axis=ax))


@dataclass
class ContractionGraph:
    vertices: set[Var]
    edges: list[EdgeTensor]
    fixed: dict[Var, int] = field(default_factory=dict)
    prefactor: complex = 1.0 + 0.0j
    first_var: dict[int, Var] = field(default_factory=dict)
    last_var: dict[int, Var] = field(default_factory=dict)
    max_tensor_entries: int = 1

    def incident(self, v: Var) -> list[EdgeTensor]:
        return [e for e in self.edges if v in e.variables]

    def degree(self, v: Var) -> int:
        return sum(1 for e in self.edges if v in e.variables)

    def copy(self) -> "ContractionGraph":
        # tensors are treated as immutable, so sharing values arrays is safe
        return ContractionGraph(
            set(self.vertices),
            list(self.edges),
            dict(self.fixed),
            self.prefactor,
            dict(self.first_var),
            dict(self.last_var),
            self.max_tensor_entries,
        )


def tensor_for_gate(u: np.ndarray, in_vars, out_vars) -> EdgeTensor:
    """Edge tensor with legs (in..., out...) and entries <out|U|in>.

    When in_vars == out_vars the gate is diagonal and only the surviving
    diagonal entries are stored over the merged variables.
    """
    u = np.asarray(u, dtype=complex)
    in_vars, out_vars = tuple(in_vars), tuple(out_vars)
    k = len(in_vars)
    if in_vars == out_vars:
        diag = np.diag(u).copy()
        return EdgeTensor(in_vars, diag.reshape((2,) * k))
    t = u.T.reshape((2,) * (2 * k))  # t[in_bits, out_bits] = u[out, in]
    return EdgeTensor(in_vars + out_vars, t)


def _is_diagonal(u: np.ndarray) -> bool:
    return np.count_nonzero(u - np.diag(np.diag(u))) == 0


def circuit_to_graph(program: Program) -> ContractionGraph:
    """Map a 1-/2-qubit gate circuit to its undirected graphical model."""
    n = program.qubit_count
    cur = {q: Var(q, 0) for q in range(n)}
    graph = ContractionGraph(vertices=set(cur.values()), edges=[])
    graph.first_var = dict(cur)

    for inst in program.instructions:
        if inst.name == "MEASURE":
            raise UnsupportedGate(
                "MEASURE is not supported in single-amplitude mode", inst.line
            )
        if inst.name == "PMEASURE":
            continue
        base, targets, controls = gates.controlled_form(inst)
        qubits = controls + targets
        if len(qubits) > 2:
            raise UnsupportedGate(
                f"{inst.name} acts on {len(qubits)} qubits; only 1- and 2-qubit "
                "gates map to the graphical model",
                inst.line,
            )
        full = gates.embed_controls(base, len(controls))
        if len(qubits) == 1:
            q = qubits[0]
            if _is_diagonal(full):
                graph.edges.append(tensor_for_gate(full, (cur[q],), (cur[q],)))
            else:
                nxt = Var(q, cur[q].index + 1)
                graph.vertices.add(nxt)
                graph.edges.append(tensor_for_gate(full, (cur[q],), (nxt,)))
                cur[q] = nxt
        else:
            hi, lo = qubits  # first qubit is the high matrix bit
            if _is_diagonal(full):
                graph.edges.append(
                    tensor_for_gate(full, (cur[hi], cur[lo]), (cur[hi], cur[lo]))
                )
            else:
                n_hi, n_lo = Var(hi, cur[hi].index + 1), Var(lo, cur[lo].index + 1)
                graph.vertices.update((n_hi, n_lo))
                graph.edges.append(
                    tensor_for_gate(full, (cur[hi], cur[lo]), (n_hi, n_lo))
                )
                cur[hi], cur[lo] = n_hi, n_lo

    graph.last_var = dict(cur)
    return graph


def fix_variable(graph: ContractionGraph, v: Var, bit: int) -> None:
    """Assign a variable; slices every incident tensor, rank-0 slices fold
    into the prefactor."""
    if v in graph.fixed:
        if graph.fixed[v] != bit:
            graph.prefactor = 0.0 + 0.0j
        return
    graph.fixed[v] = bit
    graph.vertices.discard(v)
    new_edges = []
    for e in graph.edges:
        if v not in e.variables:
            new_edges.append(e)
            continue
        sliced = e.fixed(v, bit)
        if sliced.rank == 0:
            graph.prefactor *= complex(sliced.values)
        else:
            new_edges.append(sliced)
    graph.edges = new_edges


def fix_boundary(graph: ContractionGraph, input_bits: str, output_bits: str) -> None:
    """Pin the first and last variable of every worldline (qubit n-1 is the
    leftmost character of each bit string)."""
    qubits = sorted(graph.first_var)
    n = len(qubits)
    ok = (
        len(input_bits) == n
        and len(output_bits) == n
        and all(c in "01" for c in input_bits + output_bits)
    )
    if not ok:
        raise MalformedTarget(
            f"boundary strings must be {n}-bit 0/1 strings, got "
            f"{input_bits!r}/{output_bits!r}"
        )
    for q in qubits:
        fix_variable(graph, graph.first_var[q], int(input_bits[n - 1 - q]))
        fix_variable(graph, graph.last_var[q], int(output_bits[n - 1 - q]))


def merge_edges(
    a: EdgeTensor, b: EdgeTensor, shared: Var | None = None, rank_cap: int = DEFAULT_RANK_CAP
) -> EdgeTensor:
    """Elementwise product over all shared variables (no summation)."""
    if shared is not None and (shared not in a.variables or shared not in b.variables):
        raise SharedVertexNotMerged(f"{shared} is not shared by both edges")
    common = set(a.variables) & set(b.variables)
    out_vars = a.variables + tuple(v for v in b.variables if v not in common)
    if len(out_vars) > rank_cap:
        raise TensorTooLarge(
            f"merged rank {len(out_vars)} exceeds the cap of {rank_cap}"
        )
    # align b's axes with the merged layout, broadcasting a's exclusive axes
    b_shape = []
    b_order = []
    for v in out_vars:
        if v in b.variables:
            b_order.append(b.variables.index(v))
            b_shape.append(2)
        else:
            b_shape.append(1)
    b_aligned = np.transpose(b.values, b_order).reshape(b_shape)
    a_shape = [2] * len(a.variables) + [1] * (len(out_vars) - len(a.variables))
    values = a.values.reshape(a_shape) * b_aligned
    return EdgeTensor(out_vars, values)


def eliminate_vertex_integral(
    t: EdgeTensor, v: Var, graph: ContractionGraph | None = None
) -> EdgeTensor:
    """Sum the tensor over one variable; with a graph given, the variable
    must not appear in any other live edge."""
    if graph is not None:
        others = [e for e in graph.edges if v in e.variables and e is not t]
        if others:
            raise SharedVertexNotMerged(
                f"{v} still appears in {len(others)} other edge(s); merge first"
            )
    return t.summed(v)


def eliminate_vertex_differential(
    graph: ContractionGraph, v: Var
) -> tuple[ContractionGraph, ContractionGraph]:
    """Two copies of the graph with v fixed to 0 and to 1."""
    g0, g1 = graph.copy(), graph.copy()
    fix_variable(g0, v, 0)
    fix_variable(g1, v, 1)
    return g0, g1


def select_split_vertices(graph: ContractionGraph, n: int) -> list[Var]:
    """The n live vertices with the most incident edges; ties go to the
    smallest variable id."""
    ranked = sorted(graph.vertices, key=lambda v: (-graph.degree(v), v))
    return ranked[:n]


def contract_graph(graph: ContractionGraph, rank_cap: int = DEFAULT_RANK_CAP) -> complex:
    """Eliminate every live vertex (min-degree order, ties by variable id):
    merge its incident edges in ascending rank order, then integrate it out.
    The graph is consumed."""
    while graph.vertices:
        v = min(graph.vertices, key=lambda u: (graph.degree(u), u))
        incident = [e for e in graph.edges if v in e.variables]
        if not incident:
            graph.prefactor *= 2.0  # free Boolean variable: sum over {0, 1}
            graph.vertices.discard(v)
            continue
        incident.sort(key=lambda e: e.rank)
        merged = incident[0]
        for e in incident[1:]:
            merged = merge_edges(merged, e, rank_cap=rank_cap)
            graph.max_tensor_entries = max(graph.max_tensor_entries, merged.values.size)
        reduced = merged.summed(v)
        graph.vertices.discard(v)
        rest = [e for e in graph.edges if e not in incident]
        if reduced.rank == 0:
            graph.prefactor *= complex(reduced.values)
            graph.edges = rest
        else:
            graph.edges = rest + [reduced]
            graph.max_tensor_entries = max(graph.max_tensor_entries, reduced.values.size)
    value = graph.prefactor
    for e in graph.edges:  # only rank-0 remnants can be left
        value *= complex(e.values)
    graph.edges = []
    return complex(value)


@dataclass
class ContractionStats:
    subgraphs: int = 0
    max_tensor_entries: int = 1


def run_single(
    program: Program,
    input_bits: str,
    output_bits: str,
    split_n: int = 0,
    *,
    workers: int = 1,
    rank_cap: int = DEFAULT_RANK_CAP,
    stats: ContractionStats | None = None,
) -> complex:
    """<output|circuit|input> via top-N differential splitting plus parallel
    contraction of the resulting subgraphs."""
    graph = circuit_to_graph(program)
    fix_boundary(graph, input_bits, output_bits)
    splits = select_split_vertices(graph, min(split_n, len(graph.vertices)))

    def contract_subgraph(subgraph_id: int) -> complex:
        g = graph.copy()
        for j, v in enumerate(splits):
            fix_variable(g, v, (subgraph_id >> j) & 1)
        value = contract_graph(g, rank_cap)
        if stats is not None:
            stats.max_tensor_entries = max(
                stats.max_tensor_entries, g.max_tensor_entries
            )
        return value

    ids = range(1 << len(splits))
    if stats is not None:
        stats.subgraphs = len(ids)
    with WorkerPool(workers) as pool:
        parts = pool.map_ordered(contract_subgraph, ids)
    total = 0.0 + 0.0j
    for part in parts:  # fixed subgraph-id order for reproducibility
        total += part
    return total
