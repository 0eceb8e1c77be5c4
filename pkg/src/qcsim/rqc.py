"""Seeded generator of layered random circuits on a rectangular qubit grid.

Layer structure: one opening layer of H on every qubit, then `depth` layers.
Each layer lays CZ gates on one of four alternating grid-edge patterns
(horizontal even/odd columns, vertical even/odd rows) and fills every idle
qubit with a random gate from the single-qubit pool. Qubits are numbered
row-major, so a row boundary is also a qubit-index boundary for cutting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

DEFAULT_POOL = ("T", "RX", "RY")

_POOL_TEXT = {
    "T": "T {q}",
    "RX": 'RX {q},"pi/2"',
    "RY": 'RY {q},"pi/2"',
}


@dataclass(frozen=True)
class RqcConfig:
    rows: int
    cols: int
    depth: int
    seed: int
    single_qubit_pool: tuple[str, ...] = DEFAULT_POOL
    entangler: str = "CZ"
    pmeasure: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.rows * self.cols < 2:
            raise ValueError("grid needs at least 2 qubits")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        for g in self.single_qubit_pool:
            if g not in _POOL_TEXT:
                raise ValueError(f"unsupported pool gate {g!r}")

    @property
    def qubit_count(self) -> int:
        return self.rows * self.cols


def _layer_pairs(config: RqcConfig, layer: int) -> list[tuple[int, int]]:
    rows, cols = config.rows, config.cols
    q = lambda r, c: r * cols + c
    pattern = layer % 4
    pairs = []
    if pattern in (0, 1):  # horizontal, even / odd starting column
        for r in range(rows):
            for c in range(pattern % 2, cols - 1, 2):
                pairs.append((q(r, c), q(r, c + 1)))
    else:  # vertical, even / odd starting row
        for r in range(pattern % 2, rows - 1, 2):
            for c in range(cols):
                pairs.append((q(r, c), q(r + 1, c)))
    return pairs


def generate_rqc(config: RqcConfig) -> str:
    """Deterministic script text for the configured random circuit."""
    rng = random.Random(config.seed)
    n = config.qubit_count
    lines = [
        f"% random layered circuit rows={config.rows} cols={config.cols} "
        f"depth={config.depth} seed={config.seed}",
        f"QINIT {n}",
    ]
    lines += [f"H {q}" for q in range(n)]
    for layer in range(config.depth):
        busy = set()
        for a, b in _layer_pairs(config, layer):
            lines.append(f"{config.entangler} {a},{b}")
            busy.update((a, b))
        for q in range(n):
            if q not in busy:
                gate = rng.choice(config.single_qubit_pool)
                lines.append(_POOL_TEXT[gate].format(q=q))
    if config.pmeasure:
        lines.append("PMEASURE " + ",".join(str(q) for q in config.pmeasure))
    return "\n".join(lines) + "\n"
