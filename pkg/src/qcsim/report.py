"""Report rendering: probability tables to CSV plus matplotlib bar charts."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def bitstrings(m: int) -> list[str]:
    return [format(i, f"0{m}b") for i in range(1 << m)]


def write_csv(path, qubits, table: np.ndarray) -> None:
    m = len(qubits)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bitstring", "probability"])
        for bits, p in zip(bitstrings(m), table):
            writer.writerow([bits, f"{p:.12g}"])


def write_figure(path, qubits, table: np.ndarray, title: str = "") -> None:
    m = len(qubits)
    labels = bitstrings(m)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(labels)), 3.2))
    ax.bar(range(len(labels)), table, color="#33557f")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90 if m > 4 else 0, fontsize=8)
    ax.set_xlabel("measured basis (qubits " + ",".join(map(str, qubits)) + ")")
    ax.set_ylabel("probability")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_tables(tables, stem: Path, title: str = "") -> list[Path]:
    """One CSV + one PNG per probability table; returns the written paths."""
    stem = Path(stem)
    written = []
    for idx, (qubits, table) in enumerate(tables):
        suffix = f"_pm{idx}" if len(tables) > 1 else ""
        csv_path = stem.with_name(stem.name + suffix + ".csv")
        png_path = stem.with_name(stem.name + suffix + ".png")
        write_csv(csv_path, qubits, table)
        write_figure(png_path, qubits, table, title)
        written += [csv_path, png_path]
    return written
