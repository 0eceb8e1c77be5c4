"""Command-line front end: mode selection, execution, output formatting."""

from __future__ import annotations

import argparse
import struct
import sys
from pathlib import Path

import numpy as np

from . import graph, noise, partition, program, qfbe, rqc, statevector
from .errors import ParseError, SimulatorError
from .parallel import WorkerPool

STATE_DUMP_MAGIC = b"QSVDUMP\x00"


def format_amplitude(z: complex) -> str:
    return f"{z.real:.6f}{z.imag:+.6f}i"


def format_pmeasure(table: np.ndarray, warn=None) -> str:
    """One line per basis string in ascending binary order, 6 significant
    digits, exact zeros printed as 0."""
    m = (len(table) - 1).bit_length()
    total = float(table.sum())
    if warn is not None and abs(total - 1.0) > 1e-9:
        warn(f"probability table sums to {total!r}, expected 1")
    lines = []
    for i, p in enumerate(table):
        text = "0" if p == 0 else f"{p:.6g}"
        lines.append(f"{format(i, f'0{m}b')}: {text}")
    return "\n".join(lines)


def save_state(state: statevector.StateVector, path) -> None:
    """16-byte header (magic, version, n) + little-endian complex doubles."""
    with open(path, "wb") as fh:
        fh.write(STATE_DUMP_MAGIC)
        fh.write(struct.pack("<II", 1, state.qubit_count))
        fh.write(np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes())


def load_state(path) -> statevector.StateVector:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != STATE_DUMP_MAGIC:
            raise SimulatorError(f"{path} is not a state dump")
        version, n = struct.unpack("<II", fh.read(8))
        if version != 1:
            raise SimulatorError(f"unsupported state dump version {version}")
        amps = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
    if amps.size != 1 << n:
        raise SimulatorError("state dump length does not match its header")
    return statevector.StateVector(n, amps, statevector.default_chunk_log2(n))


def _read_targets(value: str, n: int) -> list[str]:
    path = Path(value)
    if path.is_file():
        lines = path.read_text().split()
        return [ln.strip() for ln in lines if ln.strip()]
    return [t.strip() for t in value.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcsim", description="Multi-backend quantum circuit simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an instruction script")
    run.add_argument("script", help="path to the .qprog script")
    run.add_argument("--mode", choices=("full", "partial", "single"), default="full")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--cut", type=int, default=None, help="partition boundary (partial)")
    run.add_argument("--targets", default=None, help="bitstrings, comma-separated or a file")
    run.add_argument("--in-bits", dest="in_bits", default=None)
    run.add_argument("--out-bits", dest="out_bits", default=None)
    run.add_argument("--split-n", dest="split_n", type=int, default=None)
    run.add_argument("--noise", default=None, help="kind:p[:MNEMONIC,...]")
    run.add_argument("--out", default=None, help="output file (default stdout)")
    run.add_argument("--log", default=None, help="error log file (default stderr)")
    run.add_argument("--max-qubits", type=int, default=statevector.DEFAULT_MAX_QUBITS)
    run.add_argument("--dump-state", default=None, help="write the final state (full mode)")

    gen = sub.add_parser("rqc", help="generate a random layered grid circuit")
    gen.add_argument("--rows", type=int, required=True)
    gen.add_argument("--cols", type=int, required=True)
    gen.add_argument("--depth", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--pmeasure", default=None, help="qubits for a trailing PMEASURE")
    gen.add_argument("--out", default=None, help="output file (default stdout)")

    fbe = sub.add_parser("qfbe", help="function-value binary expansion")
    fbe.add_argument("function", choices=qfbe.FUNCTION_NAMES)
    fbe.add_argument("x", help="input value (decimal or p/q)")
    fbe.add_argument("--bits", type=int, default=16, help="fractional bits")
    fbe.add_argument("--int-bits", dest="int_bits", type=int, default=2)

    rep = sub.add_parser(
        "report", help="run a script in full mode and render CSV + figure"
    )
    rep.add_argument("script")
    rep.add_argument("--workers", type=int, default=1)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--noise", default=None)
    rep.add_argument("--out-dir", default=".", help="directory for the report files")
    rep.add_argument("--log", default=None)
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


class _Log:
    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def __call__(self, message: str) -> None:
        self.lines.append(message)
        if self.path is None:
            print(message, file=sys.stderr)

    def flush(self) -> None:
        if self.path and self.lines:
            Path(self.path).write_text("\n".join(self.lines) + "\n")


def _run_full_text(prog, args, log) -> tuple[str, statevector.RunResult]:
    rng = np.random.default_rng(args.seed)
    model = noise.parse_noise_spec(args.noise) if args.noise else None
    with WorkerPool(args.workers) as pool:
        result = statevector.run_full(
            prog, rng, model, pool=pool, max_qubits=args.max_qubits
        )
    blocks = [format_pmeasure(table, warn=log) for _, table in result.tables]
    if any(i.name == "MEASURE" for i in prog.instructions):
        blocks.append(
            "\n".join(f"creg {j}: {v}" for j, v in enumerate(result.cregs))
        )
    return ("\n\n".join(blocks) + "\n") if blocks else "", result


def _cmd_run(args, log) -> int:
    text = Path(args.script).read_text()
    prog = program.parse_program(text)

    if args.mode == "full":
        out, result = _run_full_text(prog, args, log)
        if args.dump_state:
            save_state(result.state, args.dump_state)
        _emit(out, args.out)
        return 0

    if args.mode == "partial":
        if not args.targets:
            raise ParseError("partial mode requires --targets")
        cut = args.cut if args.cut is not None else prog.qubit_count // 2
        targets = _read_targets(args.targets, prog.qubit_count)
        amps = partition.run_partial(
            prog, cut, targets, workers=args.workers, max_qubits=args.max_qubits
        )
        lines = [f"{t}: {format_amplitude(a)}" for t, a in amps.items()]
        _emit("\n".join(lines) + "\n", args.out)
        return 0

    if not args.out_bits:
        raise ParseError("single mode requires --out-bits")
    in_bits = args.in_bits or "0" * prog.qubit_count
    split_n = args.split_n
    if split_n is None:
        split_n = max(0, (max(1, args.workers) - 1).bit_length())
    amp = graph.run_single(
        prog, in_bits, args.out_bits, split_n, workers=args.workers
    )
    _emit(f"amplitude: {format_amplitude(amp)}\n", args.out)
    return 0


def _cmd_rqc(args) -> int:
    pm = ()
    if args.pmeasure:
        pm = tuple(int(q) for q in args.pmeasure.split(","))
    config = rqc.RqcConfig(args.rows, args.cols, args.depth, args.seed, pmeasure=pm)
    _emit(rqc.generate_rqc(config), args.out)
    return 0


def _cmd_qfbe(args) -> int:
    if args.function == "arctan":
        from fractions import Fraction

        trace = qfbe.arctan_digits(Fraction(args.x), args.bits)
        digits = "".join(str(d) for d in trace.digits)
        value = trace.value()
        print(f"digits: 0.{digits}")
        print(f"value: {float(value):.12g}")
        return 0
    bits = qfbe.reference_value(args.function, args.x, args.int_bits, args.bits)
    value = qfbe.decode_fixed_point(bits, args.int_bits)
    print(f"bits: {bits}")
    print(f"value: {float(value):.12g}")
    return 0


def _cmd_report(args, log) -> int:
    from . import report

    args.mode = "full"
    args.max_qubits = statevector.DEFAULT_MAX_QUBITS
    text = Path(args.script).read_text()
    prog = program.parse_program(text)
    out, result = _run_full_text(prog, args, log)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / Path(args.script).stem
    _emit(out, str(stem) + ".txt")
    written = report.render_tables(result.tables, stem, title=Path(args.script).name)
    for path in written:
        print(path)
    print(f"{stem}.txt")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    log = _Log(getattr(args, "log", None))
    try:
        if args.command == "run":
            return _cmd_run(args, log)
        if args.command == "rqc":
            return _cmd_rqc(args)
        if args.command == "qfbe":
            return _cmd_qfbe(args)
        return _cmd_report(args, log)
    except SimulatorError as exc:
        log(exc.render())
        return exc.exit_code
    finally:
        log.flush()


if __name__ == "__main__":
    sys.exit(main())
