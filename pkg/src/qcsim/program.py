"""Parser for the circuit instruction set and the expanded program IR.

A script is one instruction per line; '%' lines are comments; QINIT must come
before any gate. DAGGER/ENDDAGGER and CONTROL/ENDCONTROL blocks are expanded
at parse time, so a parsed Program contains only primitive gates plus MEASURE
and PMEASURE directives.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import gates
from .errors import (
    ControlQubitCollision,
    CregOutOfRange,
    DuplicateQubitArg,
    MalformedAngle,
    MeasureInsideControl,
    MeasureInsideDagger,
    MissingQinit,
    ParseError,
    QubitOutOfRange,
    UnbalancedBlock,
    UnknownMnemonic,
)

MEASURE = "MEASURE"
PMEASURE = "PMEASURE"


@dataclass(frozen=True, eq=False)
class Instruction:
    """One primitive instruction: a gate, MEASURE, or PMEASURE.

    qubits follow the argument order of the mnemonic (controls first, target
    last); controls holds extra control qubits added by CONTROL expansion;
    matrix holds the four row-major entries of an element-form U4.
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: tuple[complex, ...] | None = None
    controls: tuple[int, ...] = ()
    creg: int | None = None
    line: int = 0

    @property
    def kind(self) -> str:
        if self.name == MEASURE:
            return "measure"
        if self.name == PMEASURE:
            return "pmeasure"
        return "gate"

    @property
    def is_gate(self) -> bool:
        return self.kind == "gate"

    def all_qubits(self) -> tuple[int, ...]:
        return self.qubits + self.controls

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instruction):
            return NotImplemented
        return (
            self.name == other.name
            and self.qubits == other.qubits
            and self.params == other.params
            and self.matrix == other.matrix
            and self.controls == other.controls
            and self.creg == other.creg
        )

    def __hash__(self):
        return hash((self.name, self.qubits, self.params, self.matrix, self.controls))


@dataclass(frozen=True, eq=False)
class Program:
    """Fully expanded circuit: declarations plus a flat instruction sequence."""

    qubit_count: int
    creg_count: int
    instructions: tuple[Instruction, ...]

    @property
    def source_line_map(self) -> dict[int, int]:
        return {i: inst.line for i, inst in enumerate(self.instructions)}

    def gate_instructions(self) -> tuple[Instruction, ...]:
        return tuple(i for i in self.instructions if i.is_gate)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (
            self.qubit_count == other.qubit_count
            and self.creg_count == other.creg_count
            and self.instructions == other.instructions
        )


# --------------------------------------------------------------------------
# angle expressions
# --------------------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _tokenize_angle(expr: str, line: int | None):
    pos, tokens = 0, []
    while pos < len(expr):
        ch = expr[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "*/-":
            tokens.append(ch)
            pos += 1
            continue
        m = _NUMBER.match(expr, pos)
        if m:
            tokens.append(float(m.group()))
            pos = m.end()
            continue
        if expr.startswith("pi", pos):
            tokens.append(math.pi)
            pos += 2
            continue
        raise MalformedAngle(f"bad token at {expr[pos:]!r} in angle {expr!r}", line)
    return tokens


def eval_angle(expr: str, line: int | None = None) -> float:
    """Evaluate an angle expression: decimal literals, pi, unary -, *, /."""
    tokens = _tokenize_angle(expr, line)
    if not tokens:
        raise MalformedAngle("empty angle expression", line)

    def take_factor(i):
        neg = False
        while i < len(tokens) and tokens[i] == "-":
            neg = not neg
            i += 1
        if i >= len(tokens) or not isinstance(tokens[i], float):
            raise MalformedAngle(f"expected a number or pi in {expr!r}", line)
        return (-tokens[i] if neg else tokens[i]), i + 1

    value, i = take_factor(0)
    while i < len(tokens):
        op = tokens[i]
        if op not in ("*", "/"):
            raise MalformedAngle(f"expected * or / in {expr!r}", line)
        rhs, i = take_factor(i + 1)
        if op == "*":
            value *= rhs
        else:
            value /= rhs
    return value


# --------------------------------------------------------------------------
# complex literals (U4 element form)
# --------------------------------------------------------------------------


def parse_complex_literal(text: str, line: int | None = None) -> complex:
    """Parse 're', 'imi' or 're+imi' with optional signs; 'i' is the unit."""
    s = text.strip().replace(" ", "")
    if not s:
        raise MalformedAngle("empty complex literal", line)
    if not s.endswith("i"):
        try:
            return complex(float(s), 0.0)
        except ValueError:
            raise MalformedAngle(f"bad complex literal {text!r}", line) from None
    body = s[:-1]
    split = 0
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-" and body[idx - 1] not in "eE":
            split = idx
            break
    re_part, im_part = body[:split], body[split:]
    if im_part in ("", "+", "-"):
        im_part += "1"
    try:
        return complex(float(re_part) if re_part else 0.0, float(im_part))
    except ValueError:
        raise MalformedAngle(f"bad complex literal {text!r}", line) from None


def format_complex_literal(z: complex) -> str:
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


# --------------------------------------------------------------------------
# line-level parsing
# --------------------------------------------------------------------------


def _split_args(rest: str, line: int) -> list[str]:
    """Split an argument string on commas outside double quotes."""
    args, buf, quoted = [], [], False
    for ch in rest:
        if ch == '"':
            quoted = not quoted
            buf.append(ch)
        elif ch == "," and not quoted:
            args.append("".join(buf).strip())
            buf = []
        else:
            buf.append(ch)
    if quoted:
        raise ParseError("unterminated quote", line)
    tail = "".join(buf).strip()
    if tail:
        args.append(tail)
    return [a for a in args if a]


def _unquote(arg: str) -> str:
    a = arg.strip()
    if len(a) >= 2 and a[0] == '"' and a[-1] == '"':
        return a[1:-1]
    return a


def _parse_qubit(arg: str, n: int, line: int) -> int:
    try:
        q = int(arg)
    except ValueError:
        raise ParseError(f"bad qubit index {arg!r}", line) from None
    if not 0 <= q < n:
        raise QubitOutOfRange(f"qubit {q} outside [0, {n - 1}]", line)
    return q


@dataclass
class _Block:
    kind: str  # "dagger" | "control"
    control: int | None
    line: int
    items: list = field(default_factory=list)


def _parse_u4_payload(payload: str, line: int) -> tuple[tuple[float, ...] | None, tuple[complex, ...] | None]:
    """Angle form when all four entries parse as angle expressions, else
    element form of complex literals."""
    parts = [p.strip() for p in payload.split(",")]
    if len(parts) != 4:
        raise ParseError(f"U4 expects 4 comma-separated values, got {len(parts)}", line)
    try:
        angles = tuple(eval_angle(p, line) for p in parts)
        return angles, None
    except MalformedAngle:
        pass
    entries = tuple(parse_complex_literal(p, line) for p in parts)
    return None, entries


def _parse_gate_line(name: str, args: list[str], n: int, line: int) -> Instruction:
    arity, _, n_angles = gates.GATE_TABLE[name]
    if name == "U4":
        if len(args) != 2:
            raise ParseError("U4 expects a qubit and a quoted 4-value list", line)
        q = _parse_qubit(args[0], n, line)
        angles, entries = _parse_u4_payload(_unquote(args[1]), line)
        if entries is not None:
            return Instruction("U4", (q,), matrix=entries, line=line)
        m = gates.u4_from_angles(*angles)
        return Instruction("U4", (q,), matrix=tuple(m.reshape(-1).tolist()), line=line)

    if len(args) != arity + n_angles:
        raise ParseError(
            f"{name} expects {arity + n_angles} argument(s), got {len(args)}", line
        )
    qubits = tuple(_parse_qubit(a, n, line) for a in args[:arity])
    if len(set(qubits)) != len(qubits):
        raise DuplicateQubitArg(f"repeated qubit in {name} {args}", line)
    params = tuple(eval_angle(_unquote(a), line) for a in args[arity:])
    return Instruction(name, qubits, params=params, line=line)


# --------------------------------------------------------------------------
# block expansion
# --------------------------------------------------------------------------

_T_DAG = tuple(np.conj(np.diag(gates.T)).tolist())


def _dagger_instruction(inst: Instruction) -> list[Instruction]:
    if inst.name == MEASURE or inst.name == PMEASURE:
        raise MeasureInsideDagger(
            f"{inst.name} has no adjoint inside DAGGER", inst.line
        )
    if inst.name in gates.SELF_ADJOINT:
        return [inst]
    if inst.name in ("RX", "RY", "RZ", "CR"):
        return [replace(inst, params=(-inst.params[0],))]
    if inst.name == "S":
        return [replace(inst, name="U4", matrix=(1 + 0j, 0j, 0j, -1j))]
    if inst.name == "T":
        return [replace(inst, name="U4", matrix=(1 + 0j, 0j, 0j, _T_DAG[1]))]
    if inst.name == "U4":
        m = np.array(inst.matrix, dtype=complex).reshape(2, 2).conj().T
        return [replace(inst, matrix=tuple(m.reshape(-1).tolist()))]
    if inst.name == "iSWAP":
        # iSWAP^dag has no mnemonic: SWAP * (S x S) * CZ reproduces it exactly
        i, j = inst.qubits
        c = inst.controls
        ln = inst.line
        return [
            Instruction("CZ", (i, j), controls=c, line=ln),
            Instruction("S", (i,), controls=c, line=ln),
            Instruction("S", (j,), controls=c, line=ln),
            Instruction("SWAP", (i, j), controls=c, line=ln),
        ]
    raise ParseError(f"cannot invert {inst.name}", inst.line)


def expand_dagger(block: list[Instruction]) -> list[Instruction]:
    """Reverse a gate block, replacing each gate by its conjugate transpose."""
    out: list[Instruction] = []
    for inst in reversed(block):
        out.extend(_dagger_instruction(inst))
    return out


def expand_control(block: list[Instruction], control: int) -> list[Instruction]:
    """Add one control qubit to every gate of an expanded block."""
    out = []
    for inst in block:
        if not inst.is_gate:
            raise MeasureInsideControl(
                f"{inst.name} cannot be controlled", inst.line
            )
        if control in inst.all_qubits():
            raise ControlQubitCollision(
                f"control qubit {control} already used by {inst.name}", inst.line
            )
        out.append(replace(inst, controls=inst.controls + (control,)))
    return out


def _expand_items(items: list) -> list[Instruction]:
    flat: list[Instruction] = []
    for item in items:
        if isinstance(item, Instruction):
            flat.append(item)
        elif item.kind == "dagger":
            flat.extend(expand_dagger(_expand_items(item.items)))
        else:
            flat.extend(expand_control(_expand_items(item.items), item.control))
    return flat


# --------------------------------------------------------------------------
# program-level parsing / printing
# --------------------------------------------------------------------------


def parse_program(text: str) -> Program:
    """Parse a script into a fully expanded Program."""
    qubit_count: int | None = None
    creg_count = 0
    root: list = []
    stack: list[_Block] = []

    def sink() -> list:
        return stack[-1].items if stack else root

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("%"):
            continue
        parts = stripped.split(None, 1)
        name = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        args = _split_args(rest, lineno)

        if name == "QINIT":
            if qubit_count is not None:
                raise ParseError("duplicate QINIT", lineno)
            if len(args) != 1:
                raise ParseError("QINIT expects one argument", lineno)
            try:
                qubit_count = int(args[0])
            except ValueError:
                raise ParseError(f"bad qubit count {args[0]!r}", lineno) from None
            if qubit_count < 1:
                raise ParseError("QINIT needs at least 1 qubit", lineno)
            continue
        if qubit_count is None:
            raise MissingQinit(f"{name} before QINIT", lineno)
        if name == "CREG":
            if len(args) != 1:
                raise ParseError("CREG expects one argument", lineno)
            try:
                creg_count = int(args[0])
            except ValueError:
                raise ParseError(f"bad register count {args[0]!r}", lineno) from None
            if creg_count < 0:
                raise ParseError("CREG cannot be negative", lineno)
            continue

        if name == "DAGGER":
            stack.append(_Block("dagger", None, lineno))
            continue
        if name == "ENDDAGGER":
            if not stack or stack[-1].kind != "dagger":
                raise UnbalancedBlock("ENDDAGGER without matching DAGGER", lineno)
            block = stack.pop()
            sink().append(block)
            continue
        if name == "CONTROL":
            if len(args) != 1:
                raise ParseError("CONTROL expects one qubit", lineno)
            c = _parse_qubit(args[0], qubit_count, lineno)
            stack.append(_Block("control", c, lineno))
            continue
        if name == "ENDCONTROL":
            if not stack or stack[-1].kind != "control":
                raise UnbalancedBlock("ENDCONTROL without matching CONTROL", lineno)
            block = stack.pop()
            if args:
                c = _parse_qubit(args[0], qubit_count, lineno)
                if c != block.control:
                    raise UnbalancedBlock(
                        f"ENDCONTROL {c} does not match CONTROL {block.control}",
                        lineno,
                    )
            sink().append(block)
            continue

        if name == MEASURE:
            if len(args) != 2:
                raise ParseError("MEASURE expects qubit, $register", lineno)
            q = _parse_qubit(args[0], qubit_count, lineno)
            reg = args[1].strip()
            if not reg.startswith("$"):
                raise ParseError(f"MEASURE register must start with $, got {reg!r}", lineno)
            try:
                r = int(reg[1:])
            except ValueError:
                raise ParseError(f"bad register {reg!r}", lineno) from None
            if not 0 <= r < creg_count:
                raise CregOutOfRange(f"register {r} outside [0, {creg_count - 1}]", lineno)
            sink().append(Instruction(MEASURE, (q,), creg=r, line=lineno))
            continue
        if name == PMEASURE:
            if not args:
                raise ParseError("PMEASURE expects at least one qubit", lineno)
            qubits = tuple(_parse_qubit(a, qubit_count, lineno) for a in args)
            if len(set(qubits)) != len(qubits):
                raise DuplicateQubitArg("repeated qubit in PMEASURE", lineno)
            sink().append(Instruction(PMEASURE, qubits, line=lineno))
            continue

        if name not in gates.GATE_TABLE or name in ("P0", "P1"):
            raise UnknownMnemonic(f"unknown mnemonic {name!r}", lineno)
        sink().append(_parse_gate_line(name, args, qubit_count, lineno))

    if qubit_count is None:
        raise MissingQinit("script has no QINIT")
    if stack:
        blk = stack[-1]
        raise UnbalancedBlock(f"{blk.kind.upper()} block never closed", blk.line)

    return Program(qubit_count, creg_count, tuple(_expand_items(root)))


def _format_angle(v: float) -> str:
    return f'"{v!r}"'


def _instruction_lines(inst: Instruction) -> list[str]:
    if inst.name == MEASURE:
        body = f"MEASURE {inst.qubits[0]},${inst.creg}"
    elif inst.name == PMEASURE:
        body = "PMEASURE " + ",".join(str(q) for q in inst.qubits)
    elif inst.name == "U4":
        payload = ",".join(format_complex_literal(z) for z in inst.matrix)
        body = f'U4 {inst.qubits[0]},"{payload}"'
    else:
        args = [str(q) for q in inst.qubits]
        args += [_format_angle(p) for p in inst.params]
        body = f"{inst.name} {','.join(args)}"
    lines = [body]
    for c in inst.controls:  # innermost control first -> wrap outward
        lines = [f"CONTROL {c}", *lines, f"ENDCONTROL {c}"]
    return lines


def to_script(program: Program) -> str:
    """Serialize a Program back to script text (reparses to an equal Program)."""
    lines = [f"QINIT {program.qubit_count}", f"CREG {program.creg_count}"]
    for inst in program.instructions:
        lines.extend(_instruction_lines(inst))
    return "\n".join(lines) + "\n"
