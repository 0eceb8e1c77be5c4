"""Function-value binary expansion: digit recurrences, their inverses, and
fixed-point reference oracles for the transcendental function set.

The forward recurrence iterates a_0 = x, a_{k+1} = r_{d_k}(a_k) where digit
d_k is 1 exactly when a_k lies in D_1; the emitted digits are the binary
fraction of f(x). The inverse recurrence consumes the input's fractional
bits (least significant first) through the inverse maps and returns the
final iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import sympy as sp

from .errors import BranchUndefined, DomainError, DomainEscape

NEG_INF = float("-inf")

# exact rational iterates double in size every step; beyond this many bits
# the iterate moves to an mpmath float with enough guard precision
_EXACT_BIT_CAP = 4096


@dataclass(frozen=True)
class FbeSpec:
    """A digit recurrence: domain split D_0/D_1 plus the maps r_0/r_1."""

    in_d1: Callable
    r0: Callable
    r1: Callable
    r0_inv: Callable | None = None
    r1_inv: Callable | None = None
    in_interval: Callable = lambda a: True


@dataclass
class FbeTrace:
    iterates: list
    digits: list[int]

    def value(self) -> Fraction:
        """Reconstruction sum over emitted digits."""
        total = Fraction(0)
        for k, d in enumerate(self.digits):
            if d:
                total += Fraction(1, 2 ** (k + 1))
        return total


def fbe_digits(spec: FbeSpec, x, n: int) -> FbeTrace:
    """Run the recurrence for n digits, recording every iterate."""
    a = x
    iterates = [a]
    digits = []
    for _ in range(n):
        if not spec.in_interval(a):
            raise DomainEscape(f"iterate {a!r} left the function's interval")
        d = 1 if spec.in_d1(a) else 0
        digits.append(d)
        a = spec.r1(a) if d else spec.r0(a)
        iterates.append(a)
    return FbeTrace(iterates, digits)


def inverse_fbe(spec: FbeSpec, digits, a0):
    """Iterate the inverse maps from a0, consuming the least significant
    fractional bit first (digits are given most significant first)."""
    if spec.r0_inv is None or spec.r1_inv is None:
        raise BranchUndefined("spec has no inverse maps")
    a = a0
    for v in reversed(list(digits)):
        a = spec.r1_inv(a) if v else spec.r0_inv(a)
    return a


# --------------------------------------------------------------------------
# the arctan instance
# --------------------------------------------------------------------------


def _arctan_step(a, precision_bits: int):
    """2a / (1 - a^2) with the exact pole conventions: a = +-1 maps to -inf
    and -inf maps to 0. Oversized exact rationals demote to mpmath floats."""
    if a == NEG_INF:
        return Fraction(0)
    if a == 1 or a == -1:
        return NEG_INF
    if isinstance(a, Fraction):
        nxt = 2 * a / (1 - a * a)
        if nxt.numerator.bit_length() + nxt.denominator.bit_length() > _EXACT_BIT_CAP:
            with mpmath.workprec(precision_bits):
                return mpmath.mpf(nxt.numerator) / mpmath.mpf(nxt.denominator)
        return nxt
    with mpmath.workprec(precision_bits):
        return 2 * a / (1 - a * a)


def _arctan_inv(b, want_negative: bool):
    """Inverse branches of 2a/(1-a^2) = b.

    The two roots (-1 +- sqrt(1+b^2))/b multiply to -1, so exactly one is
    non-negative; the branch is picked by the domain the result must land
    in (r0 maps from D_0 = {a >= 0}, r1 from D_1 = {a < 0}).
    """
    if b == NEG_INF:
        raise BranchUndefined("no inverse at the pole sentinel")
    if b == 0:
        if not want_negative:
            return 0.0
        raise BranchUndefined("the D_1 inverse branch is undefined at 0")
    bf = float(b)
    root = math.sqrt(1.0 + bf * bf)
    positive = (-1.0 + root) / bf if bf > 0 else (-1.0 - root) / bf
    return -1.0 / positive if want_negative else positive


def arctan_spec(n_digits: int = 32) -> FbeSpec:
    """Built-in recurrence computing arctan(x)/pi for x > 0 (D_1 = {a < 0})."""
    prec = 2 * n_digits + 80
    step = lambda a: _arctan_step(a, prec)
    return FbeSpec(
        in_d1=lambda a: a < 0,
        r0=step,
        r1=step,
        r0_inv=lambda b: _arctan_inv(b, False),
        r1_inv=lambda b: _arctan_inv(b, True),
    )


def arctan_digits(x, n: int) -> FbeTrace:
    """n binary digits of arctan(x)/pi for x > 0 (x = 0 is the fixed point 0)."""
    if isinstance(x, float):
        x = Fraction(x)
    elif isinstance(x, int):
        x = Fraction(x)
    return fbe_digits(arctan_spec(n), x, n)


# --------------------------------------------------------------------------
# fixed-point reference oracle
# --------------------------------------------------------------------------

_X = sp.Symbol("x")
_FUNCTIONS = {
    "log2": sp.log(_X, 2),
    "ln": sp.log(_X),
    "arccos": sp.acos(_X) / sp.pi,
    "arcsin": sp.asin(_X) / sp.pi,
    "arccot": sp.acot(_X) / sp.pi,
    "arctan": sp.atan(_X) / sp.pi,
    "exp2": 2**_X,
    "exp": sp.exp(_X),
    "cos": sp.cos(sp.pi * _X),
    "sin": sp.sin(sp.pi * _X),
    "cot": sp.cot(sp.pi * _X),
    "tan": sp.tan(sp.pi * _X),
}

FUNCTION_NAMES = tuple(_FUNCTIONS)


def _trunc_toward_zero(scaled) -> int:
    """Exact truncation of a sympy real number toward zero."""
    fl, ce = sp.floor(scaled), sp.ceiling(scaled)
    if fl == ce:
        return int(fl)
    neg = scaled.is_negative
    if neg is None:
        neg = bool(scaled.evalf(60) < 0)
    return int(ce) if neg else int(fl)


def reference_value(function: str, x, int_bits: int, frac_bits: int) -> str:
    """Two's-complement fixed-point encoding of the scaled function value,
    truncated (toward zero) to frac_bits fractional bits."""
    if function not in _FUNCTIONS:
        raise DomainError(f"unknown function {function!r}")
    if int_bits < 1 or frac_bits < 0:
        raise DomainError("need at least one integer bit and frac_bits >= 0")
    xq = sp.Rational(Fraction(x))
    value = _FUNCTIONS[function].subs(_X, xq)
    if value.has(sp.zoo) or value.has(sp.oo) or value.has(-sp.oo) or value.has(sp.nan):
        raise DomainError(f"{function}({float(xq)}) is not finite")
    if not value.is_real:
        raise DomainError(f"{function}({float(xq)}) is not real")
    units = _trunc_toward_zero(value * 2**frac_bits)
    width = int_bits + frac_bits
    if not -(1 << (width - 1)) <= units < (1 << (width - 1)):
        raise DomainError(
            f"value {float(value):g} does not fit {int_bits}.{frac_bits} bits"
        )
    encoded = units & ((1 << width) - 1)
    bits = format(encoded, f"0{width}b")
    if frac_bits:
        return f"{bits[:int_bits]}.{bits[int_bits:]}"
    return bits


def decode_fixed_point(bits: str, int_bits: int) -> Fraction:
    """Inverse of reference_value's encoding, for tests and CLI echo."""
    digits = bits.replace(".", "")
    width = len(digits)
    units = int(digits, 2)
    if digits[0] == "1":
        units -= 1 << width
    return Fraction(units, 1 << (width - int_bits))
