"""High-precision numeric tier: reals known only to a stated number of bits."""

from __future__ import annotations

import ast
import cmath
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import mpmath

from .symbolic import SymbolicReal

DEFAULT_PRECISION = 128
MIN_PRECISION = 53


@dataclass(frozen=True)
class NumericReal:
    value: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise ValueError(f"precision_bits must be >= {MIN_PRECISION}")
        if not isinstance(self.value, mpmath.mpf):
            with mpmath.workprec(self.precision_bits):
                object.__setattr__(self, "value", mpmath.mpf(self.value))
        if not mpmath.isfinite(self.value):
            raise ValueError("NumericReal must be finite")

    @classmethod
    def of(cls, x, precision_bits: int = DEFAULT_PRECISION) -> "NumericReal":
        """Round ``x`` (int, Fraction, float, str expression, mpf) to ``precision_bits``."""
        if isinstance(x, NumericReal):
            return cls(x.value, min(x.precision_bits, precision_bits))
        if isinstance(x, str):
            return evaluate_expression(x, precision_bits)
        with mpmath.workprec(precision_bits):
            if isinstance(x, Fraction):
                v = mpmath.mpf(x.numerator) / x.denominator
            elif isinstance(x, float):
                # a float carries 53 bits however it is stored
                return cls(mpmath.mpf(x), MIN_PRECISION)
            else:
                v = mpmath.mpf(x)
        return cls(v, precision_bits)

    def _binary(self, other, op):
        if isinstance(other, NumericReal):
            bits = min(self.precision_bits, other.precision_bits)
            ov = other.value
        elif isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            bits = self.precision_bits
            ov = other
        else:
            return NotImplemented
        with mpmath.workprec(bits):
            if isinstance(ov, Fraction):
                ov = mpmath.mpf(ov.numerator) / ov.denominator
            return NumericReal(op(+self.value, ov), bits)

    def __add__(self, o):
        return self._binary(o, operator.add)

    def __radd__(self, o):
        return self._binary(o, lambda a, b: b + a)

    def __sub__(self, o):
        return self._binary(o, operator.sub)

    def __rsub__(self, o):
        return self._binary(o, lambda a, b: b - a)

    def __mul__(self, o):
        return self._binary(o, operator.mul)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self._binary(o, operator.truediv)

    def __rtruediv__(self, o):
        return self._binary(o, lambda a, b: b / a)

    def __pow__(self, n: int):
        with mpmath.workprec(self.precision_bits):
            return NumericReal(self.value ** n, self.precision_bits)

    def __neg__(self):
        return NumericReal(-self.value, self.precision_bits)

    def __abs__(self):
        return NumericReal(abs(self.value), self.precision_bits)

    def __float__(self) -> float:
        return float(self.value)

    def __lt__(self, o):
        return self.value < _raw(o)

    def __le__(self, o):
        return self.value <= _raw(o)

    def __gt__(self, o):
        return self.value > _raw(o)

    def __ge__(self, o):
        return self.value >= _raw(o)

    def to_fraction(self) -> Fraction:
        """The exact binary value as a fraction."""
        return mpf_to_fraction(self.value)

    def text(self) -> str:
        digits = int(self.precision_bits * math.log10(2)) + 1
        return mpmath.nstr(self.value, digits, strip_zeros=False)

    def __repr__(self) -> str:
        return f"NumericReal({self.text()}, {self.precision_bits} bits)"


def _raw(o):
    if isinstance(o, NumericReal):
        return o.value
    if isinstance(o, Fraction):
        return mpmath.mpf(o.numerator) / o.denominator
    return o


def mpf_to_fraction(v) -> Fraction:
    # read the raw tuple: wrapping in mpf() again would round to the ambient precision
    sign, man, exp, _ = v._mpf_ if isinstance(v, mpmath.mpf) else mpmath.mpf(v)._mpf_
    if not man and exp:
        raise ValueError(f"{v} is not finite")
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def to_fraction(x) -> Fraction:
    """Exact binary value of a float, NumericReal, mpf or rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, NumericReal):
        return x.to_fraction()
    if isinstance(x, mpmath.mpf):
        return mpf_to_fraction(x)
    if isinstance(x, SymbolicReal):
        return x.as_fraction()
    raise TypeError(f"cannot convert {type(x).__name__} to a fraction")


class UnassignedSymbolError(KeyError):
    pass


def sym_eval(x: SymbolicReal, assignment: Mapping[str, NumericReal]) -> NumericReal:
    """Evaluate ``x`` at the minimum precision found in ``assignment``."""
    x = SymbolicReal.coerce(x)
    for sym in sorted(x.symbols()):
        if sym not in assignment:
            raise UnassignedSymbolError(f"unassigned symbol {sym!r}")
    values = {k: NumericReal.of(v) if not isinstance(v, NumericReal) else v
              for k, v in assignment.items()}
    bits = min((v.precision_bits for v in values.values()), default=DEFAULT_PRECISION)
    with mpmath.workprec(bits + 16):
        total = mpmath.mpf(x.rational_part.numerator) / x.rational_part.denominator
        for mono, coeff in x.terms.items():
            term = mpmath.mpf(coeff.numerator) / coeff.denominator
            for sym, exp in mono.exponents:
                term *= values[sym].value ** exp
            total += term
    with mpmath.workprec(bits):
        return NumericReal(+total, bits)


def evaluate_to_float(x, assignment: Mapping[str, NumericReal] | None = None) -> float:
    if isinstance(x, SymbolicReal):
        if x.is_rational:
            return float(x.rational_part)
        return float(sym_eval(x, assignment or {}).value)
    return float(x)


# -- expressions ---------------------------------------------------------------

_FUNCS = {
    "sqrt": mpmath.sqrt,
    "cbrt": mpmath.cbrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "sin": mpmath.sin,
    "cos": mpmath.cos,
}
_CONSTS = {
    "pi": lambda: +mpmath.pi,
    "e": lambda: +mpmath.e,
    "phi": lambda: +mpmath.phi,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def evaluate_expression(text: str, precision_bits: int = DEFAULT_PRECISION) -> NumericReal:
    """Evaluate a small arithmetic expression such as ``"sqrt(2)"`` or ``"2^(1/3)"``.

    Only numbers, ``pi``, ``e``, ``phi``, the four operations, powers and a few
    elementary functions are accepted.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            q = Fraction(repr(node.value))  # decimal literal, not its binary float
            return mpmath.mpf(q.numerator) / q.denominator
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]()
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element in {text!r}")

    with mpmath.workprec(precision_bits + 32):
        v = ev(tree)
    with mpmath.workprec(precision_bits):
        return NumericReal(+v, precision_bits)


def chord(z1: complex, z2: complex) -> float:
    """Chordal distance ``|z1 - z2|`` between points of the unit circle."""
    return abs(z1 - z2)


def power_chord(z1: complex, z2: complex, n: int) -> tuple[float, float]:
    """Return ``(|z1**n - z2**n|, |n|*|z1 - z2|)``; the first never exceeds the second.

    Powers are taken through the argument so that rounding does not drift off
    the unit circle for large ``|n|``.
    """
    a1, a2 = cmath.phase(z1), cmath.phase(z2)
    lhs = abs(cmath.exp(1j * n * a1) - cmath.exp(1j * n * a2))
    return lhs, abs(n) * chord(z1, z2)
