"""Integer-relation detection by LLL on a scaled embedding lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .lattice import DEFAULT_DELTA, lll_reduce
from .numeric import DEFAULT_PRECISION, NumericReal


class InsufficientPrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class IntegerRelation:
    coefficients: tuple[int, ...]
    residual: float

    def __post_init__(self):
        if not any(self.coefficients):
            raise ValueError("an integer relation needs a nonzero coefficient")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")

    @property
    def height(self) -> int:
        return max(abs(k) for k in self.coefficients)


def _normalize(coeffs: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in coeffs:
        g = math.gcd(g, c)
    out = [c // g for c in coeffs]
    first = next(c for c in out if c)
    if first < 0:
        out = [-c for c in out]
    return tuple(out)


def _as_mpf(x, bits: int):
    if isinstance(x, NumericReal):
        return x.value
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int) and not isinstance(x, bool):
        return mpmath.mpf(x)
    raise TypeError(f"unsupported numeric input {type(x).__name__}; wrap floats in NumericReal")


def relation_residual(coeffs: Sequence[int], xs: Sequence, precision_bits: int) -> mpmath.mpf:
    with mpmath.workprec(precision_bits):
        return abs(mpmath.fsum(k * _as_mpf(x, precision_bits) for k, x in zip(coeffs, xs)))


def find_integer_relation(xs: Sequence, max_coeff: int,
                          precision_bits: int = DEFAULT_PRECISION) -> IntegerRelation | None:
    """Search for nonzero integers ``k`` with ``sum(k_i x_i) ~ 0`` and ``|k_i| <= max_coeff``.

    Inputs are ``NumericReal`` values (or exact ints/Fractions).  A relation is
    accepted when its residual is at most ``2**(-precision_bits/2) * max|x_i|``.
    ``None`` means nothing was found within these bounds; it is not a proof of
    independence.
    """
    if not xs:
        raise ValueError("xs must be nonempty")
    if max_coeff < 1:
        raise ValueError("max_coeff must be >= 1")
    for x in xs:
        if isinstance(x, NumericReal) and x.precision_bits < precision_bits:
            raise InsufficientPrecisionError(
                f"insufficient precision: input has {x.precision_bits} bits, "
                f"search needs {precision_bits}")
    n = len(xs)
    work = precision_bits + 32
    with mpmath.workprec(work):
        vals = [_as_mpf(x, work) for x in xs]
        for i, v in enumerate(vals):
            if v == 0:
                coeffs = tuple(1 if j == i else 0 for j in range(n))
                return IntegerRelation(coeffs, 0.0)
        if n == 1:
            return None
        scale = max(abs(v) for v in vals)
        big = mpmath.mpf(2) ** precision_bits
        column = [int(mpmath.nint(big * v / scale)) for v in vals]
        threshold = mpmath.ldexp(scale, -precision_bits // 2)

    basis = [[1 if j == i else 0 for j in range(n)] + [column[i]] for i in range(n)]
    reduced = lll_reduce(basis, DEFAULT_DELTA)

    best: IntegerRelation | None = None
    best_norm = None
    for row in reduced:
        k = row[:n]
        if not any(k) or max(abs(c) for c in k) > max_coeff:
            continue
        k = _normalize(k)
        res = relation_residual(k, xs, precision_bits)
        if res > threshold:
            continue
        norm = sum(c * c for c in k)
        if best is None or norm < best_norm:
            best = IntegerRelation(k, float(res))
            best_norm = norm
    return best
