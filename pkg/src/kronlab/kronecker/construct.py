"""Finite rationally independent point sets near prescribed targets."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from ..numkit import (DEFAULT_PRECISION, NumericReal, SymbolicReal, find_integer_relation,
                      fresh_symbols, sym_eval, to_fraction)
from ..qindep import (DEFAULT_BOUNDS, DEPENDENT, Bounds, GroupSlice,
                      check_group_independence, check_q_independence)
from .types import KroneckerSetSpec

SYMBOLIC_CERT = "symbolic-fresh-transcendental"
DEFAULT_ROUNDS = 10


class ConstructionError(RuntimeError):
    """Rejection sampling did not produce an independent set within its budget."""

    def __init__(self, message: str, diagnostics: list):
        self.diagnostics = diagnostics
        super().__init__(message)


def _exact_target(y) -> Fraction:
    if isinstance(y, float):
        return Fraction(repr(y))  # 0.3 means 3/10, not its binary neighbour
    return to_fraction(y)


def numeric_certificate(bounds: Bounds) -> str:
    return f"numeric-no-relation(max_coeff={bounds.max_coeff},bits={bounds.precision_bits})"


def build_kronecker_points(targets: Sequence, delta, slice_: GroupSlice, tier: str | None = None,
                           interval: tuple | None = None, seed: int = 0,
                           max_rounds: int = DEFAULT_ROUNDS,
                           bounds: Bounds = DEFAULT_BOUNDS) -> KroneckerSetSpec:
    """Points ``x_i`` with ``|x_i - y_i| < delta`` such that ``L = U_h h*{x_i}`` is independent.

    Symbolic tier: ``x_i = y_i + (delta/2) * tau_i`` with fresh basis symbols, so
    independence is exact.  The returned ``assignment`` gives each ``tau_i`` a
    nominal value in ``(-1, 1)`` for numeric work.

    Numeric tier: ``x_i`` is drawn uniformly from ``(y_i - delta, y_i + delta)`` at
    full working precision, and the draw is kept once no integer relation is
    found on ``L`` within ``bounds``.
    """
    ys = [_exact_target(y) for y in targets]
    delta = _exact_target(delta)
    if not ys:
        raise ValueError("at least one target is required")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if interval is not None:
        a, b = (_exact_target(v) for v in interval)
        for y in ys:
            if not a <= y <= b:
                raise ValueError(f"target {y} outside [{a}, {b}]")
    tier = tier or slice_.tier
    verdict = check_group_independence(slice_, bounds)
    if verdict.status == DEPENDENT:
        raise ValueError(f"slice is dependent: relation {verdict.relation.coefficients}")

    rng = np.random.default_rng(seed)
    if tier == "symbolic":
        if slice_.tier != "symbolic":
            raise ValueError("a symbolic construction needs a symbolic slice")
        taken = set()
        for g in slice_.generators:
            taken |= SymbolicReal.coerce(g).symbols()
        names = fresh_symbols(len(ys), taken)
        points = tuple(SymbolicReal(y) + SymbolicReal.symbol(nm, 1, delta / 2)
                       for y, nm in zip(ys, names))
        assignment = {nm: NumericReal.of(_uniform_open(rng, -1, 1, bounds.precision_bits),
                                         bounds.precision_bits) for nm in names}
        return KroneckerSetSpec(points, SYMBOLIC_CERT, slice_, assignment, 1)

    bits = bounds.precision_bits
    hs = [NumericReal.of(h, bits) if not isinstance(h, NumericReal) else h
          for h in slice_.values]
    diagnostics = []
    for rnd in range(1, max_rounds + 1):
        xs = [NumericReal.of(_uniform_open(rng, y - delta, y + delta, bits), bits) for y in ys]
        L = [h * x for h in hs for x in xs]
        if len({l.to_fraction() for l in L}) != len(L):
            diagnostics.append({"round": rnd, "reason": "repeated element"})
            continue
        rel = find_integer_relation(L, bounds.max_coeff, bits)
        if rel is None:
            return KroneckerSetSpec(tuple(xs), numeric_certificate(bounds), slice_, {}, rnd)
        diagnostics.append({"round": rnd, "relation": list(rel.coefficients),
                            "residual": rel.residual})
    raise ConstructionError(f"no independent sample in {max_rounds} rounds", diagnostics)


def _uniform_open(rng: np.random.Generator, lo: Fraction, hi: Fraction, bits: int) -> Fraction:
    """Uniform draw from ``(lo, hi)`` on a grid of ``2**bits`` points, endpoints excluded."""
    words = -(-bits // 63)
    u = 0
    for _ in range(words):
        u = (u << 63) | int(rng.integers(0, 1 << 63))
    denom = 1 << (63 * words)
    u = max(1, min(u, denom - 1))
    return Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(u, denom)


def verify_construction(spec: KroneckerSetSpec, targets: Sequence, delta,
                        bounds: Bounds = DEFAULT_BOUNDS) -> str:
    """Independent re-check of a produced set; returns the independence status of ``L``."""
    L = spec.realized()
    for x, y in zip(spec.points, targets):
        if isinstance(x, SymbolicReal):
            dev = abs(sym_eval(x - SymbolicReal(_exact_target(y)), spec.assignment).value)
        else:
            dev = abs(x.value - mpmath.mpf(float(y)))
        if not dev < float(_exact_target(delta)):
            raise AssertionError(f"point {x} is not within delta of {y}")
    return check_q_independence(L, bounds).status


# -- Korner-style points ---------------------------------------------------------------


def korner_points(h, targets: Sequence, delta, assignment: dict | None = None,
                  precision_bits: int = DEFAULT_PRECISION) -> list:
    """``x_i = h**(2i) * q_i`` with dyadic ``q_i`` chosen so that ``|x_i - y_i| < delta``.

    ``q_i`` has denominator ``2**m`` for the least ``m`` with ``h**(2i) / 2**m < delta``
    (and ``q_i != 0``), which keeps the rounding error below ``delta / 2``.  For a
    symbolic ``h`` the numeric value of ``h`` comes from ``assignment``.
    """
    delta = _exact_target(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    symbolic = isinstance(h, SymbolicReal) and not h.is_rational
    if symbolic:
        hval = sym_eval(h, assignment or {})
        bits = hval.precision_bits
    else:
        hval = h if isinstance(h, NumericReal) else NumericReal.of(h, precision_bits)
        bits = hval.precision_bits
    out = []
    with mpmath.workprec(bits + 32):
        for i, y in enumerate(targets, start=1):
            y = _exact_target(y)
            if y == 0:
                raise ValueError("targets must be nonzero")
            p = hval.value ** (2 * i)
            ratio = (mpmath.mpf(y.numerator) / y.denominator) / p
            dval = mpmath.mpf(delta.numerator) / delta.denominator
            m = max(0, int(mpmath.floor(mpmath.log(p / dval, 2))) - 1)
            while True:
                if p / mpmath.mpf(2) ** m < dval:
                    q = Fraction(int(mpmath.nint(ratio * 2**m)), 2**m)
                    if q != 0:
                        break
                m += 1
            if symbolic:
                out.append(SymbolicReal.coerce(q) * h ** (2 * i))
            else:
                out.append(NumericReal(+(p * (mpmath.mpf(q.numerator) / q.denominator)), bits))
    return out


def korner_independent(points: Sequence, h) -> str:
    """Independence status of ``{x_i} U {h * x_i}``."""
    L = list(points) + [h * x for x in points]
    return check_q_independence(L).status

