"""Rational independence of finite real sets and of word-balls in multiplicative groups."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath

from .numkit import (DEFAULT_PRECISION, IntegerRelation, NumericReal, SymbolicReal,
                     find_integer_relation)

INDEPENDENT_EXACT = "independent-exact"
DEPENDENT = "dependent"
NONE_FOUND = "none-found-within-bounds"


class Bounds(NamedTuple):
    max_coeff: int = 10**4
    precision_bits: int = DEFAULT_PRECISION


DEFAULT_BOUNDS = Bounds()


class TierError(TypeError):
    """Exact and numeric reals were mixed in a single call."""


class GroupCollisionError(ValueError):
    pass


@dataclass(frozen=True)
class IndependenceVerdict:
    status: str
    relation: IntegerRelation | None = None
    bounds: Bounds = DEFAULT_BOUNDS

    def __post_init__(self):
        if self.status not in (INDEPENDENT_EXACT, DEPENDENT, NONE_FOUND):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == DEPENDENT and self.relation is None:
            raise ValueError("a dependent verdict must carry its relation")

    @property
    def independent(self) -> bool:
        return self.status != DEPENDENT

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "relation": list(self.relation.coefficients) if self.relation else None,
            "residual": self.relation.residual if self.relation else None,
            "bounds": {"max_coeff": self.bounds.max_coeff,
                       "precision_bits": self.bounds.precision_bits},
        }


def tier_of(values: Sequence) -> str:
    """``"symbolic"`` or ``"numeric"``; plain ints and Fractions adopt the other tier."""
    has_sym = any(isinstance(v, SymbolicReal) for v in values)
    has_num = any(isinstance(v, (NumericReal, float)) for v in values)
    if has_sym and has_num:
        raise TierError("symbolic and numeric reals mixed in one call; evaluate symbols first")
    return "numeric" if has_num else "symbolic"


def rational_nullspace_vector(columns: Sequence[dict]) -> list[Fraction] | None:
    """A nonzero ``k`` with ``sum(k_i * columns[i]) == 0``, or ``None``.

    ``columns`` are sparse coordinate vectors keyed by basis element.
    """
    keys = sorted({key for col in columns for key in col}, key=repr)
    n = len(columns)
    rows = [[Fraction(col.get(key, 0)) for col in columns] for key in keys]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    f = free[0]
    k = [Fraction(0)] * n
    k[f] = Fraction(1)
    for i, pc in enumerate(pivots):
        k[pc] = -rows[i][f]
    return k


def _integer_relation(k: Sequence[Fraction]) -> tuple[int, ...]:
    lcm = 1
    for q in k:
        lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    ints = [int(q * lcm) for q in k]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    if next(v for v in ints if v) < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def check_q_independence(xs: Sequence, bounds: Bounds = DEFAULT_BOUNDS) -> IndependenceVerdict:
    """Decide (symbolic tier) or search (numeric tier) for a rational relation among ``xs``."""
    xs = list(xs)
    if not xs:
        raise ValueError("xs must be nonempty")
    tier = tier_of(xs)
    if tier == "symbolic":
        vals = [SymbolicReal.coerce(x) for x in xs]
        if any(v.is_zero() for v in vals):
            raise ValueError("xs must be nonzero")
        if len(set(vals)) != len(vals):
            raise ValueError("xs must be pairwise distinct")
        k = rational_nullspace_vector([v.coordinates() for v in vals])
        if k is None:
            return IndependenceVerdict(INDEPENDENT_EXACT, None, bounds)
        rel = _integer_relation(k)
        return IndependenceVerdict(DEPENDENT, IntegerRelation(rel, 0.0), bounds)

    vals = [NumericReal.of(x, bounds.precision_bits) if isinstance(x, float) else x for x in xs]
    rel = find_integer_relation(vals, bounds.max_coeff, bounds.precision_bits)
    if rel is None:
        return IndependenceVerdict(NONE_FOUND, None, bounds)
    return IndependenceVerdict(DEPENDENT, rel, bounds)


# -- group slices ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupSlice:
    """Ball of radius ``radius`` (word length ``sum|e_i|``) in the group generated by ``generators``."""

    generators: tuple
    radius: int
    elements: tuple[tuple[tuple[int, ...], object], ...] = field(repr=False)

    @property
    def values(self) -> list:
        return [v for _, v in self.elements]

    @property
    def words(self) -> list[tuple[int, ...]]:
        return [w for w, _ in self.elements]

    @property
    def tier(self) -> str:
        return tier_of(list(self.generators))

    def __len__(self) -> int:
        return len(self.elements)

    def to_json(self) -> str:
        rows = sorted(({"word": list(w), "value": value_text(v)} for w, v in self.elements),
                      key=lambda r: r["word"])
        return json.dumps(rows)


def value_text(v) -> str:
    if isinstance(v, SymbolicReal):
        return v.text()
    if isinstance(v, NumericReal):
        return v.text()
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(v)


def _words(m: int, radius: int):
    """All exponent vectors with ``sum|e_i| <= radius``, shortest first."""
    out = []
    for length in range(radius + 1):
        layer = [w for w in itertools.product(range(-length, length + 1), repeat=m)
                 if sum(abs(e) for e in w) == length]
        out.extend(sorted(layer))
    return out


def _positive(g) -> bool:
    if isinstance(g, NumericReal):
        return g.value > 0
    if isinstance(g, float):
        return g > 0
    s = SymbolicReal.coerce(g)
    st = s.single_term()
    # basis symbols stand for positive reals
    return st is not None and st[0] > 0


def expand_group(generators: Sequence, radius: int,
                 precision_bits: int = DEFAULT_PRECISION) -> GroupSlice:
    """Enumerate the word-ball, deduplicating group elements.

    Symbolic duplicates merge exactly (the shortest word is kept).  Numeric
    near-duplicates within relative ``2**(-precision_bits/2)`` raise
    :class:`GroupCollisionError`, since they signal an algebraic relation.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    gens = list(generators)
    if not gens:
        raise ValueError("at least one generator is required")
    for g in gens:
        if not _positive(g):
            raise ValueError(f"generator {value_text(g)} is not positive")
    tier = tier_of(gens)
    if tier == "symbolic":
        gens = [SymbolicReal.coerce(g) for g in gens]
        seen: dict[SymbolicReal, tuple[int, ...]] = {}
        elements = []
        for w in _words(len(gens), radius):
            v = SymbolicReal(1)
            for g, e in zip(gens, w):
                if e:
                    v = v * g ** e
            if v in seen:
                continue
            seen[v] = w
            elements.append((w, v))
        return GroupSlice(tuple(gens), radius, tuple(elements))

    gens = [g if isinstance(g, NumericReal) else NumericReal.of(g, precision_bits) for g in gens]
    bits = min(g.precision_bits for g in gens)
    elements = []
    for w in _words(len(gens), radius):
        v = NumericReal.of(1, bits)
        for g, e in zip(gens, w):
            if e:
                v = v * g ** e
        elements.append((w, v))
    with mpmath.workprec(bits):
        tol = mpmath.ldexp(1, -bits // 2)
        ordered = sorted(elements, key=lambda wv: wv[1].value)
        for (w1, v1), (w2, v2) in zip(ordered, ordered[1:]):
            if abs(v2.value - v1.value) <= tol * abs(v2.value):
                raise GroupCollisionError(
                    f"words {w1} and {w2} give numerically equal elements")
    return GroupSlice(tuple(gens), radius, tuple(elements))


def check_group_independence(slice_: GroupSlice, bounds: Bounds = DEFAULT_BOUNDS) -> IndependenceVerdict:
    """Additive independence of the slice elements (the polynomial criterion in additive form)."""
    if len(slice_) == 0:
        raise ValueError("slice is empty")
    return check_q_independence(slice_.values, bounds)
