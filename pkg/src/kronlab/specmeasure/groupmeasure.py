"""Measures spread over a finitely generated multiplicative group with geometric weights."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..numkit import NumericReal, SymbolicReal, evaluate_to_float
from ..qindep import _words, tier_of, value_text
from .measure import NUMERIC, SYMBOLIC, Measure, position_text
from .ops import to_numeric

MEMBER = "member-of-±H"
COLLISIONS = "collision-count"


class GroupCollisionError(ValueError):
    def __init__(self, collisions):
        self.collisions = collisions
        lines = "; ".join(f"{w1}*{a1} = {w2}*{a2}" for w1, a1, w2, a2 in collisions[:10])
        super().__init__(f"truncated group measure has colliding atoms: {lines}")


@dataclass(frozen=True)
class GroupMeasure:
    """``sum_h a_h * nu_h`` over the ball of radius ``truncation_radius``, ``a_h = c * lam**|h|``."""

    generators: tuple
    base: Measure
    lam: Fraction = Fraction(1, 2)
    c: Fraction = Fraction(1)
    truncation_radius: int = 3

    def __post_init__(self):
        if not 0 < self.lam < 1:
            raise ValueError("lam must lie in (0, 1) so the weights are summable")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.truncation_radius < 0:
            raise ValueError("truncation radius must be >= 0")
        if not self.base.is_atomic or not self.base.atoms:
            raise ValueError("base must be a nonempty atomic measure")
        if not self.generators:
            raise ValueError("at least one generator is required")

    @property
    def tier(self) -> str:
        return tier_of(list(self.generators))

    def words(self, radius: int | None = None) -> list[tuple[int, ...]]:
        return _words(len(self.generators), self.truncation_radius if radius is None else radius)

    def element(self, word):
        gens = self.generators
        if self.tier == SYMBOLIC:
            v = SymbolicReal(1)
            for g, e in zip(gens, word):
                if e:
                    v = v * SymbolicReal.coerce(g) ** e
            return v
        v = 1.0
        for g, e in zip(gens, word):
            v *= float(g) ** e
        return v

    def weight(self, word) -> Fraction:
        return self.c * self.lam ** sum(abs(e) for e in word)


def realize(gm: GroupMeasure, radius: int | None = None) -> Measure:
    """Atomic measure of the truncation, weights renormalized to total mass 1."""
    symbolic = gm.tier == SYMBOLIC
    base = gm.base if symbolic or gm.base.tier == NUMERIC else to_numeric(gm.base)
    if symbolic and base.tier != SYMBOLIC:
        raise ValueError("symbolic generators need a symbolic base measure")
    atoms: dict = {}
    origin: dict = {}
    collisions = []
    for word in gm.words(radius):
        h = gm.element(word)
        a = gm.weight(word)
        for y, w in base.atoms:
            pos = h * y
            if pos in origin:
                collisions.append((word, position_text(y)) + origin[pos])
                continue
            origin[pos] = (word, position_text(y))
            atoms[pos] = a * w
    if not symbolic:
        ordered = sorted(origin.items())
        for (p1, o1), (p2, o2) in zip(ordered, ordered[1:]):
            if p2 - p1 <= 1e-9 * max(1.0, abs(p2)):
                collisions.append(o2 + o1)
    if collisions:
        raise GroupCollisionError(collisions)
    total = sum(atoms.values())
    return Measure.build([(p, w / total) for p, w in atoms.items()], (), base.tier)


@dataclass(frozen=True)
class StructuralVerdict:
    kind: str
    word: tuple | None = None
    sign: int = 1
    collision_count: int | None = None
    radius: int = 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "word": list(self.word) if self.word else self.word,
                "sign": self.sign, "collision_count": self.collision_count, "radius": self.radius}


def _is_zero(s) -> bool:
    if isinstance(s, SymbolicReal):
        return s.is_zero()
    return float(s) == 0


def _as_scale(s, tier):
    if tier == SYMBOLIC and not isinstance(s, (float, NumericReal)):
        return SymbolicReal.coerce(s)
    return float(s)


def group_word_of(gm: GroupMeasure, s, radius: int | None = None):
    """``(word, sign)`` with ``s == sign * h(word)`` inside the ball, or ``None``."""
    s = _as_scale(s, gm.tier)
    for word in gm.words(radius):
        h = gm.element(word)
        for sign in (1, -1):
            target = h if sign == 1 else -h
            if isinstance(s, SymbolicReal) and isinstance(target, SymbolicReal):
                if s == target:
                    return word, sign
            elif isinstance(target, SymbolicReal):
                continue
            elif abs(s - target) <= 1e-12 * max(1.0, abs(target)):
                return word, sign
    return None


def structural_self_similarity(gm: GroupMeasure, s, assignment: Mapping | None = None) -> StructuralVerdict:
    """Decide whether scaling by ``s`` permutes the group index set.

    When ``s`` is not (up to sign) a word in the ball, the truncation is
    realized and the number of atoms of ``sigma_s`` landing on atoms of
    ``sigma`` is reported.  A numeric ``s`` against a symbolic measure is
    compared after evaluating the measure at ``assignment``.
    """
    if _is_zero(s):
        raise ValueError("scale must be nonzero")
    R = gm.truncation_radius
    hit = group_word_of(gm, s)
    if hit is not None:
        return StructuralVerdict(MEMBER, hit[0], hit[1], None, R)
    sigma = realize(gm)
    scale = _as_scale(s, gm.tier)
    if isinstance(scale, SymbolicReal):
        support = set(sigma.positions)
        count = sum(1 for p in sigma.positions if scale * p in support)
    else:
        pts = sorted(p for p, _ in sigma.float_atoms(assignment))
        count = _overlap_count(pts, scale)
    return StructuralVerdict(COLLISIONS, None, 1, count, R)


def _overlap_count(pts: list[float], s: float, rel_tol: float = 1e-9) -> int:
    count = 0
    for x in pts:
        y = s * x
        tol = rel_tol * max(1.0, abs(y))
        i = bisect.bisect_left(pts, y - tol)
        if i < len(pts) and pts[i] <= y + tol:
            count += 1
    return count


def support_overlap(sigma: Measure, s, assignment: Mapping | None = None,
                    rel_tol: float = 1e-9) -> Fraction:
    """Fraction of atoms ``x`` of ``sigma`` with ``s*x`` (numerically) an atom of ``sigma``.

    Purely numeric: symbolic positions are evaluated at ``assignment`` first.
    """
    if not sigma.atoms:
        raise ValueError("measure has no atoms")
    pts = sorted(p for p, _ in sigma.float_atoms(assignment))
    scale = evaluate_to_float(s, assignment) if isinstance(s, SymbolicReal) else float(s)
    return Fraction(_overlap_count(pts, scale, rel_tol), len(pts))


def describe(gm: GroupMeasure) -> dict:
    return {
        "generators": [value_text(g) for g in gm.generators],
        "base": [[position_text(p), str(w)] for p, w in gm.base.atoms],
        "lambda": str(gm.lam),
        "c": str(gm.c),
        "radius": gm.truncation_radius,
    }
