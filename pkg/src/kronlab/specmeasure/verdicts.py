"""Mutual singularity, absolute continuity, equivalence and self-similarity scales."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from ..numkit import SymbolicReal
from .measure import EPS_POS, SYMBOLIC, Measure
from .ops import scale_measure, to_numeric

SINGULAR = "singular"
COMMON_MASS = "common-mass"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SingularityVerdict:
    status: str
    shared_atoms: tuple = ()  # (position, weight in sigma, weight in eta)
    shared_intervals: tuple = ()  # (l, u) where both densities are positive
    near_pairs: tuple = field(default=(), repr=False)

    @property
    def singular(self) -> bool:
        return self.status == SINGULAR


def common_tier(a: Measure, b: Measure) -> tuple[Measure, Measure]:
    if a.tier == b.tier:
        return a, b
    return to_numeric(a), to_numeric(b)


def match_atoms(a: Measure, b: Measure, tol: float = EPS_POS):
    """Pair up atoms of ``a`` and ``b``.

    Returns ``(exact, near)``: lists of index pairs at identical positions and
    of pairs within ``tol`` that are not identical (numeric tier only).
    """
    a, b = common_tier(a, b)
    exact, near = [], []
    if a.tier == SYMBOLIC:
        index = {p: j for j, (p, _) in enumerate(b.atoms)}
        for i, (p, _) in enumerate(a.atoms):
            if p in index:
                exact.append((i, index[p]))
        return exact, near
    bpos = [p for p, _ in b.atoms]
    for i, (p, _) in enumerate(a.atoms):
        lo = bisect.bisect_left(bpos, p - tol)
        hi = bisect.bisect_right(bpos, p + tol)
        for j in range(lo, hi):
            (exact if bpos[j] == p else near).append((i, j))
    return exact, near


def _positive_overlaps(a: Measure, b: Measure) -> list[tuple]:
    out = []
    for l1, u1, _ in a.density:
        for l2, u2, _ in b.density:
            lo, hi = max(l1, l2), min(u1, u2)
            if hi > lo:
                out.append((lo, hi))
    return out


def singularity_test(sigma: Measure, eta: Measure) -> SingularityVerdict:
    """Decide ``sigma`` vs ``eta`` mutual singularity for atom + density measures.

    Atoms never charge a density and vice versa, so only atom/atom and
    density/density overlaps matter.  Numeric atoms within ``EPS_POS`` that are
    not identical make the verdict inconclusive rather than silently merged.
    """
    sigma, eta = common_tier(sigma, eta)
    exact, near = match_atoms(sigma, eta)
    shared = tuple((sigma.atoms[i][0], sigma.atoms[i][1], eta.atoms[j][1]) for i, j in exact)
    intervals = tuple(_positive_overlaps(sigma, eta))
    near_t = tuple((sigma.atoms[i][0], eta.atoms[j][0]) for i, j in near)
    if shared or intervals:
        return SingularityVerdict(COMMON_MASS, shared, intervals, near_t)
    if near_t:
        return SingularityVerdict(INCONCLUSIVE, (), (), near_t)
    return SingularityVerdict(SINGULAR)


def _covered(pieces, l, u) -> bool:
    """Is ``[l, u)`` covered by the union of disjoint sorted ``pieces``?"""
    cursor = l
    for pl, pu, _ in pieces:
        if pu <= cursor:
            continue
        if pl > cursor:
            return False
        cursor = pu
        if cursor >= u:
            return True
    return cursor >= u


def abs_continuity_test(sigma: Measure, eta: Measure) -> bool:
    """``sigma << eta`` for the atom + piecewise-density representation."""
    sigma, eta = common_tier(sigma, eta)
    exact, near = match_atoms(sigma, eta)
    matched = {i for i, _ in exact} | {i for i, _ in near}
    if len(matched) != len(sigma.atoms):
        return False
    return all(_covered(eta.density, l, u) for l, u, _ in sigma.density)


def equivalence_test(sigma: Measure, eta: Measure) -> bool:
    return abs_continuity_test(sigma, eta) and abs_continuity_test(eta, sigma)


def _ratio(num, den):
    if isinstance(num, SymbolicReal):
        return num.divide_exact(den) if not den.is_invertible else num / den
    return num / den


def self_similarity_scales(sigma: Measure) -> list:
    """All ``s`` with ``sigma_s`` equivalent to ``sigma`` among the ratios of atom positions.

    For a finite support every such ``s`` permutes the support, so only
    ``s = +1`` and possibly ``s = -1`` can occur; the enumeration still tests
    every ratio ``x_j / x_i``.
    """
    if not sigma.is_atomic:
        raise ValueError("self-similarity scales are computed for atomic measures")
    if not sigma.atoms:
        raise ValueError("measure has no atoms")
    pos = sigma.positions
    if sigma.tier == SYMBOLIC:
        if any(p.is_zero() for p in pos):
            raise ValueError("atom at 0 has no defined scaling orbit")
        found: list = []
        for i, xi in enumerate(pos):
            products = {xm * xi for xm in pos}
            for xj in pos:
                # s = xj/xi is a symmetry iff xj*xk is in xi*support for every k
                if all(xj * xk in products for xk in pos):
                    s = _ratio(xj, xi)
                    if s is not None and s not in found:
                        found.append(s)
        return sorted(found, key=lambda s: float(s.rational_part) if s.is_rational else 0.0)

    if any(p == 0 for p in pos):
        raise ValueError("atom at 0 has no defined scaling orbit")
    found_f: list[float] = []
    for xi in pos:
        for xj in pos:
            s = xj / xi
            if any(abs(s - f) <= 1e-12 * max(1.0, abs(f)) for f in found_f):
                continue
            if equivalence_test(scale_measure(sigma, s), sigma) if _no_collision(sigma, s) else False:
                found_f.append(s)
    return sorted(found_f)


def _no_collision(sigma: Measure, s: float) -> bool:
    try:
        scale_measure(sigma, s)
    except ValueError:
        return False
    return True
