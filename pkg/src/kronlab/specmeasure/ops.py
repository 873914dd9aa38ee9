"""Pushforwards, translations, symmetrization, mixtures, restriction and the Fourier transform."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..numkit import NumericReal, SymbolicReal, evaluate_to_float
from ..qindep import TierError
from .measure import NUMERIC, SYMBOLIC, Measure

MIX_TOL = 1e-12


def _exact_scalar(s):
    if isinstance(s, SymbolicReal):
        return s
    if isinstance(s, (int, Fraction)) and not isinstance(s, bool):
        return SymbolicReal(s)
    return None


def to_numeric(m: Measure) -> Measure:
    """Numeric copy of a measure whose symbolic positions are all rational."""
    if m.tier == NUMERIC:
        return m
    if m.symbols():
        raise TierError("measure has transcendental symbols; evaluate it with an assignment first")
    return m.evaluate()


def _align(m: Measure, scalar):
    """Return ``(measure, scalar)`` in a common tier."""
    exact = _exact_scalar(scalar)
    if m.tier == SYMBOLIC and exact is not None:
        return m, exact
    if exact is not None:
        return m, float(exact.as_fraction()) if exact.is_rational else _tier_fail(exact)
    return to_numeric(m), float(scalar)


def _tier_fail(x):
    raise TierError(f"symbolic scalar {x.text()} applied to a numeric measure")


def _density_scalar(s):
    if isinstance(s, SymbolicReal):
        if not s.is_rational:
            raise TierError("density pieces can only be scaled/translated by rational or numeric amounts")
        return s.rational_part
    return s


def scale_measure(m: Measure, s) -> Measure:
    """Image of ``m`` under ``x -> s*x``; mass is preserved."""
    if (isinstance(s, (int, float, Fraction)) and s == 0) or (
            isinstance(s, SymbolicReal) and s.is_zero()) or (
            isinstance(s, NumericReal) and s.value == 0):
        raise ValueError("scale must be nonzero")
    m, s = _align(m, s)
    atoms = [(s * p, w) for p, w in m.atoms]
    dens = []
    if m.density:
        sd = _density_scalar(s)
        for l, u, v in m.density:
            a, b = sd * l, sd * u
            dens.append((min(a, b), max(a, b), v / abs(sd)))
    return Measure.build(atoms, dens, m.tier)


def translate_measure(m: Measure, r) -> Measure:
    """Convolution with the point mass at ``r``."""
    m, r = _align(m, r)
    atoms = [(p + r, w) for p, w in m.atoms]
    dens = []
    if m.density:
        rd = _density_scalar(r)
        dens = [(l + rd, u + rd, v) for l, u, v in m.density]
    return Measure.build(atoms, dens, m.tier)


def superpose(measures: Sequence[Measure], coefficients: Sequence) -> Measure:
    tiers = {m.tier for m in measures}
    if tiers == {SYMBOLIC, NUMERIC}:
        measures = [to_numeric(m) for m in measures]
    tier = measures[0].tier if measures else SYMBOLIC
    atoms = []
    dens = []
    for m, c in zip(measures, coefficients):
        atoms += [(p, w * c) for p, w in m.atoms]
        dens += [(l, u, v * c) for l, u, v in m.density]
    return Measure.build(atoms, dens, tier)


def symmetrize(m: Measure) -> Measure:
    """``m + (x -> -x)_* m``; an atom at 0 doubles."""
    return superpose([m, scale_measure(m, -1)], [1, 1])


def mix(measures: Sequence[Measure], weights: Sequence) -> Measure:
    """Convex combination; coinciding atoms merge by adding weights."""
    if len(measures) != len(weights) or not measures:
        raise ValueError("measures and weights must be nonempty and of equal length")
    if any(not w > 0 for w in weights):
        raise ValueError("mixture weights must be positive")
    total = sum(weights)
    if abs(float(total) - 1.0) > MIX_TOL:
        raise ValueError(f"mixture weights sum to {total}, not 1")
    return superpose(measures, weights)


def _position_float(p, assignment):
    return evaluate_to_float(p, assignment)


def mass_in(m: Measure, a, b, assignment: Mapping | None = None):
    fa, fb = float(a), float(b)
    mass = 0
    for p, w in m.atoms:
        x = _position_float(p, assignment)
        if fa <= x <= fb:
            mass += w
    for l, u, v in m.density:
        lo, hi = max(l, _same_kind(a, l)), min(u, _same_kind(b, u))
        if hi > lo:
            mass += (hi - lo) * v
    return mass


def _same_kind(x, like):
    if isinstance(like, Fraction) and isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x) if isinstance(like, float) else x


def restrict(m: Measure, a, b, assignment: Mapping | None = None) -> Measure:
    """Conditional probability ``m(. | [a, b])``."""
    if not a < b:
        raise ValueError("restriction interval needs a < b")
    total = mass_in(m, a, b, assignment)
    if not total > 0:
        raise ValueError("measure gives zero mass to the interval; conditioning undefined")
    fa, fb = float(a), float(b)
    atoms = [(p, w / total) for p, w in m.atoms
             if fa <= _position_float(p, assignment) <= fb]
    dens = []
    for l, u, v in m.density:
        lo, hi = max(l, _same_kind(a, l)), min(u, _same_kind(b, u))
        if hi > lo:
            dens.append((lo, hi, v / total))
    return Measure.build(atoms, dens, m.tier)


def bochner(m: Measure, t, assignment: Mapping | None = None) -> complex:
    """Fourier transform ``integral exp(2 pi i t x) dm(x)`` in closed form."""
    t = float(t)
    total = 0j
    for p, w in m.atoms:
        x = _position_float(p, assignment)
        total += float(w) * cmath.exp(2j * math.pi * t * x)
    for l, u, v in m.density:
        l, u, v = float(l), float(u), float(v)
        if t == 0:
            total += v * (u - l)
        else:
            # e^{2 pi i t u} - e^{2 pi i t l} over 2 pi i t, written without cancellation
            total += v * cmath.exp(1j * math.pi * t * (u + l)) * math.sin(math.pi * t * (u - l)) / (math.pi * t)
    return total


# -- weak-topology metric ------------------------------------------------------


def calkin_wilf(count: int) -> list[Fraction]:
    """First ``count`` positive rationals in Calkin-Wilf order: 1, 1/2, 2, 1/3, 3/2, ..."""
    out = []
    q = Fraction(1)
    for _ in range(count):
        out.append(q)
        q = 1 / (2 * math.floor(q) - q + 1)
    return out


@dataclass(frozen=True)
class MetricConfig:
    """Truncation of the series metric on ``P([a, b])``.

    Test functions: ``f_1 = 1``, ``f_{2k} = cos(2 pi q_k x)``,
    ``f_{2k+1} = sin(2 pi q_k x)`` with ``q_k`` the Calkin-Wilf enumeration.
    """

    a: float
    b: float
    depth: int = 64
    family: str = "trig-calkin-wilf"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not self.a < self.b:
            raise ValueError("interval needs a < b")

    def frequencies(self) -> list[Fraction]:
        return calkin_wilf(self.depth // 2 + 1)


def _check_support(m: Measure, cfg: MetricConfig, assignment):
    for p, _ in m.atoms:
        x = _position_float(p, assignment)
        if not cfg.a <= x <= cfg.b:
            raise ValueError(f"atom at {x} outside [{cfg.a}, {cfg.b}]")
    for l, u, _ in m.density:
        if float(l) < cfg.a or float(u) > cfg.b:
            raise ValueError(f"density piece [{l}, {u}) outside [{cfg.a}, {cfg.b}]")


def moment_vector(m: Measure, cfg: MetricConfig, assignment=None) -> list[float]:
    """``[integral f_n dm for n = 1..depth]``."""
    qs = cfg.frequencies()
    out = []
    for n in range(1, cfg.depth + 1):
        if n == 1:
            out.append(float(m.total_mass))
            continue
        k, odd = divmod(n, 2)
        z = bochner(m, qs[k - 1], assignment)
        out.append(z.imag if odd else z.real)
    return out


def weak_distance(sigma: Measure, eta: Measure, cfg: MetricConfig,
                  assignment: Mapping | None = None) -> float:
    _check_support(sigma, cfg, assignment)
    _check_support(eta, cfg, assignment)
    ia = moment_vector(sigma, cfg, assignment)
    ib = moment_vector(eta, cfg, assignment)
    total = 0.0
    for n, (x, y) in enumerate(zip(ia, ib), start=1):
        diff = abs(x - y)
        total += diff / (1 + diff) / 2**n
    return total
