"""Empirical Kronecker-property checks and the weak-convergence defect checker."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..numkit import NumericReal, find_integer_relation, to_fraction
from ..specmeasure import Measure, bochner
from .approx import LATTICE, chord_of_dist, frac_dist, solve_kronecker_approx
from .types import UnimodularTarget, WeakTarget


@dataclass
class KroneckerReport:
    trials: int
    successes: int
    max_residual: float | None  # over successes
    failures: list = field(default_factory=list)  # (phases, best residual)
    relation: tuple | None = None
    witnesses: list = field(default_factory=list)

    @property
    def success_fraction(self) -> float:
        return self.successes / self.trials if self.trials else 1.0

    def to_dict(self) -> dict:
        return {"trials": self.trials, "successes": self.successes,
                "success_fraction": self.success_fraction, "max_residual": self.max_residual,
                "failures": [{"phases": [float(p) for p in ph], "best_residual": r,
                              "lower_bound": lb} for ph, r, lb in self.failures],
                "relation": list(self.relation) if self.relation else None}


def obstruction_bound(relation: Sequence[int], phases: Sequence) -> float:
    """Chord lower bound on ``max_j`` residual forced by ``sum k_j x_j = 0``.

    ``sum k_j (t x_j - phase_j) = -sum k_j phase_j`` mod 1, so some coordinate is
    at distance at least ``||sum k_j phase_j|| / sum|k_j|`` from its target.
    """
    s = sum(k * to_fraction(p) for k, p in zip(relation, phases))
    return chord_of_dist(frac_dist(s) / sum(abs(k) for k in relation))


def verify_kronecker_property(sigma: Measure, trials: int, eps: float, budget: int | None = None,
                              seed: int = 0, method: str = LATTICE, t_min=1,
                              max_coeff: int = 10**4, assignment=None,
                              grid_budget: int = 10**7) -> KroneckerReport:
    """Solve the approximation problem for ``trials`` uniformly random phase vectors.

    When the points carry an integer relation whose forced residual already
    reaches ``eps``, the trial is recorded as a failure without searching.
    """
    if not sigma.is_atomic or not sigma.atoms:
        raise ValueError("a finite atomic measure is required")
    points = [to_fraction(p) for p, _ in sigma.float_atoms(assignment)] if sigma.symbols() \
        else [to_fraction(p) for p in sigma.positions]
    rel = None
    if len(points) > 1:
        nonzero = [NumericReal.of(p) for p in points]
        found = find_integer_relation(nonzero, max_coeff, 128)
        rel = found.coefficients if found else None
    rng = np.random.default_rng(seed)
    report = KroneckerReport(trials, 0, None, relation=rel)
    for _ in range(trials):
        phases = [Fraction(int(v), 1 << 53) for v in rng.integers(0, 1 << 53, len(points))]
        lb = obstruction_bound(rel, phases) if rel else None
        if lb is not None and lb >= eps:
            report.failures.append((phases, None, lb))
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            w = solve_kronecker_approx(UnimodularTarget.of(points, phases), eps, t_min,
                                       method, budget, grid_budget)
        report.witnesses.append(w)
        if w.found:
            report.successes += 1
            report.max_residual = max(report.max_residual or 0.0, w.max_residual)
        else:
            report.failures.append((phases, w.max_residual, lb))
    return report


# -- weak convergence ------------------------------------------------------------------

CONVERGES = "converges"
NOT_YET = "not-below-tol"
CANNOT = "cannot-converge"


@dataclass
class WeakReport:
    defects: list  # defects[j][n] = sup over test frequencies at ts[n]
    status: list  # per scale
    lower_bounds: list  # per scale, atomic obstruction or None
    fitted_rate: list  # per scale, least-squares C in defect ~ C / t over the tail

    def to_dict(self) -> dict:
        return {"defects": self.defects, "status": self.status,
                "lower_bounds": self.lower_bounds, "fitted_rate": self.fitted_rate}


def pairing(mu: Measure, s: float, t: float, g: WeakTarget, u: float, assignment=None) -> complex:
    """``<xi_{s t} - g, xi_u>`` in ``L^2(mu)``, reduced to values of the transform."""
    val = bochner(mu, s * t - u, assignment)
    if g.c1:
        val -= g.c1 * bochner(mu, -u, assignment)
    if g.c2:
        val -= g.c2 * bochner(mu, g.u - u, assignment)
    return val


def atomic_obstruction(mu: Measure, g: WeakTarget, assignment=None) -> float | None:
    """Lower bound ``max_x (1 - |g(x)|)`` over atoms, from pairing with normalized atom indicators.

    On an atom ``|xi_t| = 1``, so ``|xi_t(x) - g(x)| >= 1 - |g(x)|`` for every ``t``.
    """
    if not mu.atoms:
        return None
    return max(1 - abs(g(x)) for x, _ in mu.float_atoms(assignment))


def weak_convergence_check(mu: Measure, scales: Sequence, targets: Sequence[WeakTarget],
                           ts: Sequence, test_freqs: Sequence, tol: float,
                           tail: float = 0.5, assignment=None) -> WeakReport:
    """Track ``sup_u |<xi_{s_j t} - g_j, xi_u>|`` along ``ts`` for each ``j``.

    A scale converges when every defect in the final ``tail`` fraction of ``ts``
    is below ``tol``.  Atoms force ``|xi_t - g| >= 1 - |g|`` pointwise, reported
    as ``cannot-converge`` when that bound exceeds ``tol``.
    """
    if len(scales) != len(targets):
        raise ValueError("scales and targets must have equal length")
    ts = [float(t) for t in ts]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("ts must be increasing")
    defects, status, lower, rates = [], [], [], []
    start = min(len(ts) - 1, int(len(ts) * (1 - tail)))
    for s, g in zip(scales, targets):
        row = [max(abs(pairing(mu, float(s), t, g, float(u), assignment)) for u in test_freqs)
               for t in ts]
        defects.append(row)
        lb = atomic_obstruction(mu, g, assignment)
        lower.append(lb)
        # rate fitted on the tail, where the 1/t behaviour has set in
        inv = np.array([1 / t for t in ts[start:] if t != 0])
        vals = np.array([d for d, t in zip(row[start:], ts[start:]) if t != 0])
        rates.append(float(inv @ vals / (inv @ inv)) if len(inv) else math.nan)
        if lb is not None and lb > tol:
            status.append(CANNOT)
        elif all(d < tol for d in row[start:]):
            status.append(CONVERGES)
        else:
            status.append(NOT_YET)
    return WeakReport(defects, status, lower, rates)
