"""Find ``t`` with ``exp(2 pi i t x_j)`` close to ``exp(2 pi i phase_j)`` for every ``j``.

Two methods share one exact residual routine:

* ``grid`` scans ``t`` with step ``eps / (2 pi max|x|)``.  Each cell is screened
  in floating point with a slack that makes the screen sound, and cells that
  survive are decided exactly by a piecewise-linear minimax in rationals.  It is
  the brute-force oracle and returns the first feasible component.
* ``lattice`` anchors one coordinate exactly, ``t = (phase_a + M) / x_a``, which
  turns the problem into inhomogeneous simultaneous approximation of the ratios
  ``x_j / x_a``.  That is solved by nearest-plane rounding in LLL-reduced
  embedding lattices over a ladder of search lengths ``K = 2, 4, 8, ...``.
"""

from __future__ import annotations

import heapq
import itertools
import math
import warnings
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..numkit import NearestPlane, lll_reduce, to_fraction
from .types import FOUND, NOT_FOUND, ApproxWitness, UnimodularTarget

GRID = "grid"
LATTICE = "lattice"
DEFAULT_GRID_BUDGET = 10**8
DEFAULT_LATTICE_BUDGET = 10**4
DEFAULT_T_MIN = 1
CHUNK = 1 << 16
ORACLE_MAX_POINTS = 3


# -- exact residuals ---------------------------------------------------------------


def frac_dist(q: Fraction) -> Fraction:
    """Distance from ``q`` to the nearest integer."""
    r = q - math.floor(q)
    return min(r, 1 - r)


def chord_of_dist(d) -> float:
    """``|exp(2 pi i d) - 1|``."""
    return 2.0 * abs(math.sin(math.pi * float(d)))


def residuals(points: Sequence, phases: Sequence, t) -> list[float]:
    """Chord residuals ``|exp(2 pi i t x_j) - exp(2 pi i phase_j)|`` computed from exact values."""
    t = to_fraction(t)
    return [chord_of_dist(frac_dist(t * to_fraction(x) - to_fraction(p)))
            for x, p in zip(points, phases)]


def dist_bound(eps: float) -> float:
    """Largest phase distance whose chord is below ``eps``."""
    return math.asin(eps / 2) / math.pi if eps < 2 else 0.5


def _witness(xs, phis, t, method, bound, status=FOUND, attempts=0) -> ApproxWitness:
    res = tuple(residuals(xs, phis, t))
    return ApproxWitness(float(t), res, max(res), method, float(bound), status, attempts)


def _minimax(xs, phis, lo: Fraction, hi: Fraction, center: Fraction | None = None):
    """Minimize ``max_j |t x_j - phase_j - m_j|`` over ``[lo, hi]`` with ``m_j`` rounded at ``center``.

    The objective is convex and piecewise linear, so the minimum sits at an
    endpoint, a zero of one line, or a crossing of two lines.  The returned value
    bounds the true max distance from above.
    """
    c = (lo + hi) / 2 if center is None else center
    lines = [(x, p + round(c * x - p)) for x, p in zip(xs, phis)]
    cands = {lo, hi}
    for a, b in lines:
        cands.add(b / a)
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        if a1 != a2:
            cands.add((b1 - b2) / (a1 - a2))
        if a1 != -a2:
            cands.add((b1 + b2) / (a1 + a2))
    best = None
    for t in cands:
        if lo <= t <= hi:
            v = max(abs(a * t - b) for a, b in lines)
            if best is None or (v, t) < best:
                best = (v, t)
    return best[1], best[0]


def _better(xs, phis, *ts):
    """The float-rounded candidate with the smallest true max residual (ties: smallest t)."""
    scored = []
    for t in ts:
        tf = Fraction(float(t))
        scored.append((max(residuals(xs, phis, tf)), tf))
    return min(scored)[1]


# -- grid oracle -----------------------------------------------------------------


class _GridScan:
    def __init__(self, xs, phis, eps):
        self.xs, self.phis, self.eps = xs, phis, eps
        self.xf = np.array([float(x) for x in xs])
        self.pf = np.array([float(p) for p in phis])
        self.d = dist_bound(eps)
        self.xmax = float(np.max(np.abs(self.xf)))
        self.h = Fraction(eps / (2 * math.pi * self.xmax))
        self.hf = float(self.h)
        self.slack = np.abs(self.xf) * self.hf

    def chunks(self, t_lo: Fraction, budget: int, t_hi: Fraction | None = None):
        """Yield ``(start index, t array, per-point distances)`` chunk by chunk."""
        done = 0
        total = budget
        if t_hi is not None:
            total = min(budget, int((t_hi - t_lo) / self.h) + 1)
        while done < total:
            n = min(CHUNK, total - done)
            idx = np.arange(done, done + n, dtype=np.float64)
            t = float(t_lo) + idx * self.hf
            ph = np.outer(t, self.xf) - self.pf
            dist = np.abs(ph - np.round(ph))
            yield done, t, dist
            done += n
        self.evaluated = total

    def screen(self, t, dist):
        margin = 1e-12 * (1 + np.abs(t) * self.xmax)
        return np.all(dist < self.d + self.slack + margin[:, None], axis=1)

    def cell(self, t_lo: Fraction, k: int) -> tuple[Fraction, Fraction]:
        lo = t_lo + k * self.h
        return lo, lo + self.h


def grid_search(xs, phis, eps: float, t_min=DEFAULT_T_MIN,
                budget: int = DEFAULT_GRID_BUDGET, t_max=None) -> ApproxWitness:
    """First feasible component at or after ``t_min``, polished to its minimax point."""
    t_lo = to_fraction(t_min)
    t_hi = None if t_max is None else to_fraction(t_max)
    scan = _GridScan(xs, phis, eps)
    best = (math.inf, float(t_lo))
    for start, t, dist in scan.chunks(t_lo, budget, t_hi):
        worst = dist.max(axis=1)
        i = int(np.argmin(worst))
        if worst[i] < best[0]:
            best = (float(worst[i]), float(t[i]))
        for i in np.flatnonzero(scan.screen(t, dist)):
            lo, hi = scan.cell(t_lo, start + int(i))
            tc, _ = _minimax(xs, phis, lo, hi)
            if max(residuals(xs, phis, tc)) >= eps:
                continue
            w = Fraction(2 * scan.d / scan.xmax)
            tw, _ = _minimax(xs, phis, max(t_lo, tc - w), tc + w, center=tc)
            tbest = _better(xs, phis, tc, tw)
            if tbest < t_lo:
                tbest = _better(xs, phis, tc)
            if max(residuals(xs, phis, tbest)) < eps:
                return _witness(xs, phis, tbest, GRID, max(hi, tbest), FOUND, start + int(i) + 1)
    bound = float(t_lo + scan.evaluated * scan.h)
    return _witness(xs, phis, Fraction(best[1]), GRID, bound, NOT_FOUND, scan.evaluated)


def grid_best(xs, phis, eps: float, t_lo, t_hi, keep: int = 8,
              budget: int = DEFAULT_GRID_BUDGET) -> ApproxWitness:
    """Best witness over ``[t_lo, t_hi]``: scan every grid point, polish the ``keep`` best cells."""
    t_lo, t_hi = to_fraction(t_lo), to_fraction(t_hi)
    scan = _GridScan(xs, phis, eps)
    heap: list = []
    for start, t, dist in scan.chunks(t_lo, budget, t_hi):
        worst = dist.max(axis=1)
        top = np.argsort(worst)[:keep]
        for i in top:
            item = (-float(worst[i]), start + int(i))
            if len(heap) < keep:
                heapq.heappush(heap, item)
            elif item > heap[0]:
                heapq.heapreplace(heap, item)
    cands = []
    for _, k in heap:
        lo, hi = scan.cell(t_lo, k)
        hi = min(hi, t_hi)
        cands.append(lo)
        if hi > lo:
            cands.append(_minimax(xs, phis, lo, hi)[0])
    tbest = _better(xs, phis, *cands)
    res = max(residuals(xs, phis, tbest))
    return _witness(xs, phis, tbest, GRID, t_hi, FOUND if res < eps else NOT_FOUND, scan.evaluated)


# -- lattice method ----------------------------------------------------------------

_BASIS_CACHE: dict = {}


def _ladder_basis(alphas: tuple, K: int):
    """Reduced embedding basis for ``k * alpha_j`` near integers with ``0 <= k <~ K``.

    Depends on ``K`` and the ratios only, never on ``eps`` or the phases, so the
    same basis serves every target on the same points.
    """
    key = (alphas, K)
    hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    m = len(alphas)
    d_k = K ** (-1.0 / m)  # Dirichlet scale for m simultaneous approximations
    P = math.ceil(2**20 * K / d_k)
    c = max(1, round(2 * P * d_k / K))
    rows = [[c] + [round(P * a) for a in alphas]]
    for j in range(m):
        row = [0] * (m + 1)
        row[j + 1] = P
        rows.append(row)
    reduced = lll_reduce(rows)
    short = sorted(reduced, key=lambda v: sum(a * a for a in v))[:4]
    entry = (NearestPlane(reduced), short, c, P)
    if len(_BASIS_CACHE) > 4096:
        _BASIS_CACHE.clear()
    _BASIS_CACHE[key] = entry
    return entry


def lattice_search(xs, phis, eps: float, t_min=DEFAULT_T_MIN,
                   budget: int = DEFAULT_LATTICE_BUDGET, max_log_k: int = 62) -> ApproxWitness:
    t_lo = to_fraction(t_min)
    # x -> -x, phase -> -phase leaves every residual unchanged
    sx = [abs(x) for x in xs]
    sp = [p if x > 0 else -p for x, p in zip(xs, phis)]
    a = max(range(len(sx)), key=lambda j: (sx[j], -j))
    others = [j for j in range(len(sx)) if j != a]
    alphas = tuple(sx[j] / sx[a] for j in others)
    M0 = math.ceil(t_lo * sx[a] - sp[a])
    base = sp[a] + M0
    gammas = [(base * al - sp[j]) % 1 for al, j in zip(alphas, others)]
    w = 1 / (4 * max(sx))

    seen: set[int] = set()
    attempts = 0
    best = None
    bound = t_lo
    for logk in range(1, max_log_k + 1):
        K = 1 << logk
        nearest, short, c, P = _ladder_basis(alphas, K)
        target = [round(c * K / 2)] + [round(-P * g) for g in gammas]
        v = nearest.closest(target)
        found = []
        for signs in itertools.product((-1, 0, 1), repeat=len(short)):
            vec = [vi + sum(s * b[i] for s, b in zip(signs, short)) for i, vi in enumerate(v)]
            k = vec[0] // c
            if k < 0 or k in seen:
                continue
            if attempts >= budget:
                break
            seen.add(k)
            attempts += 1
            t = (base + k) / sx[a]
            tw, _ = _minimax(xs, phis, max(t_lo, t - w), t + w, center=t)
            tb = _better(xs, phis, t, tw)
            if tb < t_lo:
                tb = _better(xs, phis, t)
            r = max(residuals(xs, phis, tb))
            if best is None or (r, tb) < best:
                best = (r, tb)
            if r < eps:
                found.append(tb)
        bound = max(bound, (base + K) / sx[a])
        if found:
            tf = min(found)
            return _witness(xs, phis, tf, LATTICE, max(bound, tf), FOUND, attempts)
        if attempts >= budget:
            break
    t_best = best[1] if best else t_lo
    return _witness(xs, phis, t_best, LATTICE, bound, NOT_FOUND, attempts)


# -- public entry points -----------------------------------------------------------


def _single_point(x: Fraction, p: Fraction, t_lo: Fraction, method: str) -> ApproxWitness:
    # t = (p + M) / x hits the target exactly; take the smallest such t >= t_lo, t > 0
    if x < 0:
        x, p = -x, -p
    M = math.ceil(t_lo * x - p)
    t = (p + M) / x
    if t <= 0:
        t += 1 / x
    return _witness([x], [p], t, method, t)


def solve_kronecker_approx(target: UnimodularTarget, eps: float, t_min=DEFAULT_T_MIN,
                           method: str = LATTICE, budget: int | None = None,
                           grid_budget: int = DEFAULT_GRID_BUDGET) -> ApproxWitness:
    """Witness ``t >= t_min`` with every chord residual below ``eps``.

    Never raises on failure: an exhausted budget gives a ``not-found(budget)``
    witness carrying the best ``t`` seen.  ``budget`` counts grid cells or lattice
    rounding attempts.  The lattice method falls back to a grid scan of
    ``grid_budget`` cells when it runs out of attempts, and for up to three points it is checked
    against the grid witness over the same range.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if method not in (GRID, LATTICE):
        raise ValueError(f"unknown method {method!r}")
    xs, phis = target.exact()
    if any(x == 0 for x in xs):
        raise ValueError("points must be nonzero")
    t_lo = to_fraction(t_min)
    if t_lo < 0:
        raise ValueError("t_min must be >= 0")
    if len(xs) == 1:
        return _single_point(xs[0], phis[0], t_lo, method)
    if method == GRID:
        return grid_search(xs, phis, eps, t_lo, budget or DEFAULT_GRID_BUDGET)

    lat = lattice_search(xs, phis, eps, t_lo, budget or DEFAULT_LATTICE_BUDGET)
    if not lat.found:
        warnings.warn("lattice search exhausted its budget; falling back to the grid",
                      RuntimeWarning, stacklevel=2)
        return grid_search(xs, phis, eps, t_lo, grid_budget)
    if len(xs) <= ORACLE_MAX_POINTS:
        oracle = grid_search(xs, phis, eps, t_lo, grid_budget, t_max=Fraction(lat.t))
        if oracle.found and oracle.max_residual < lat.max_residual:
            return oracle
    return lat


def rigidity_witness(measure, eps: float, t_min=DEFAULT_T_MIN, method: str = LATTICE,
                     budget: int | None = None, assignment=None) -> ApproxWitness:
    """Dirichlet case: all phases zero over the atom positions of ``measure``."""
    if not measure.is_atomic or not measure.atoms:
        raise ValueError("rigidity witnesses need a finite atomic measure")
    points = [p for p, _ in measure.float_atoms(assignment)] if measure.symbols() \
        else [to_fraction(p) for p in measure.positions]
    return solve_kronecker_approx(UnimodularTarget.of(points), eps, t_min, method, budget)
