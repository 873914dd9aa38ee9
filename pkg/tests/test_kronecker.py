import itertools
import math
import warnings
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronlab.numkit import NumericReal, SymbolicReal, evaluate_expression
from kronlab.qindep import INDEPENDENT_EXACT, check_q_independence, expand_group
from kronlab.kronecker import (CANNOT, CONVERGES, GRID, LATTICE, NOT_FOUND, SYMBOLIC_CERT,
                               UnimodularTarget, WeakTarget, atomic_obstruction,
                               build_kronecker_points, grid_best, grid_search, korner_independent,
                               korner_points, obstruction_bound, pairing, residuals,
                               rigidity_witness, solve_kronecker_approx, verify_construction,
                               verify_kronecker_property, weak_convergence_check)
from kronlab.specmeasure import atomic, uniform

SQRT2 = evaluate_expression("sqrt(2)")
tau = SymbolicReal.symbol("tau")


def chord_float(t: float, x: float, phase: float) -> float:
    return abs(2 * math.sin(math.pi * (t * x - phase - round(t * x - phase))))


def sqrt2_convergent_denominators(limit: int):
    """Denominators of the continued-fraction convergents of sqrt(2), by integer recurrence."""
    q0, q1 = 1, 2
    out = [q0, q1]
    while q1 < limit:
        q0, q1 = q1, 2 * q1 + q0
        out.append(q1)
    return out


def recompute_high(points_text, phases, t, bits=256):
    with mpmath.workprec(bits):
        tt = mpmath.mpf(F(t).numerator) / F(t).denominator
        out = []
        for text, p in zip(points_text, phases):
            x = evaluate_expression(text, bits).value
            z = mpmath.expjpi(2 * tt * x) - mpmath.expjpi(2 * mpmath.mpf(F(p).numerator) / F(p).denominator)
            out.append(float(abs(z)))
        return out


# -- examples --------------------------------------------------------------------------


def test_first_integer_witness_for_half_phase():
    # oracle: scan integers; t = 6 is the first feasible integer
    first = next(t for t in range(1, 101)
                 if max(chord_float(t, 1, 0), chord_float(t, math.sqrt(2), 0.5)) < 0.1)
    assert first == 6
    oracle_res = 2 * math.sin(math.pi * abs((6 * math.sqrt(2)) % 1 - 0.5))
    assert abs(oracle_res - 0.0925) < 1e-4
    for method in (GRID, LATTICE):
        w = solve_kronecker_approx(UnimodularTarget.of([1, SQRT2], [0, F(1, 2)]), 0.1,
                                   method=method)
        # same feasible component as t = 6, with a smaller residual there
        assert w.found and abs(w.t - first) < 0.05 and w.max_residual <= oracle_res


def test_dirichlet_convergent_bound():
    q = 29
    assert q in sqrt2_convergent_denominators(100)
    oracle_res = 2 * math.sin(math.pi * abs(q * math.sqrt(2) - round(q * math.sqrt(2))))
    assert abs(oracle_res - 0.0766) < 1e-4
    w = rigidity_witness(atomic([(1.0, 0.5), (math.sqrt(2), 0.5)]), 0.1)
    assert w.found and (w.t == 29 or w.max_residual <= oracle_res + 1e-6)


def test_rigidity_examples():
    w = rigidity_witness(atomic([(F(1, 2), 1)]), 0.1)
    assert w.t == 2 and w.max_residual == 0
    w = rigidity_witness(atomic([(F(1, 3), F(1, 2)), (F(1, 5), F(1, 2))]), 0.1)
    assert w.t == 15 and w.max_residual == 0


def test_exact_rational_targets():
    w = solve_kronecker_approx(UnimodularTarget.of([F(1, 2), F(1, 2) + 1], [F(1, 2), F(1, 2)]),
                               0.01)
    assert w.t == 1 and w.max_residual == 0


def test_budget_exhaustion_is_reported():
    target = UnimodularTarget.of([1, SQRT2, evaluate_expression("sqrt(3)")], [0.1, 0.7, 0.4])
    w = solve_kronecker_approx(target, 1e-4, method=GRID, budget=1000)
    assert w.status == NOT_FOUND and not w.found and w.max_residual >= 1e-4


def test_invalid_inputs():
    with pytest.raises(ValueError):
        UnimodularTarget.of([1, 1], [0, 0])
    with pytest.raises(ValueError):
        UnimodularTarget.of([1], [1.5])
    with pytest.raises(ValueError):
        solve_kronecker_approx(UnimodularTarget.of([1]), 0)


# -- properties ------------------------------------------------------------------------

POINT_TEXTS = ["1", "sqrt(2)", "sqrt(3)", "sqrt(5)", "pi", "e"]
phase = st.fractions(min_value=0, max_value=F(255, 256), max_denominator=256)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(POINT_TEXTS), min_size=2, max_size=3, unique=True), st.data(),
       st.sampled_from([0.05, 0.1, 0.2]))
def test_witness_soundness_at_doubled_precision(texts, data, eps):
    phases = data.draw(st.lists(phase, min_size=len(texts), max_size=len(texts)))
    pts = [evaluate_expression(t) for t in texts]
    w = solve_kronecker_approx(UnimodularTarget.of(pts, phases), eps)
    assert w.found and w.max_residual < eps and w.t >= 1
    again = recompute_high(texts, phases, w.t)
    assert all(abs(a - b) < 1e-10 for a, b in zip(again, w.residuals))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(POINT_TEXTS), min_size=2, max_size=3, unique=True), st.data())
def test_oracle_agreement(texts, data):
    eps = data.draw(st.sampled_from([0.05, 0.1]))
    phases = data.draw(st.lists(phase, min_size=len(texts), max_size=len(texts)))
    pts = [evaluate_expression(t) for t in texts]
    target = UnimodularTarget.of(pts, phases)
    w = solve_kronecker_approx(target, eps, method=LATTICE)
    xs, phis = target.exact()
    first = grid_search(xs, phis, eps, 1, t_max=F(w.t))
    assert first.found, "grid oracle finds a feasible t up to the returned witness"
    assert w.max_residual <= first.max_residual
    if w.t < 200:
        best = grid_best(xs, phis, eps, 1, F(w.t) + 1)
        assert best.max_residual < eps


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=F(1, 8), max_value=8, max_denominator=97), min_size=1,
                max_size=4, unique=True),
       st.data(), st.fractions(min_value=F(1, 10), max_value=10, max_denominator=50),
       st.fractions(min_value=1, max_value=500, max_denominator=1000))
def test_scaling_equivariance(xs, data, c, t):
    phis = data.draw(st.lists(phase, min_size=len(xs), max_size=len(xs)))
    assert residuals([c * x for x in xs], phis, t / c) == residuals(xs, phis, t)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sampled_from(POINT_TEXTS), min_size=2, max_size=3, unique=True), st.data())
def test_monotone_in_eps(texts, data):
    phases = data.draw(st.lists(phase, min_size=len(texts), max_size=len(texts)))
    target = UnimodularTarget.of([evaluate_expression(t) for t in texts], phases)
    budget = 20000
    for method in (GRID, LATTICE):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            found = [solve_kronecker_approx(target, e, method=method, budget=budget,
                                            grid_budget=budget).found
                     for e in (0.05, 0.1, 0.3, 0.8)]
        first = found.index(True) if True in found else len(found)
        assert all(found[first:])


def test_dirichlet_composition():
    pts = [1, SQRT2, evaluate_expression("sqrt(3)")]
    w = solve_kronecker_approx(UnimodularTarget.of(pts), 0.1)
    for k in range(1, 9):
        rk = residuals(pts, [0, 0, 0], F(w.t) * k)
        assert all(a <= k * b + 1e-12 for a, b in zip(rk, w.residuals))


def test_grid_first_feasible_at_or_after_t_min():
    xs, phis = [F(1), SQRT2.to_fraction()], [F(0), F(0)]
    a = grid_search(xs, phis, 0.1, 1)
    b = grid_search(xs, phis, 0.1, F(a.t) + 1)
    assert a.found and b.found and b.t >= a.t + 1


# -- constructions ---------------------------------------------------------------------


def test_symbolic_build_example():
    spec = build_kronecker_points([F(3, 10), F(6, 10)], F(1, 100), expand_group([1], 0), "symbolic")
    t1, t2 = (SymbolicReal.symbol(n) for n in sorted(spec.assignment))
    assert spec.points == (SymbolicReal(F(3, 10)) + t1 * F(1, 200),
                           SymbolicReal(F(6, 10)) + t2 * F(1, 200))
    assert spec.certificate == SYMBOLIC_CERT
    assert verify_construction(spec, [F(3, 10), F(6, 10)], F(1, 100)) == INDEPENDENT_EXACT


def test_single_point_over_tau():
    spec = build_kronecker_points([0.3], F(1, 10), expand_group([tau], 1))
    assert len(spec.points) == 1
    x = spec.points[0]
    assert check_q_independence([x, tau * x]).status == INDEPENDENT_EXACT


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3),
       st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=10), min_size=1,
                max_size=5),
       st.fractions(min_value=F(1, 1000), max_value=F(1, 2), max_denominator=1000))
def test_symbolic_build_is_independent(radius, ys, delta):
    spec = build_kronecker_points(ys, delta, expand_group([tau], radius), "symbolic")
    assert check_q_independence(spec.realized()).status == INDEPENDENT_EXACT


def test_numeric_build_over_pi():
    sl = expand_group([NumericReal.of("pi")], 1)
    spec = build_kronecker_points([0.3, 0.6], F(1, 100), sl, seed=3)
    assert spec.rounds <= 10
    # independent re-scan of the produced 6-element set
    assert find_none(spec.realized())
    for x, y in zip(spec.points, (0.3, 0.6)):
        assert abs(float(x.value) - y) < 0.01


def find_none(values, bound=3):
    """Exhaustive scan for a relation with coefficients in [-bound, bound]."""
    vals = [float(v.value) for v in values]
    for ks in itertools.product(range(-bound, bound + 1), repeat=len(vals)):
        if any(ks) and abs(sum(k * v for k, v in zip(ks, vals))) < 1e-9:
            return False
    return True


def test_korner_pi_window():
    (x,) = korner_points(NumericReal.of("pi"), [0.3], F(1, 100))
    with mpmath.workprec(200):
        expected = mpmath.pi ** 2 * 31 / 1024
    assert abs(x.value - expected) < mpmath.mpf(2) ** -120
    # pi^2 * 31/1024 = 0.2987868...
    assert abs(float(x.value) - 0.3) < 0.01 and abs(float(x.value) - 0.2987869) < 1e-7


def test_korner_exact_input_unchanged():
    (x,) = korner_points(NumericReal.of(2), [F(3, 2)], F(1, 100))
    assert x.to_fraction() == F(3, 2)


def test_korner_symbolic():
    pts = korner_points(tau, [0.3, 0.6], F(1, 100), {"tau": NumericReal.of("pi")})
    assert [set(p.terms) for p in pts] == [set((tau ** 2).terms), set((tau ** 4).terms)]
    assert korner_independent(pts, tau) == INDEPENDENT_EXACT


# -- verification ----------------------------------------------------------------------


def test_verify_single_atom():
    rep = verify_kronecker_property(atomic([(math.sqrt(2), 1.0)]), 10, 0.05)
    assert rep.success_fraction == 1 and rep.max_residual == 0


def test_verify_three_radicals():
    pts = [1.0, math.sqrt(2), math.sqrt(3)]
    rep = verify_kronecker_property(atomic([(x, 1 / 3) for x in pts]), 20, 0.05)
    assert rep.success_fraction == 1 and rep.max_residual < 0.05


def test_verify_dependent_points_fail_with_bound():
    rep = verify_kronecker_property(atomic([(1, F(1, 2)), (2, F(1, 2))]), 20, 0.05)
    assert rep.relation == (2, -1) and rep.successes < 20
    for phases, _, lb in rep.failures:
        if lb is not None:
            assert lb == obstruction_bound((2, -1), phases)


# -- weak convergence ------------------------------------------------------------------


def test_character_target_zero_defect():
    g = WeakTarget.character(math.sqrt(2))
    ts = [math.sqrt(2) + n for n in range(1, 11)]
    rep = weak_convergence_check(atomic([(1.0, 1.0)]), [1.0], [g], ts, [0.0, 0.3, 0.7], 1e-9)
    assert max(rep.defects[0]) < 1e-9 and rep.status == [CONVERGES]


def test_uniform_density_defect_closed_form():
    mu, us = uniform(0, 1), [0.1, 0.25, 0.5]
    ts = list(range(1, 41))
    rep = weak_convergence_check(mu, [1.0], [WeakTarget.constant(0)], ts, us, 0.05)
    for t, d in zip(ts, rep.defects[0]):
        closed = max(abs(complex(math.cos(2 * math.pi * u), math.sin(2 * math.pi * u)) - 1)
                     / (2 * math.pi * abs(t - u)) for u in us)
        assert abs(d - closed) < 1e-12
    C = max(abs(complex(math.cos(2 * math.pi * u), math.sin(2 * math.pi * u)) - 1)
            / (2 * math.pi) for u in us)
    assert C / 2 <= rep.fitted_rate[0] <= 2 * C


def test_atomic_obstruction():
    mu = atomic([(1.0, 0.5), (math.sqrt(2), 0.5)])
    g = WeakTarget.constant(0.5)
    assert atomic_obstruction(mu, g) == 0.5
    rep = weak_convergence_check(mu, [1.0], [g], [1, 2, 3], [0.0], 0.1)
    assert rep.status == [CANNOT] and rep.lower_bounds[0] >= 1 - 0.5
    # the pairing itself stays away from zero on atoms, as the bound predicts
    assert abs(pairing(atomic([(1.0, 1.0)]), 1.0, 5.0, g, 1.0)) >= 0.5 - 1e-12


def test_weak_target_modulus_bound():
    with pytest.raises(ValueError):
        WeakTarget.affine(0.8, 0.5, 1.0)
