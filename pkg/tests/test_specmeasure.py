import cmath
import math
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronlab.numkit import NumericReal, SymbolicReal
from kronlab.specmeasure import (COLLISIONS, COMMON_MASS, INCONCLUSIVE, MEMBER, SINGULAR,
                                 GroupCollisionError, GroupMeasure, Measure, MeasureParseError,
                                 MetricConfig, abs_continuity_test, atomic, bochner,
                                 equivalence_test, mix, moment_vector, realize, restrict,
                                 scale_measure, self_similarity_scales, singularity_test,
                                 structural_self_similarity, support_overlap, symmetrize,
                                 translate_measure, uniform, weak_distance)
from kronlab.specmeasure.io import (dumps_csv, dumps_json, dumps_text, loads_csv, loads_json,
                                    loads_text)

tau = SymbolicReal.symbol("tau")
SQRT2 = math.sqrt(2)


# -- pushforwards and mixtures -----------------------------------------------------------


def test_scale_examples():
    assert scale_measure(atomic([(2, F(1, 2)), (3, F(1, 2))]), -1) == \
        atomic([(-3, F(1, 2)), (-2, F(1, 2))])
    assert scale_measure(atomic([(1, 1)]), tau) == atomic([(tau, 1)])
    stretched = scale_measure(uniform(0, 1), 2)
    assert stretched.density == ((0, 2, F(1, 2)),) and stretched.total_mass == 1


def test_translate_examples():
    m = atomic([(1, 1)])
    assert translate_measure(m, 0) == m
    moved = translate_measure(atomic([(1.0, 1.0), (SQRT2, 1.0)]), -1.0)
    assert moved.approx_equal(atomic([(0.0, 1.0), (SQRT2 - 1, 1.0)]))
    assert translate_measure(uniform(0, 1), 3).density == ((3, 4, 1),)


def test_symmetrize_examples():
    assert symmetrize(atomic([(1, F(1, 2))])) == atomic([(-1, F(1, 2)), (1, F(1, 2))])
    assert symmetrize(atomic([(-1, 1), (1, 1)])) == atomic([(-1, 2), (1, 2)])
    sym = symmetrize(uniform(0, 1))
    assert sym.total_mass == 2
    assert sym.approx_equal(Measure.build((), [(-1, 0, 1), (0, 1, 1)]))


def test_mix_examples():
    a, b = atomic([(1, 1)]), atomic([(2, 1)])
    assert mix([a, b], [F(1, 2), F(1, 2)]) == atomic([(1, F(1, 2)), (2, F(1, 2))])
    assert mix([a, a], [F(1, 2), F(1, 2)]) == a
    sigma = atomic([(1.0, 1.0)])
    eta = mix([sigma, scale_measure(sigma, SQRT2)], [0.5, 0.5])
    assert eta.approx_equal(atomic([(1.0, 0.5), (SQRT2, 0.5)]))


def test_restrict_examples():
    assert restrict(atomic([(F(1, 2), F(2, 5)), (2, F(3, 5))]), 0, 1) == atomic([(F(1, 2), 1)])
    p = atomic([(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))])
    assert restrict(p, 0, 1) == p
    assert restrict(uniform(0, 2), 0, 1) == uniform(0, 1)


def test_bochner_examples():
    assert abs(bochner(atomic([(2, 1)]), F(1, 4)) - (-1)) < 1e-15
    assert abs(bochner(uniform(0, 1), 1)) < 1e-15
    assert bochner(uniform(0, 1), 0) == 1


# random measures -----------------------------------------------------------------------

q_pos = st.fractions(min_value=-4, max_value=4, max_denominator=8)
q_w = st.fractions(min_value=F(1, 16), max_value=2, max_denominator=16)


@st.composite
def exact_measures(draw, allow_density=True, min_atoms=0):
    atoms = draw(st.lists(st.tuples(q_pos, q_w), min_size=min_atoms, max_size=4,
                          unique_by=lambda t: t[0]))
    pieces = []
    if allow_density and draw(st.booleans()):
        cuts = sorted(draw(st.lists(q_pos, min_size=2, max_size=4, unique=True)))
        for l, u in zip(cuts, cuts[1:]):
            if draw(st.booleans()):
                pieces.append((l, u, draw(q_w)))
    if not atoms and not pieces:
        atoms = [(F(0), F(1))]
    return Measure.build(atoms, pieces)


# atoms within eps_pos of 0 would collide with their mirror images under symmetrization
float_pos = st.floats(-4, 4, allow_nan=False).filter(lambda x: x == 0 or abs(x) > 1e-6)


@st.composite
def float_measures(draw):
    xs = draw(st.lists(float_pos, min_size=1, max_size=4, unique=True))
    xs = [x for i, x in enumerate(sorted(xs)) if i == 0 or x - sorted(xs)[i - 1] > 1e-6]
    ws = draw(st.lists(st.floats(0.05, 2), min_size=len(xs), max_size=len(xs)))
    pieces = []
    if draw(st.booleans()):
        l = draw(st.floats(-3, 2))
        pieces.append((l, l + draw(st.floats(0.1, 1)), draw(st.floats(0.1, 2))))
    return Measure.build(list(zip(xs, ws)), pieces, "numeric")


T_GRID = [-10 + 20 * k / 99 for k in range(100)]


@settings(max_examples=50, deadline=None)
@given(float_measures(), st.floats(0.1, 3).flatmap(lambda a: st.sampled_from([a, -a])),
       st.floats(-3, 3))
def test_bochner_covariance(sigma, s, r):
    scaled = scale_measure(sigma, s)
    moved = translate_measure(sigma, r)
    for t in T_GRID:
        assert abs(bochner(scaled, t) - bochner(sigma, s * t)) < 1e-12
        assert abs(bochner(moved, t) - cmath.exp(2j * math.pi * r * t) * bochner(sigma, t)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(float_measures())
def test_symmetrized_transform_is_real(sigma):
    sym = symmetrize(sigma)
    assert all(abs(bochner(sym, t).imag) < 1e-12 for t in T_GRID)


@settings(max_examples=50, deadline=None)
@given(exact_measures())
def test_transform_bounded_by_mass(sigma):
    mass = float(sigma.total_mass)
    assert abs(bochner(sigma, 0) - mass) < 1e-12
    assert all(abs(bochner(sigma, t)) <= mass + 1e-12 for t in T_GRID)


@settings(max_examples=60, deadline=None)
@given(exact_measures(), st.fractions(min_value=F(1, 4), max_value=4, max_denominator=6),
       st.fractions(min_value=-3, max_value=3, max_denominator=6),
       st.fractions(min_value=-3, max_value=3, max_denominator=6),
       st.fractions(min_value=F(1, 4), max_value=4, max_denominator=6))
def test_pushforward_algebra(sigma, s, a, b, r):
    assert scale_measure(scale_measure(sigma, s), r) == scale_measure(sigma, s * r)
    assert translate_measure(translate_measure(sigma, a), b) == translate_measure(sigma, a + b)
    assert scale_measure(sigma, 1) == sigma
    assert scale_measure(sigma, s).total_mass == sigma.total_mass
    assert translate_measure(sigma, a).total_mass == sigma.total_mass
    assert symmetrize(sigma).total_mass == 2 * sigma.total_mass
    assert scale_measure(symmetrize(sigma), -1) == symmetrize(sigma)


# -- metric ----------------------------------------------------------------------------


def moments_by_hand(pairs, depth):
    """Direct sums of 1, cos and sin at Calkin-Wilf frequencies, computed without the library."""
    freqs, q = [], F(1)
    while len(freqs) < depth // 2 + 1:
        freqs.append(q)
        q = 1 / (2 * math.floor(q) - q + 1)
    out = [sum(w for _, w in pairs)]
    for n in range(2, depth + 1):
        k, odd = divmod(n, 2)
        f = math.sin if odd else math.cos
        out.append(sum(w * f(2 * math.pi * float(freqs[k - 1]) * x) for x, w in pairs))
    return out


def test_moment_vector_matches_direct_sum():
    pairs = [(0.25, 0.5), (0.75, 0.5)]
    cfg = MetricConfig(0, 1, 16)
    got = moment_vector(atomic(pairs), cfg)
    assert all(abs(a - b) < 1e-12 for a, b in zip(got, moments_by_hand(pairs, 16)))


def test_point_masses_distance_by_hand():
    # delta_0 vs delta_{1/2}, depth 2: only f_2 = cos(2 pi x) differs, by 2; term 2/3 / 4
    cfg = MetricConfig(0, 1, 2)
    assert abs(weak_distance(atomic([(0, 1)]), atomic([(F(1, 2), 1)]), cfg) - 1 / 6) < 1e-15


prob_on_unit = st.lists(st.tuples(st.fractions(0, 1, max_denominator=12), q_w), min_size=1,
                        max_size=4, unique_by=lambda t: t[0]).map(
    lambda ps: atomic([(x, w / sum(v for _, v in ps)) for x, w in ps]))


@settings(max_examples=200, deadline=None)
@given(prob_on_unit, prob_on_unit, prob_on_unit)
def test_metric_axioms(a, b, c):
    cfg = MetricConfig(0, 1, 32)
    dab, dba = weak_distance(a, b, cfg), weak_distance(b, a, cfg)
    assert weak_distance(a, a, cfg) == 0
    assert dab == dba
    assert dab <= weak_distance(a, c, cfg) + weak_distance(c, b, cfg) + 1e-15


def test_metric_rejects_outside_support():
    with pytest.raises(ValueError):
        weak_distance(atomic([(2, 1)]), atomic([(0, 1)]), MetricConfig(0, 1))


# -- verdicts --------------------------------------------------------------------------


def test_singularity_examples():
    a = atomic([(1.0, 1.0), (SQRT2, 1.0)])
    b = atomic([(2.0, 1.0), (2 * SQRT2, 1.0)])
    assert singularity_test(a, b).status == SINGULAR
    assert singularity_test(a, a).status == COMMON_MASS
    v = singularity_test(atomic([(1, 1), (2, 1)]), atomic([(2, 1), (3, 1)]))
    assert v.status == COMMON_MASS and [p for p, *_ in v.shared_atoms] == [2]


def test_near_collision_is_inconclusive():
    v = singularity_test(atomic([(1.0, 1.0)]), atomic([(1.0 + 1e-10, 1.0)]))
    assert v.status == INCONCLUSIVE and v.near_pairs


def test_abs_continuity_examples():
    eta = atomic([(1.0, 0.5), (SQRT2, 0.5)])
    assert abs_continuity_test(atomic([(SQRT2, 1.0)]), eta)
    assert abs_continuity_test(eta, eta)
    assert not abs_continuity_test(atomic([(1, 1)]), atomic([(2, 1)]))


def test_equivalence_examples():
    s = atomic([(1, 1), (3, 2)])
    assert equivalence_test(s, s.scaled_weights(2))
    assert not equivalence_test(atomic([(1, 1)]), atomic([(1, 1), (2, 1)]))
    sym = symmetrize(s)
    assert equivalence_test(sym, scale_measure(sym, -1))


def test_self_similarity_examples():
    one, minus = SymbolicReal(1), SymbolicReal(-1)
    assert self_similarity_scales(atomic([(1, 1), (2, 1), (4, 1)])) == [one]
    assert self_similarity_scales(atomic([(-1, 1), (1, 1)])) == [minus, one]
    assert self_similarity_scales(atomic([(1, 1), (-2, 1), (F(-1, 2), 1)])) == [one]
    assert self_similarity_scales(atomic([(-SQRT2, 1.0), (SQRT2, 2.0)])) == [-1.0, 1.0]


@settings(max_examples=100, deadline=None)
@given(exact_measures(allow_density=False).filter(lambda m: 0 not in m.positions))
def test_self_similarity_closed_under_inverse(sigma):
    scales = self_similarity_scales(sigma)
    assert SymbolicReal(1) in scales
    assert all(s.inverse() in scales for s in scales)


@settings(max_examples=200, deadline=None)
@given(exact_measures(), exact_measures())
def test_singularity_and_continuity_cohere(a, b):
    status = singularity_test(a, b).status
    ac = abs_continuity_test(a, b)
    if status == SINGULAR and not a.is_zero():
        assert not ac
    if ac and not a.is_zero():
        assert status == COMMON_MASS


# -- group measures ------------------------------------------------------------------------


def test_realize_geometric_weights():
    gm = GroupMeasure((tau,), atomic([(1, 1)]), F(1, 2), F(1), 1)
    sigma = realize(gm)
    assert sigma == atomic([(tau ** -1, F(1, 4)), (1, F(1, 2)), (tau, F(1, 4))])
    assert realize(gm, 0) == atomic([(1, 1)])
    two = realize(GroupMeasure((2,), atomic([(1, 1)]), truncation_radius=2))
    assert sorted(F(p.as_fraction()) for p in two.positions) == [F(1, 4), F(1, 2), 1, 2, 4]


def test_realize_collision_raises():
    gm = GroupMeasure((2,), atomic([(1, 1), (2, 1)]), truncation_radius=1)
    with pytest.raises(GroupCollisionError):
        realize(gm)


def test_structural_examples():
    gm = GroupMeasure((tau,), atomic([(1, 1)]), truncation_radius=3)
    assert structural_self_similarity(gm, tau).kind == MEMBER
    v = structural_self_similarity(gm, 2)
    assert v.kind == COLLISIONS and v.collision_count == 0
    four = structural_self_similarity(GroupMeasure((2,), atomic([(1, 1)]), truncation_radius=3), 4)
    assert four.kind == MEMBER and four.word == (2,)
    neg = structural_self_similarity(gm, -tau ** 2)
    assert neg.kind == MEMBER and neg.sign == -1


@pytest.mark.parametrize("R", [1, 2, 3, 6])
def test_support_overlap_of_generator(R):
    gm = GroupMeasure((tau,), atomic([(1, 1)]), truncation_radius=R)
    frac = support_overlap(realize(gm), tau, {"tau": NumericReal.of("pi")})
    assert frac == F(2 * R, 2 * R + 1)


# -- io ----------------------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(exact_measures())
def test_json_and_text_round_trip(sigma):
    assert loads_json(dumps_json(sigma)) == sigma
    assert loads_text(dumps_text(sigma)) == sigma
    assert dumps_json(loads_text(dumps_text(sigma))) == dumps_json(sigma)


@settings(max_examples=50, deadline=None)
@given(float_measures())
def test_float_round_trip(sigma):
    assert loads_json(dumps_json(sigma)) == sigma


def test_symbolic_json_round_trip():
    sigma = realize(GroupMeasure((tau,), atomic([(1, 1)]), truncation_radius=2))
    assert loads_json(dumps_json(sigma)) == sigma


def test_csv_duplicates():
    text = "pos,w\n1,1/2\n1,1/4\n2,1/4\n"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = loads_csv(text)
    assert caught and m == atomic([(1, F(3, 4)), (2, F(1, 4))])
    with pytest.raises(MeasureParseError) as err:
        loads_csv(text, strict=True)
    assert err.value.line == 3
    assert loads_csv(dumps_csv(m)) == m


def test_parse_error_has_location():
    with pytest.raises(MeasureParseError) as err:
        loads_text("tier\tsymbolic\natom\t1/0\t1\n")
    assert err.value.line == 2


def test_symbolic_evaluation_to_numeric():
    sigma = atomic([(tau, 1)])
    num = sigma.evaluate({"tau": NumericReal.of("3.14159")})
    assert num.tier == "numeric" and abs(num.positions[0] - 3.14159) < 1e-15
