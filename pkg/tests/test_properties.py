import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpmeasures import measures as m
from gpmeasures import properties as P

from oracles import angle_eq2_exact, comonotone_brute, gini_eq1_exact


@pytest.mark.parametrize("x, z, expected", [
    ((1, 2, 3), (4, 5, 9), True),
    ((1, 2), (2, 1), False),
    ((1, 1, 5), (3, 7, 9), True),
    ((1, 1, 2), (5, 0, 3), False),
])
def test_is_comonotone(x, z, expected):
    assert P.is_comonotone(x, z) is expected


def test_is_comonotone_dimension_mismatch():
    with pytest.raises(m.DimensionMismatch):
        P.is_comonotone((1, 2), (1, 2, 3))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 3), min_size=n, max_size=n).filter(any),
    st.lists(st.integers(0, 3), min_size=n, max_size=n).filter(any))))
def test_is_comonotone_matches_brute_force(pair):
    x, z = pair
    assert P.is_comonotone(x, z) == comonotone_brute(x, z)


@pytest.mark.parametrize("n", [2, 3, 10, 64])
def test_make_comonotone_pair(n):
    for seed in range(20):
        pair = P.make_comonotone_pair(n, seed)
        assert P.is_comonotone(pair.x, pair.z)
        assert abs(pair.x.total - pair.z.total) <= 1e-12 * max(1.0, pair.x.total)
        assert pair.x.n == pair.z.n == n


def test_make_comonotone_pair_deterministic():
    a, b = P.make_comonotone_pair(7, 123), P.make_comonotone_pair(7, 123)
    assert a.x == b.x and a.z == b.z
    assert P.make_comonotone_pair(7, 124).x != a.x


def test_comonotone_pair_validates():
    with pytest.raises(P.PreconditionViolated):
        P.ComonotonePair(m.new_distribution([1, 2]), m.new_distribution([2, 1]))
    with pytest.raises(P.PreconditionViolated):
        P.ComonotonePair(m.new_distribution([1, 2]), m.new_distribution([1, 3]))


def test_mix_weight_range():
    pair = P.make_comonotone_pair(3, 0)
    with pytest.raises(ValueError):
        P.mix(pair, 1.5)


# ---------------------------------------------------------------- A1-A3

def test_scale_invariance_examples():
    out = P.check_scale_invariance(1, (1, 2, 3, 4), [10])
    assert out.passed and out.witness is None
    assert m.g_p(m.new_distribution([10, 20, 30, 40]), 1).value == pytest.approx(0.25, abs=1e-15)
    assert P.check_scale_invariance(math.inf, (0, 2, 5), [0.1, 7]).passed
    v = m.standard_vector(5, 2)
    assert P.check_scale_invariance(2, v, [3]).passed


def test_scale_invariance_catches_non_invariant_measure(monkeypatch):
    # the checker itself must be able to fail
    monkeypatch.setattr(P, "g_p", lambda d, p: m.MeasureReport(float(d.values.max()), "g_p", p, d.n, "x"))
    out = P.check_scale_invariance(1, (1, 2), [3])
    assert not out.passed
    assert out.witness["lambda"] == 3


def test_symmetry_examples():
    out = P.check_symmetry(1, (0, 0, 1), n_perms=6, seed=1)
    assert out.passed and out.deviation == 0
    assert P.check_symmetry(2, (3, 1, 4, 1, 5), n_perms=1).passed
    assert P.check_symmetry(3, (3, 1, 4, 1, 5), n_perms=2).passed


def test_standardization_examples():
    out = P.check_standardization(1, 3)
    assert out.passed and out.trials == 3
    assert [m.g_p(m.standard_vector(3, k), 1).value for k in range(3)] == pytest.approx([0, 1 / 3, 2 / 3])
    assert [m.g_p(m.standard_vector(4, k), 2).value for k in range(4)] == pytest.approx([0, 0.25, 0.5, 0.75])
    for n in (2, 5, 16):
        assert P.check_standardization(math.inf, n).passed


# ---------------------------------------------------------------- A4

def test_a4_endpoints():
    pair = P.make_comonotone_pair(6, 3)
    assert P.check_comonotone_separability(1, pair, [0.0, 1.0]).passed
    assert P.check_comonotone_separability(2, pair, [0.0, 1.0]).passed


def test_a4_holds_for_gini():
    for seed in range(200):
        pair = P.make_comonotone_pair(2 + seed % 30, seed)
        assert P.check_comonotone_separability(1, pair, [0.5]).passed


def test_a4_fails_for_g2():
    out = P.find_a4_violation(2, seed=0, n_trials=50)
    assert out.kind == "witness_search"
    assert out.passed and out.deviation > 1e-6
    w = out.witness
    pair = P.ComonotonePair(w["x"], w["z"])
    recheck = P.check_comonotone_separability(2, pair, [w["beta"]], tol=0.0)
    assert recheck.deviation == pytest.approx(out.deviation, rel=0.01)


def test_a4_g2_fixed_witness_against_oracle():
    # exact rationals: x, z comonotone with equal sums, beta = 1/2
    x, z = (0, 0, 6), (1, 2, 3)
    half = tuple((a + b) / 2 for a, b in zip(x, z))
    exact_dev = abs(angle_eq2_exact(half) - (angle_eq2_exact(x) + angle_eq2_exact(z)) / 2)
    pair = P.ComonotonePair(m.new_distribution(x), m.new_distribution(z))
    out = P.check_comonotone_separability(2, pair, [0.5], tol=1e-6)
    assert not out.passed
    assert out.deviation == pytest.approx(float(exact_dev), rel=1e-12)
    # while the Gini is exactly linear on the same pair
    gini_dev = abs(gini_eq1_exact(half) - (gini_eq1_exact(x) + gini_eq1_exact(z)) / 2)
    assert gini_dev == 0
    assert P.check_comonotone_separability(1, pair, [0.5]).passed


# ---------------------------------------------------------------- propositions

def test_bounds_examples():
    out = P.check_bounds(1, (0, 0, 1))
    assert out.passed
    assert m.g_p((0, 0, 1), 1).value == pytest.approx(2 / 3)
    assert P.check_bounds(7, P.random_distribution(np.random.default_rng(0))).passed
    assert P.check_bounds(2, (4, 4, 4)).passed


def test_limit_examples():
    assert P.check_limit((0, 1, 2, 3), 20, 2e-4).passed
    out = P.check_limit((1, 2, 3, 4), 20, 1e-3)
    assert out.passed and m.g_p((1, 2, 3, 4), 20).value <= 0.0008 + 1e-3
    assert abs(m.g_p((1, 2), 30).value - 1 / (2 * (2 ** 30 + 1))) <= 1e-12


def test_limit_can_fail():
    out = P.check_limit((0, 1, 2, 3), 3, 1e-3)
    assert not out.passed
    assert out.witness["limit"] == 0.25


def test_g2_extension_examples():
    assert angle_eq2_exact((1, 5, 6)) == angle_eq2_exact((2, 3, 7))
    assert angle_eq2_exact((1, 5, 6, 4)) == angle_eq2_exact((2, 3, 7, 4))
    assert P.check_g2_extension_invariance((1, 5, 6), (2, 3, 7), 4).passed
    assert P.check_g2_extension_invariance((3, 1, 2), (3, 1, 2), 9.5).passed
    with pytest.raises(P.PreconditionViolated):
        P.check_g2_extension_invariance((1, 4, 5), (2, 2, 6), 2)
    with pytest.raises(P.PreconditionViolated):
        P.check_g2_extension_invariance((1, 5, 6), (2, 3, 8), 2)


def test_g2_concat_examples():
    assert P.check_g2_concat_invariance((1, 5, 6), (2, 3, 7), (1, 5, 6), (2, 3, 7)).passed
    assert P.check_g2_concat_invariance((1, 2), (1, 2), (4, 0, 1), (4, 0, 1)).passed
    assert P.check_g2_concat_invariance((6, 5, 1), (7, 2, 3), (2, 3, 7), (6, 1, 5)).passed
    with pytest.raises(P.PreconditionViolated):
        P.check_g2_concat_invariance((1, 5, 6), (2, 3, 7), (1, 4, 5), (2, 2, 6))


def test_equal_moment_pairs():
    pairs = P.equal_moment_pairs(3)
    assert pairs
    for x, y in pairs:
        assert x != y
        assert sum(x) == sum(y)
        assert sum(v * v for v in x) == sum(v * v for v in y)
        assert angle_eq2_exact(x.tolist()) == angle_eq2_exact(y.tolist())


def test_gini_merge_counterexample():
    out = P.find_gini_merge_counterexample(search_seed=0, n_trials=10_000, sizes=(3,))
    assert out.passed and out.kind == "witness_search"
    fixed = out.witness["witnesses"][0]
    assert fixed["x"].tolist() == [1, 4, 5] and fixed["y"].tolist() == [2, 2, 6] and fixed["a"] == 2
    assert round(fixed["gini_x"], 4) == round(fixed["gini_y"], 4) == 0.2667
    assert round(fixed["gini_xa"], 4) == 0.2917
    assert round(fixed["gini_ya"], 4) == 0.25
    assert out.witness["found_by_search"] >= 1
    for w in out.witness["witnesses"]:
        x, y, a = w["x"].tolist(), w["y"].tolist(), w["a"]
        assert sorted(x) != sorted(y)
        assert sum(x) == sum(y)
        assert gini_eq1_exact(x) == gini_eq1_exact(y)
        standalone = abs(m.gini_naive(x + [a]).value - m.gini_naive(y + [a]).value)
        assert standalone > 1e-6
        assert standalone == pytest.approx(w["deviation"], rel=0.01)


def test_merge_search_rejects_identical_vectors(monkeypatch):
    # force every candidate pair to be x == y
    class Same:
        def __init__(self, seed):
            pass

        def choice(self, sizes):
            return 3

        def integers(self, lo, hi, size=None, endpoint=False):
            return np.array([1, 2, 3]) if size else 2

    monkeypatch.setattr(P.np.random, "default_rng", Same)
    out = P.find_gini_merge_counterexample(n_trials=100)
    assert out.witness["found_by_search"] == 0


# ---------------------------------------------------------------- suites

def test_suite_determinism():
    a = P.run_suite("all", trials=30, seed=5)
    b = P.run_suite("all", trials=30, seed=5)
    assert [o.to_dict() for o in a] == [o.to_dict() for o in b]


def test_suite_parallel_matches_serial():
    serial = P.run_axioms((1, 2, 3), trials=20, seed=9, jobs=1)
    parallel = P.run_axioms((1, 2, 3), trials=20, seed=9, jobs=2)
    assert [o.to_dict() for o in serial] == [o.to_dict() for o in parallel]


def test_axioms_all_exponents():
    outcomes = P.run_axioms((1, 1.5, 2, 3, 10, math.inf), trials=50, seed=1)
    assert all(o.ok for o in outcomes)
    kinds = {o.name: o.kind for o in outcomes}
    assert kinds["A4 comonotone separability [p=1.0]"] == "property"
    assert kinds["A4 violation search [p=2.0]"] == "witness_search"
    assert kinds["A4 comonotone separability [p=inf]"] == "not_applicable"


def test_outcome_witness_invariant():
    for o in P.run_suite("all", trials=20, seed=3):
        if o.kind == "property":
            assert (o.witness is None) == o.passed
        elif o.kind == "witness_search":
            assert (o.witness is not None) == o.passed


def test_unknown_suite():
    with pytest.raises(ValueError):
        P.run_suite("bogus")
