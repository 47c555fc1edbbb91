"""Metric tests: entropy, skewness, density, deciles, deletion, t-test."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from een.errors import (
    DegenerateSample,
    EmptySet,
    NotNormalized,
    TooFewPoints,
)
from een.metrics import (
    ScorePointSet,
    decile_proportions,
    point_density,
    random_deletion,
    shannon_entropy,
    skewness,
    welch_t_test,
)
from een.network import WordMap


def points(coords, scores=None):
    xs = np.array([c[0] for c in coords], dtype=float)
    ys = np.array([c[1] for c in coords], dtype=float)
    ss = np.asarray(scores if scores is not None else np.zeros(len(coords)),
                    dtype=float)
    return ScorePointSet(xs, ys, ss)


def test_entropy_one_hot():
    assert shannon_entropy([1.0, 0.0, 0.0]) == 0.0


def test_entropy_uniform_three():
    assert shannon_entropy([1 / 3, 1 / 3, 1 / 3]) == pytest.approx(math.log(3), abs=1e-12)


def test_entropy_dyadic_bits():
    assert shannon_entropy([0.5, 0.25, 0.25], base=2) == pytest.approx(1.5, abs=1e-12)


def test_entropy_not_normalized():
    with pytest.raises(NotNormalized):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(NotNormalized):
        shannon_entropy([1.5, -0.5])


@given(st.lists(st.floats(1e-9, 1.0), min_size=1, max_size=12))
@settings(max_examples=80, deadline=None)
def test_entropy_bounds(raw):
    p = np.asarray(raw) / np.sum(raw)
    h = shannon_entropy(p / p.sum())
    assert -1e-12 <= h <= math.log(len(raw)) + 1e-9


def test_skewness_symmetric_zero():
    assert skewness([-1.0, 0.0, 1.0]) == 0.0


def test_skewness_hand_value():
    # moments of {0,0,0,1}: m2 = 0.1875, m3 = 0.09375
    want = 0.09375 / 0.1875**1.5
    assert skewness([0.0, 0.0, 0.0, 1.0]) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(1.1547005383792515, abs=1e-12)


def test_skewness_degenerate():
    with pytest.raises(DegenerateSample):
        skewness([3.0, 3.0, 3.0, 3.0])
    with pytest.raises(DegenerateSample):
        skewness([1.0, 2.0])


@given(
    st.lists(st.floats(-50, 50), min_size=4, max_size=30).filter(
        lambda xs: np.var(xs) > 1e-6
    ),
    st.floats(0.1, 10),
    st.floats(-100, 100),
)
@settings(max_examples=60, deadline=None)
def test_skewness_affine_invariance(xs, a, b):
    scaled = [a * x + b for x in xs]
    assert skewness(scaled) == pytest.approx(skewness(xs), abs=1e-6)


def test_density_two_points_zero():
    assert point_density(points([(0, 0), (3, 4)])) == 0.0


def test_density_collinear_exact_third():
    # distances {1, 9, 10}, mean 20/3; only the unit pair is below
    assert point_density(points([(0, 0), (1, 0), (10, 0)])) == 1 / 3


def test_density_l_shape():
    # distances {1, 1, sqrt(2)}: two pairs below the mean
    assert point_density(points([(0, 0), (1, 0), (0, 1)])) == pytest.approx(2 / 3)


def test_density_too_few():
    with pytest.raises(TooFewPoints):
        point_density(points([(0, 0)]))


def test_density_rigid_motion_and_scale_invariant():
    rng = np.random.default_rng(4)
    pts = rng.random((12, 2)) * 10
    base = point_density(ScorePointSet(pts[:, 0], pts[:, 1], np.zeros(12)))
    ang = 0.7
    rot = np.array([[math.cos(ang), -math.sin(ang)],
                    [math.sin(ang), math.cos(ang)]])
    moved = 3.5 * (pts @ rot.T) + np.array([100.0, -40.0])
    same = point_density(ScorePointSet(moved[:, 0], moved[:, 1], np.zeros(12)))
    assert same == pytest.approx(base, abs=1e-12)


def test_density_per_point_variant_runs():
    rng = np.random.default_rng(6)
    pts = rng.random((15, 2))
    ps = ScorePointSet(pts[:, 0], pts[:, 1], np.zeros(15))
    d = point_density(ps, per_point_mean=True)
    assert 0.0 <= d <= 1.0


def test_deciles_all_equal_top_bin():
    props = decile_proportions(points([(0, 0)] * 5, [2.0] * 5))
    assert props == [0.0] * 9 + [1.0]


def test_deciles_edges():
    props = decile_proportions(points([(0, 0)] * 4, [0.0, 0.05, 0.95, 1.0]))
    assert props[0] == 0.5
    assert props[9] == 0.5
    assert sum(props) == pytest.approx(1.0)


def test_deciles_empty():
    with pytest.raises(EmptySet):
        decile_proportions(points([]))


def test_deciles_uniform_monte_carlo():
    rng = np.random.default_rng(123)
    scores = rng.random(1000)
    props = decile_proportions(points([(0, 0)] * 1000, scores))
    assert sum(props) == pytest.approx(1.0)
    for p in props:
        assert abs(p - 0.1) < 0.05


def word_map_for_deletion(n=40):
    cc = {(i % 8, i // 8): Fraction(i % 5, 5) for i in range(n)}
    return WordMap(cc, 8, (n + 7) // 8)


def test_deletion_identity_and_full():
    wm = word_map_for_deletion()
    assert random_deletion(wm, 0.0, 1).cc == wm.cc
    assert random_deletion(wm, 1.0, 1).cc == {}


@pytest.mark.parametrize("p", [0.25, 0.5, 0.77])
def test_deletion_exact_size(p):
    wm = word_map_for_deletion(41)
    out = random_deletion(wm, p, 9)
    assert len(out.cc) == 41 - math.floor(p * 41)


def test_deletion_seed_determinism():
    wm = word_map_for_deletion()
    a = random_deletion(wm, 0.4, 7)
    b = random_deletion(wm, 0.4, 7)
    c = random_deletion(wm, 0.4, 8)
    assert a.cc == b.cc
    assert a.cc != c.cc


@given(st.floats(0, 1), st.integers(0, 2**31))
@settings(max_examples=50, deadline=None)
def test_deletion_subset_untouched(p, seed):
    wm = word_map_for_deletion(30)
    out = random_deletion(wm, p, seed)
    assert len(out.cc) == 30 - math.floor(p * 30)
    for pix, frac in out.cc.items():
        assert wm.cc[pix] == frac


def test_deletion_bad_rate():
    with pytest.raises(ValueError):
        random_deletion(word_map_for_deletion(), 1.5, 0)


def test_ttest_identical_samples():
    res = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert res.t == 0.0
    assert res.p == 1.0


def test_ttest_textbook_case():
    res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert res.t == pytest.approx(-1.0, abs=1e-12)
    assert res.p == pytest.approx(0.3466, abs=2e-4)
    ref = scipy_stats.ttest_ind([1, 2, 3, 4, 5], [2, 3, 4, 5, 6], equal_var=False)
    assert res.p == pytest.approx(ref.pvalue, abs=1e-9)


def test_ttest_separated_significant():
    res = welch_t_test([0.0, 0.0, 0.1], [10.0, 10.0, 10.1])
    assert res.p < 0.001


def test_ttest_antisymmetric():
    rng = np.random.default_rng(5)
    a = list(rng.normal(0, 1, 8))
    b = list(rng.normal(0.5, 2, 12))
    r1 = welch_t_test(a, b)
    r2 = welch_t_test(b, a)
    assert r1.t == -r2.t
    assert r1.p == r2.p
    assert r1.df == r2.df


def test_ttest_degenerate():
    with pytest.raises(DegenerateSample):
        welch_t_test([1.0], [1.0, 2.0])
    with pytest.raises(DegenerateSample):
        welch_t_test([2.0, 2.0], [3.0, 3.0])


def test_ttest_matches_scipy_seeded_pairs():
    rng = np.random.default_rng(20240601)
    for _ in range(20):
        na = int(rng.integers(2, 40))
        nb = int(rng.integers(2, 40))
        a = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), na)
        b = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), nb)
        res = welch_t_test(a, b)
        ref = scipy_stats.ttest_ind(a, b, equal_var=False)
        assert res.t == pytest.approx(ref.statistic, rel=1e-9, abs=1e-12)
        assert abs(res.p - ref.pvalue) < 1e-6


def test_score_point_set_csv_roundtrip(tmp_path):
    ps = points([(0.5, 1.5), (2.0, -3.25)], [0.125, 0.875])
    path = tmp_path / "pts.csv"
    ps.to_csv(path)
    back = ScorePointSet.from_csv(path)
    assert np.array_equal(back.xs, ps.xs)
    assert np.array_equal(back.ys, ps.ys)
    assert np.array_equal(back.scores, ps.scores)
    assert path.read_text().splitlines()[0] == "x,y,score"
