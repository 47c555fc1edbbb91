"""Self-organization tests: enumeration, evaluation, winner selection."""

from fractions import Fraction

import numpy as np
import pytest

from een._engine import PairTable, evaluate_with_table
from een.errors import EmptyGrid, NoQualifyingCombo
from een.ingest import EncodeConfig, ScaleTimeGrid, encode_buffer
from een.network import NeighborhoodSpec, WeightConfig
from een.selforg import (
    GridSpec,
    default_grid_spec,
    enumerate_grid,
    evaluate_config,
    grid_spec_from_json,
    self_organize,
)
from een.synth import ToneEvent, gen_tone_corpus
from een.words import rank_table
from een.network import build_network, clustering_coefficients


def make_grid(pixels, n_scales=84, n_frames=None):
    if n_frames is None:
        n_frames = 1 + max((t for _, t in pixels), default=0)
    return ScaleTimeGrid(EncodeConfig(n_scales=n_scales), dict(pixels), n_frames)


def small_tone_grid(seed=0, duration=4.0):
    rng = np.random.default_rng(seed)
    events = []
    t = 0.0
    while t + 0.3 <= duration:
        events.append(ToneEvent(int(rng.integers(30, 60)), t, 0.28,
                                0.2 + 0.3 * float(rng.random())))
        t += 0.3
    cfg = EncodeConfig()
    return encode_buffer(gen_tone_corpus(events, cfg, 44100, duration=duration), cfg)


def test_enumerate_grid_order():
    spec = GridSpec(
        values_w1=(1.0, 2.0), values_w2=(3.0,), values_w3=(4.0,),
        values_w4=(5.0,), values_theta=(0.5, 1.0, 2.0),
    )
    configs = enumerate_grid(spec)
    assert len(configs) == 6 == spec.n_combos
    assert configs == [
        WeightConfig(1.0, 3.0, 4.0, 5.0, 0.5),
        WeightConfig(1.0, 3.0, 4.0, 5.0, 1.0),
        WeightConfig(1.0, 3.0, 4.0, 5.0, 2.0),
        WeightConfig(2.0, 3.0, 4.0, 5.0, 0.5),
        WeightConfig(2.0, 3.0, 4.0, 5.0, 1.0),
        WeightConfig(2.0, 3.0, 4.0, 5.0, 2.0),
    ]


def test_grid_spec_counts_product():
    ws = tuple(float(v) for v in range(1, 9))
    spec = GridSpec(ws, ws, ws, ws, (1.0, 2.0, 3.0))
    assert spec.n_combos == 8**4 * 3


def test_grid_spec_empty_theta_rejected():
    ws = (1.0, 2.0)
    with pytest.raises(ValueError):
        GridSpec(ws, ws, ws, ws, ())


def test_grid_spec_requires_ascending():
    ws = (1.0, 2.0)
    with pytest.raises(ValueError):
        GridSpec(ws, ws, ws, (2.0, 1.0), (1.0,))
    with pytest.raises(ValueError):
        GridSpec(ws, ws, ws, ws, (1.0, 1.0))


def test_evaluate_theta_zero_single_word():
    grid = small_tone_grid()
    res = evaluate_config(grid, WeightConfig(1, 1, 1, 1, 0.0))
    assert res.word_types == 1
    assert not res.qualifies
    assert res.r2 == 0.0


def test_evaluate_deterministic():
    grid = small_tone_grid()
    w = WeightConfig(2.0, 1.0, 3.0, 1.0, 40.0)
    assert evaluate_config(grid, w) == evaluate_config(grid, w)


def planted_power_law_grid():
    """Disjoint clique-plus-pendant gadgets whose cc frequencies, after
    rank-1 deletion, follow 3600/r^2 exactly for ranks 2..5.

    gadget(m) under w=(1,0,0,0), theta=10.5: clique scales {0..m-1} in one
    time column (pairwise distance <= m-1 <= 4 < theta, complete), pendant
    at scale m-1+10 (distance 10 to the top clique node only).  Yields one
    word (m-2)/m, m-1 words "1", one word "0" per copy.  Columns sit 11
    frames apart so the +-10 window isolates them.
    """
    counts = {3: 400, 4: 225, 5: 144}  # value (m-2)/m gets count 3600/r^2
    n_iso = 900 - sum(counts.values())  # word "0" topped up to 900 = 3600/4
    pixels = {}
    col = 0
    for m, n_copies in counts.items():
        for _ in range(n_copies):
            t = 11 * col
            for s in range(m):
                pixels[(s, t)] = 1
            pixels[(m - 1 + 10, t)] = 1
            col += 1
    for _ in range(n_iso):
        pixels[(0, 11 * col)] = 1
        col += 1
    grid = make_grid(pixels, n_scales=20)
    w = WeightConfig(1.0, 0.0, 0.0, 0.0, 10.5)
    return grid, w


def test_engineered_power_law_qualifies():
    grid, w = planted_power_law_grid()
    res = evaluate_config(grid, w)
    assert res.qualifies
    assert res.r2 == pytest.approx(1.0, abs=1e-12)
    assert res.word_types == 5
    assert res.zipf_b == pytest.approx(2.0, rel=1e-9)
    assert res.zipf_a == pytest.approx(3600.0, rel=1e-9)
    rt = rank_table(clustering_coefficients(build_network(grid, w)))
    assert rt.frequencies() == [2051, 900, 400, 225, 144]
    assert [e.word for e in rt.entries] == [
        Fraction(1), Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(3, 5)
    ]


def test_engine_matches_composed_pipeline():
    grid = small_tone_grid(seed=5)
    nb = NeighborhoodSpec()
    table = PairTable(grid, nb)
    rng = np.random.default_rng(1)
    for _ in range(12):
        w = WeightConfig(*(float(x) for x in rng.uniform(0, 5, 4)),
                         float(rng.uniform(0.5, 80)))
        composed = evaluate_config(grid, w, nb)
        engine = evaluate_with_table(table, w, 0.8)
        assert (composed.r2, composed.word_types, composed.qualifies,
                composed.zipf_a, composed.zipf_b) == engine


def test_engine_matches_composed_global_mode():
    grid = small_tone_grid(seed=6, duration=1.5)
    nb = NeighborhoodSpec(mode="global")
    table = PairTable(grid, nb)
    w = WeightConfig(1.0, 0.5, 2.0, 1.0, 45.0)
    composed = evaluate_config(grid, w, nb)
    engine = evaluate_with_table(table, w, 0.8)
    assert (composed.r2, composed.word_types, composed.qualifies,
            composed.zipf_a, composed.zipf_b) == engine


def test_engine_word_rationals_match_clustering():
    grid = small_tone_grid(seed=7, duration=2.0)
    nb = NeighborhoodSpec()
    w = WeightConfig(1.5, 1.0, 2.0, 0.5, 30.0)
    wm = clustering_coefficients(build_network(grid, w, nb))
    num, den = PairTable(grid, nb).word_rationals(w)
    nodes = sorted(wm.cc)
    got = [Fraction(int(n), int(d)) for n, d in zip(num, den)]
    assert got == [wm.cc[k] for k in nodes]


def test_word_map_fast_matches_clustering():
    from een._engine import word_map_fast
    grid = small_tone_grid(seed=13, duration=2.0)
    nb = NeighborhoodSpec()
    for w in (WeightConfig(1.0, 1.0, 1.0, 1.0, 55.0),
              WeightConfig(3.0, 0.5, 2.0, 1.0, 90.0)):
        wm = clustering_coefficients(build_network(grid, w, nb))
        fast = word_map_fast(grid, w, nb)
        assert fast.cc == wm.cc
        assert (fast.n_scales, fast.n_frames) == (wm.n_scales, wm.n_frames)


def test_self_organize_matches_serial_bruteforce():
    grid = small_tone_grid(seed=2)
    spec = GridSpec(
        values_w1=(1.0, 3.0), values_w2=(1.0,), values_w3=(2.0,),
        values_w4=(0.5, 1.0), values_theta=(20.0, 45.0, 70.0),
    )
    best, results = self_organize(grid, spec)
    oracle = [evaluate_config(grid, w, spec.neighborhood)
              for w in enumerate_grid(spec)]
    assert results == oracle
    qualifying = [r for r in oracle if r.qualifies]
    assert qualifying, "spec chosen so at least one combo qualifies"
    want = max(
        qualifying,
        key=lambda r: (r.word_types, r.r2, -oracle.index(r)),
    )
    assert best == want
    for r in qualifying:
        assert r.word_types <= best.word_types


def test_self_organize_jobs_identical():
    grid = small_tone_grid(seed=3)
    spec = GridSpec(
        values_w1=(1.0, 2.0, 3.0, 4.0), values_w2=(1.0, 2.0),
        values_w3=(1.0, 2.0), values_w4=(1.0, 2.0),
        values_theta=(25.0, 50.0),
    )
    best1, res1 = self_organize(grid, spec, jobs=1)
    best4, res4 = self_organize(grid, spec, jobs=4)
    assert best1 == best4
    assert res1 == res4


def test_self_organize_no_qualifying():
    grid = small_tone_grid(seed=4, duration=2.0)
    spec = GridSpec(
        values_w1=(1.0,), values_w2=(1.0,), values_w3=(1.0,),
        values_w4=(1.0,), values_theta=(1e-6,),  # edgeless: one word type
    )
    with pytest.raises(NoQualifyingCombo) as err:
        self_organize(grid, spec)
    assert len(err.value.results) == 1
    assert not err.value.results[0].qualifies


def test_self_organize_empty_grid():
    with pytest.raises(EmptyGrid):
        self_organize(make_grid({}, n_frames=1),
                      GridSpec((1.0,), (1.0,), (1.0,), (1.0,), (1.0,)))


def _sweep_all(grid, spec):
    """Winner (or None) plus the full sweep, qualifying or not."""
    try:
        return self_organize(grid, spec)
    except NoQualifyingCombo as exc:
        return None, exc.results


def test_scaling_invariance_power_of_two():
    # doubling weights and thetas scales every float exactly, so edge sets
    # and hence all word statistics are unchanged
    grid = small_tone_grid(seed=8, duration=2.5)
    base = GridSpec(
        values_w1=(1.0, 2.0), values_w2=(1.0,), values_w3=(1.0, 3.0),
        values_w4=(1.0,), values_theta=(20.0, 40.0),
    )
    scaled = GridSpec(
        values_w1=(2.0, 4.0), values_w2=(2.0,), values_w3=(2.0, 6.0),
        values_w4=(2.0,), values_theta=(40.0, 80.0),
    )
    best1, res1 = _sweep_all(grid, base)
    best2, res2 = _sweep_all(grid, scaled)
    for a, b in zip(res1, res2):
        assert b.config.theta == 2 * a.config.theta
        assert (a.word_types, a.r2, a.qualifies) == (b.word_types, b.r2, b.qualifies)
    assert (best1 is None) == (best2 is None)
    if best1 is not None:
        assert best2.config.theta == 2 * best1.config.theta
        assert (best1.word_types, best1.r2) == (best2.word_types, best2.r2)


def test_fallback_kernels_match_numba(monkeypatch):
    # the numpy/python twins must count exactly like the jitted kernels
    import een._engine as eng
    grid = small_tone_grid(seed=12, duration=2.0)
    spec = GridSpec(
        values_w1=(1.0, 3.0), values_w2=(2.0,), values_w3=(1.0,),
        values_w4=(1.0,), values_theta=(15.0, 40.0, 65.0),
    )
    _, fast = _sweep_all(grid, spec)
    monkeypatch.setattr(eng, "HAVE_NUMBA", False)
    _, slow = _sweep_all(grid, spec)
    assert fast == slow


def test_default_grid_spec_shape():
    grid = small_tone_grid(seed=9)
    spec = default_grid_spec(grid)
    assert spec.values_w1 == tuple(float(v) for v in range(1, 9))
    assert spec.values_w1 == spec.values_w2 == spec.values_w3 == spec.values_w4
    assert 1 <= len(spec.values_theta) <= 9
    assert all(t > 0 for t in spec.values_theta)
    assert default_grid_spec(grid) == spec  # deterministic


def test_grid_spec_json_roundtrip_and_percentiles():
    grid = small_tone_grid(seed=10, duration=2.0)
    spec = default_grid_spec(grid)
    back = grid_spec_from_json(spec.to_json())
    assert back == spec
    text = (
        '{"values_w1": [1.0], "values_w2": [1.0], "values_w3": [1.0],'
        ' "values_w4": [1.0], "theta_percentiles": [50],'
        ' "neighborhood": {"mode": "windowed", "r_scale": 12, "r_time": 10}}'
    )
    from_pct = grid_spec_from_json(text, grid)
    table = PairTable(grid, NeighborhoodSpec())
    info = table.pair_information(WeightConfig(1.0, 1.0, 1.0, 1.0, 1.0))
    assert from_pct.values_theta == (float(np.percentile(info, 50)),)
    with pytest.raises(ValueError):
        grid_spec_from_json(text)  # percentiles need a grid
