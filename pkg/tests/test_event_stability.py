import math

import numpy as np
import pytest

from kemst.errors import AuditFailure, ParameterError
from kemst.event_stability import (
    approximation_audit,
    estimate_stability_ratio,
    recompute_always_schedule,
    run_event_regime,
    spread,
    thinned_subset,
)
from kemst.scenarios import KineticScenario, gen_chebyshev, gen_split, gen_stationary
from kemst.spanning import PointConfig, emst, tree_length
from kemst.trajectories import Trajectory, constant, linear, normalize_unit_range


def test_stationary_run_has_no_events():
    sc = gen_stationary([[0.2, 0.2], [0.8, 0.8], [0.2, 0.8]], k=0.1)
    result = run_event_regime(sc, samples=8)
    assert result.event_count == 0
    assert result.trace.max_ratio() == pytest.approx(1.0)


def test_linear_mover_event_times():
    sc = KineticScenario(
        points=(linear([0.0], [1.0], 1.0), constant([0.5], 1.0)), k=0.25
    )
    result = run_event_regime(sc, samples=0)
    assert result.event_count == 4
    times = [t for t, _tree in result.schedule[1:]]
    np.testing.assert_allclose(times, [0.25, 0.5, 0.75, 1.0], atol=1e-8)


def test_run_requires_budget_and_normalization():
    sc = gen_stationary([[0.2], [0.8]])
    with pytest.raises(ParameterError):
        run_event_regime(sc, samples=4)
    wild = KineticScenario(points=(linear([0.0], [3.0], 1.0), constant([0.5], 1.0)), k=0.1)
    with pytest.raises(ParameterError):
        run_event_regime(wild, samples=4)


def test_chebyshev_event_count_bound_and_pin(pinned):
    sc = gen_chebyshev(3, 11, k=0.1)
    result = run_event_regime(sc, samples=0)
    assert result.event_count <= math.ceil(9 / 0.1)
    assert result.event_count == pinned["chebyshev_event_counts_n11"]["s3_k0.1"]


def test_trace_invariants():
    sc = gen_chebyshev(3, 5, k=0.2)
    result = run_event_regime(sc, samples=32)
    times = [r.time for r in result.trace.records]
    assert all(b >= a - 1e-12 for a, b in zip(times, times[1:]))
    assert all(r.ratio >= 1.0 - 1e-12 for r in result.trace.records)


# --- spread ----------------------------------------------------------------


def test_spread_unit_square_first_neighbor():
    cfg = PointConfig([[0, 0], [1, 0], [1, 1], [0, 1]])
    rep = spread(cfg, 1)
    assert rep.mindist_l == pytest.approx(1.0)
    assert rep.delta_l == pytest.approx(1.0)


def test_spread_unit_square_third_neighbor():
    cfg = PointConfig([[0, 0], [1, 0], [1, 1], [0, 1]])
    rep = spread(cfg, 3)
    assert rep.mindist_l == pytest.approx(math.sqrt(2))


def test_spread_matches_allpairs_oracle():
    rng = np.random.default_rng(9)
    pos = rng.uniform(0, 1, size=(30, 2))
    cfg = PointConfig(pos)
    rep = spread(cfg, 2)
    # independent quadratic scan
    best = math.inf
    for i in range(30):
        dists = sorted(
            np.linalg.norm(pos[i] - pos[j]) for j in range(30) if j != i
        )
        best = min(best, dists[1])
    assert rep.mindist_l == pytest.approx(best, abs=1e-12)


def test_spread_rank_bounds():
    cfg = PointConfig([[0, 0], [1, 0], [1, 1]])
    with pytest.raises(ParameterError):
        spread(cfg, 0)
    with pytest.raises(ParameterError):
        spread(cfg, 3)


# --- audit -----------------------------------------------------------------


def test_audit_stationary_zero_slack():
    sc = gen_stationary([[0.2, 0.2], [0.8, 0.8], [0.5, 0.1]], k=0.05)
    result = run_event_regime(sc, samples=8)
    report = approximation_audit(result, sc)
    assert report.max_slack == pytest.approx(0.0, abs=1e-12)


def test_audit_zero_slack_at_recompute_records():
    sc = gen_chebyshev(2, 6, k=0.2)
    result = run_event_regime(sc, samples=16)
    for rec in result.trace.records:
        if rec.event_type == "recompute":
            assert rec.tree_length - rec.opt_length == pytest.approx(0.0, abs=1e-12)


def test_audit_chebyshev_pinned(pinned):
    sc = gen_chebyshev(3, 11, k=0.1)
    result = run_event_regime(sc, samples=64)
    report = approximation_audit(result, sc)
    want = pinned["chebyshev_s3_n11_k0.1"]
    assert report.max_slack == pytest.approx(want["max_slack"], abs=1e-9)
    assert report.max_ratio == pytest.approx(want["max_ratio"], abs=1e-9)
    assert report.max_slack <= report.bound_4kn


def test_audit_failure_reports_record():
    sc = gen_chebyshev(2, 6, k=0.2)
    result = run_event_regime(sc, samples=4)
    # sabotage one record far beyond the additive bound
    bad = result.trace.records[0].__class__(
        time=0.5,
        event_type="sample",
        tree_length=99.0,
        opt_length=0.5,
        ratio=198.0,
        displacement_since_ref=0.0,
    )
    result.trace.records.append(bad)
    with pytest.raises(AuditFailure) as exc:
        approximation_audit(result, sc)
    assert exc.value.record is bad


def test_event_count_upper_bound_random_polynomials():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(3, 8))
        s = int(rng.integers(1, 5))
        k = float(rng.uniform(0.05, 0.3))
        pts = tuple(
            Trajectory(
                "polynomial",
                1,
                1.0,
                coeffs=(normalize_unit_range(tuple(rng.normal(0, 1, s + 1)), 1.0),),
            )
            for _ in range(n)
        )
        sc = KineticScenario(points=pts, k=k)
        result = run_event_regime(sc, samples=0)
        assert result.event_count <= math.ceil(s * s / k) + 1


def test_event_count_halving_growth():
    counts = {}
    for k in (0.1, 0.2):
        counts[k] = run_event_regime(gen_chebyshev(4, 11, k=k), samples=0).event_count
    assert 1.8 <= counts[0.1] / counts[0.2] <= 2.2


def test_thinning_lower_bound():
    rng = np.random.default_rng(30)
    for _ in range(10):
        n = int(rng.integers(8, 24))
        cfg = PointConfig(rng.uniform(0, 1, size=(n, 2)))
        l = int(rng.integers(1, 4))
        rep = spread(cfg, l)
        kept = thinned_subset(cfg, rep.mindist_l)
        assert len(kept) >= math.ceil(n / l) - 1  # each pick removes <= l-1 others
        pos = cfg.positions[kept]
        if len(kept) >= 2:
            d = np.linalg.norm(pos[:, None] - pos[None, :], axis=2)
            np.fill_diagonal(d, np.inf)
            assert d.min() >= rep.mindist_l - 1e-9
        opt = tree_length(cfg, emst(cfg))
        assert opt >= (n / l - 1) * rep.mindist_l - 1e-9


# --- stability-ratio estimator ----------------------------------------------


def test_estimator_zero_for_stationary():
    sc = gen_stationary([[0.1, 0.1], [0.9, 0.9], [0.1, 0.9]], k=0.1)
    schedule = recompute_always_schedule(sc, samples=8)
    assert estimate_stability_ratio(schedule, sc, pair_samples=50) == 0.0


def test_estimator_zero_for_constant_tree():
    sc = gen_chebyshev(2, 4, k=0.2)
    tree = emst(sc.config(0.0))
    schedule = [(0.0, tree)]
    assert estimate_stability_ratio(schedule, sc, pair_samples=50) == 0.0


def test_estimator_infinite_on_zero_input_distance():
    from kemst.spanning import SpanningTree

    sc = gen_stationary([[0.1, 0.1], [0.9, 0.9], [0.1, 0.9]], k=0.1)
    schedule = [
        (0.0, SpanningTree(3, [(0, 2), (1, 2)])),
        (0.5, SpanningTree(3, [(0, 1), (1, 2)])),
    ]
    assert estimate_stability_ratio(schedule, sc, pair_samples=100) == math.inf


def test_spread_mindist_nondecreasing_in_rank():
    rng = np.random.default_rng(31)
    pos = rng.uniform(0, 1, size=(12, 2))
    cfg = PointConfig(pos)
    vals = [spread(cfg, l).mindist_l for l in range(1, 12)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_estimator_split_pinned(pinned):
    want = pinned["split_n6_stability_estimate"]
    sc = gen_split(6)
    schedule = recompute_always_schedule(sc, samples=want["samples"])
    est = estimate_stability_ratio(
        schedule, sc, pair_samples=want["pair_samples"], seed=want["seed"]
    )
    assert est == pytest.approx(want["value"], rel=1e-9)
    assert est > 0.0
