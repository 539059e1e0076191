import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kemst.errors import ParameterError
from kemst.scenarios import (
    KineticScenario,
    gen_chebyshev,
    gen_circle,
    gen_diamond,
    gen_rational_bumps,
    gen_split,
    gen_stationary,
    input_distance,
    next_displacement_event,
)
from kemst.spanning import emst, tree_length
from kemst.trajectories import constant, linear, polyval


def two_point_scenario():
    return KineticScenario(points=(linear([0.0], [1.0], 1.0), constant([0.5], 1.0)))


# --- input metric ---------------------------------------------------------


def test_input_distance_stationary_zero():
    sc = gen_stationary([[0.1], [0.9]])
    assert input_distance(sc, 0.0, 0.7) == 0.0


def test_input_distance_identity():
    sc = two_point_scenario()
    assert input_distance(sc, 0.42, 0.42) == 0.0


def test_input_distance_single_mover():
    sc = two_point_scenario()
    assert input_distance(sc, 0.0, 0.3) == pytest.approx(0.3, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)
def test_input_distance_pseudometric(t1, t2, t3):
    sc = gen_chebyshev(3, 4)
    d12 = input_distance(sc, t1, t2)
    d21 = input_distance(sc, t2, t1)
    d13 = input_distance(sc, t1, t3)
    d32 = input_distance(sc, t3, t2)
    assert d12 == pytest.approx(d21, abs=1e-12)
    assert input_distance(sc, t1, t1) == 0.0
    assert d12 <= d13 + d32 + 1e-12


# --- displacement events --------------------------------------------------


def test_event_stationary_none():
    sc = gen_stationary([[0.2], [0.8]])
    assert next_displacement_event(sc, 0.0, 0.3) is None


def test_event_linear_quarter():
    sc = two_point_scenario()
    t = next_displacement_event(sc, 0.0, 0.25)
    assert t == pytest.approx(0.25, abs=1e-9)


def test_event_requires_positive_budget():
    with pytest.raises(ParameterError):
        next_displacement_event(two_point_scenario(), 0.0, 0.0)


def _dense_oracle(sc, t_ref, k, grid=200_001):
    """Independent event finder: fine uniform scan plus bisection."""
    ts = np.linspace(t_ref, sc.horizon, grid)
    ref = sc.positions(t_ref)
    best = None
    for traj, r in zip(sc.points, ref):
        if traj.kind == "polynomial":
            disp_sq = sum(
                (polyval(c, ts) - rc) ** 2 for c, rc in zip(traj.coeffs, r)
            )
            vals = np.sqrt(disp_sq) - k
            dist_at = lambda t, tr=traj, rr=r: math.sqrt(
                sum((polyval(c, t) - rc) ** 2 for c, rc in zip(tr.coeffs, rr))
            )
        else:
            vals = np.array(
                [np.linalg.norm(traj.at(float(t)) - r) for t in ts]
            ) - k
            dist_at = lambda t, tr=traj, rr=r: float(np.linalg.norm(tr.at(t) - rr))
        hit = np.flatnonzero(vals >= 0)
        if len(hit) == 0:
            continue
        if hit[0] == 0:
            cand = float(ts[0])
        else:
            lo, hi = float(ts[hit[0] - 1]), float(ts[hit[0]])
            while hi - lo > 1e-12:
                m = 0.5 * (lo + hi)
                if dist_at(m) >= k:
                    hi = m
                else:
                    lo = m
            cand = 0.5 * (lo + hi)
        if best is None or cand < best:
            best = cand
    return best


def test_event_chebyshev_matches_dense_oracle():
    sc = gen_chebyshev(3, 4)
    got = next_displacement_event(sc, 0.0, 0.1)
    want = _dense_oracle(sc, 0.0, 0.1)
    assert got == pytest.approx(want, abs=1e-8)


def test_event_random_polynomials_match_dense_oracle():
    rng = np.random.default_rng(5)
    from kemst.trajectories import Trajectory, normalize_unit_range

    for _ in range(100):
        s = int(rng.integers(1, 5))
        pts = tuple(
            Trajectory(
                "polynomial",
                1,
                1.0,
                coeffs=(normalize_unit_range(tuple(rng.normal(0, 1, s + 1)), 1.0),),
            )
            for _ in range(3)
        )
        sc = KineticScenario(points=pts)
        k = float(rng.uniform(0.05, 0.3))
        t_ref = float(rng.uniform(0.0, 0.5))
        got = next_displacement_event(sc, t_ref, k)
        want = _dense_oracle(sc, t_ref, k)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-8)


# --- generators -----------------------------------------------------------


def _sweep_count(coeffs, T):
    ts = np.linspace(0.0, T, 4097)
    vals = polyval(coeffs, ts)
    dsign = np.sign(np.diff(vals))
    dsign = dsign[dsign != 0]
    return 1 + int(np.count_nonzero(dsign[1:] != dsign[:-1]))


@pytest.mark.parametrize("s", [1, 2, 3, 5])
def test_chebyshev_sweep_count(s):
    sc = gen_chebyshev(s, 2)
    assert _sweep_count(sc.points[0].coeffs[0], 1.0) == s


def test_chebyshev_single_stationary_point_at_half():
    sc = gen_chebyshev(1, 2)
    assert sc.n == 2
    assert sc.points[1].at(0.5)[0] == pytest.approx(0.5)
    vals = [sc.points[0].at(t)[0] for t in np.linspace(0, 1, 101)]
    assert min(vals) == pytest.approx(0.0, abs=1e-12)
    assert max(vals) == pytest.approx(1.0, abs=1e-12)


def test_chebyshev_is_unit_normalized():
    assert gen_chebyshev(4, 7).is_unit_normalized()


def test_rational_bumps_peak_value():
    sc = gen_rational_bumps(8, 4)
    # mover i=1 has sweeps centered at 20, 30, 40
    assert sc.points[0].at(20.0)[0] == pytest.approx(1.0, abs=1e-3)


def test_rational_bumps_far_field_bound():
    sc = gen_rational_bumps(8, 4)
    # at t=0 every bump center of mover 1 is >= 10*j+20 >= 20 away... t far
    # from all centers by >= 10 keeps each term below 1/10^4
    val = sc.points[0].at(0.0)[0]
    assert val <= (8 / 4 + 1) / 10**4


def test_rational_bumps_first_sweep_center():
    sc = gen_rational_bumps(8, 6)
    mover = sc.points[0]  # i = 1
    ts = np.linspace(15.0, 25.0, 2001)
    vals = np.array([mover.at(float(t))[0] for t in ts])
    # the clamped peak is a small plateau; its center sits at t = 20
    plateau = ts[vals >= vals.max() - 1e-9]
    assert 0.5 * (plateau[0] + plateau[-1]) == pytest.approx(20.0, abs=0.01)


def test_rational_bumps_parameter_errors():
    with pytest.raises(ParameterError):
        gen_rational_bumps(6, 4)  # degree not divisible by 4
    with pytest.raises(ParameterError):
        gen_rational_bumps(8, 5)  # odd count


def test_circle_even_spread_at_mid():
    sc = gen_circle(16)
    pos = sc.positions(sc.meta["t_mid"])
    angles = np.sort(np.arctan2(pos[:, 1], pos[:, 0]))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
    np.testing.assert_allclose(gaps, 2 * math.pi / 16, atol=1e-9)


def test_circle_farthest_pair_near_diameter():
    sc = gen_circle(16)
    pos = sc.positions(0.5)
    d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=2)
    assert d.max() == pytest.approx(2.0, rel=0.02)


def test_circle_emst_at_mid_pinned():
    sc = gen_circle(16)
    cfg = sc.config(0.5)
    expected = 15 * 2 * math.sin(math.pi / 16)
    assert tree_length(cfg, emst(cfg)) == pytest.approx(expected, abs=1e-9)


def test_circle_starts_at_short_edge():
    sc = gen_circle(8, e_len=0.05)
    pos = sc.positions(0.0)
    assert len(np.unique(np.round(pos, 9), axis=0)) == 2
    assert input_distance(sc, 0.0, 0.0) == 0.0


def test_diamond_counts_and_corners_on_grid():
    sc = gen_diamond(6)
    assert sc.n == 4 * 6 + 2
    pos = sc.positions(0.5)
    # both side corners are occupied exactly at the critical time
    left = any(np.allclose(p, [-math.sqrt(2), 0.0], atol=1e-9) for p in pos)
    right = any(np.allclose(p, [math.sqrt(2), 0.0], atol=1e-9) for p in pos)
    assert left and right


def test_diamond_connector_endpoint_to_corner_distance():
    sc = gen_diamond(4)
    p0 = sc.positions(0.0)
    e_left = p0[sc.meta["e"][0]]
    left_corner = np.array([-math.sqrt(2), 0.0])
    assert np.linalg.norm(e_left - left_corner) == pytest.approx(
        2 - math.sqrt(2) / 2, abs=1e-12
    )


def test_rational_bumps_event_detection_smoke():
    sc = gen_rational_bumps(4, 4, k=0.45)
    t1 = next_displacement_event(sc, 0.0, 0.45)
    assert t1 is not None and 0.0 < t1 <= sc.horizon
    # the first mover's first sweep is centered at t=10; displacement from
    # t=0 first reaches 0.45 on the rising flank
    assert t1 < 10.0


def test_diamond_emst_at_critical_time():
    sc = gen_diamond(6)
    cfg = sc.config(0.5)
    assert tree_length(cfg, emst(cfg)) == pytest.approx(9 - 2 * math.sqrt(2), abs=1e-9)


def test_diamond_endpoints_travel_to_bottom():
    sc = gen_diamond(4)
    e = sc.meta["e"]
    ep = sc.meta["e_prime"]
    p0 = sc.positions(0.0)
    p1 = sc.positions(1.0)
    np.testing.assert_allclose(p0[e[0]], [-0.5, math.sqrt(2) - 0.5], atol=1e-9)
    np.testing.assert_allclose(p1[ep[1]], [0.5, -math.sqrt(2) + 0.5], atol=1e-9)


def test_split_vertical_gap():
    sc = gen_split(8)
    pos = sc.positions(0.0)
    np.testing.assert_allclose(np.diff(pos[:, 1]), 1.0 / 8, atol=1e-12)


def test_split_edge_stretch_law():
    sc = gen_split(8)
    # adjacent points have opposite colors; their distance is sqrt(x^2+t^2)
    for t in (0.0, 0.3, 1.0):
        pos = sc.positions(t)
        d = np.linalg.norm(pos[0] - pos[1])
        assert d == pytest.approx(math.hypot(1.0 / 8, t), abs=1e-12)


def test_split_final_separation():
    sc = gen_split(8)
    pos = sc.positions(1.0)
    assert pos[1, 0] - pos[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_split_recolor_hook():
    sc = gen_split(6)
    sc2 = sc.with_colors([0, 0, 0, 1, 1, 1])
    pos = sc2.positions(1.0)
    assert np.all(pos[:3, 0] == -0.5) and np.all(pos[3:, 0] == 0.5)
    with pytest.raises(ParameterError):
        gen_chebyshev(2, 4).with_colors([0, 1, 0, 1])
