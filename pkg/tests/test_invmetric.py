import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab import cocycle as cc
from cocyclelab import diffeo1d as d1
from cocyclelab import families as fam
from cocyclelab import invmetric as im
from cocyclelab import sft
from cocyclelab import spdspace as sp

from oracles import conjugated_log_pullback, half_turn_log_tau, half_turn_metric

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def half(full2):
    return fam.f3_series(full2, half_turn=True)


@pytest.fixture(scope="module")
def f3(full2):
    return fam.f3_conjugated(full2)


@pytest.fixture(scope="module")
def half_field(half, full2):
    pts, prov = im.field_samples(full2, 6, seed=3, periodic_max=3)
    return im.build_field(half, pts, prov, n_grid=1024, k=40)


def _points(space, count, seed=1):
    return sft.sample(sft.parry_measure(space), seed=seed, count=count)


# -- pullback sets and tau_hat ---------------------------------------------


def test_rotation_pullbacks_are_one(full2):
    c = fam.f1_constant_rotation(full2)
    x = _points(full2, 1)[0]
    assert all(p.matrix[0, 0] == 1.0 for p in im.orbit_pullbacks(c, x, 0.3, k=12))
    assert im.tau_hat(c, x, 0.7, k=12).matrix[0, 0] == 1.0


def test_zero_horizon_is_reference(f3):
    x = _points(f3.base, 1)[0]
    assert [p.matrix[0, 0] for p in im.orbit_pullbacks(f3, x, 0.2, k=0)] == [1.0]
    ref = lambda p, s: np.full_like(s, 2.5)
    rows = im.orbit_pullbacks(f3, x, 0.2, k=0, tau_ref=ref)
    assert rows[0].matrix[0, 0] == pytest.approx(2.5, rel=1e-15)


def test_single_value_set_is_its_own_center():
    assert sp.min_enclosing_ball([sp.SpdPoint.scalar(3.0**2)]).center.matrix[0, 0] == 9.0


def test_conjugated_pullbacks_match_chain_rule(f3, golden):
    t = np.linspace(0, 1, 17, endpoint=False)
    for c in (f3, fam.f3_conjugated(golden)):
        for x in _points(c.base, 3):
            rows = im.orbit_log_pullbacks(c, x, t, k=8)
            for n in range(-8, 9):
                assert np.abs(rows[n + 8] - conjugated_log_pullback(c, x, t, n)).max() <= 1e-9


def test_tau_hat_is_the_spd_ball_center(f3):
    x = _points(f3.base, 1)[0]
    for t in (0.1, 0.55):
        ball = im.tau_hat(f3, x, t, k=10).matrix[0, 0]
        assert math.log(ball) == pytest.approx(im.log_tau_hat(f3, x, [t], k=10)[0], abs=1e-12)


def test_half_turn_tau_matches_closed_form(half):
    t = d1.uniform_grid(256)
    pts, _ = im.field_samples(half.base, 5, seed=2, periodic_max=3)
    for x in pts:
        for k in (0, 1, 40):
            assert np.abs(im.log_tau_hat(half, x, t, k) - half_turn_log_tau(half, x, t, k)).max() <= 1e-10


def test_half_turn_cauchy_in_horizon(half):
    t = d1.uniform_grid(128)
    for x in _points(half.base, 4):
        assert np.abs(im.log_tau_hat(half, x, t, 30) - im.log_tau_hat(half, x, t, 60)).max() <= 1e-6


def test_generic_angles_stabilize_with_horizon(f3):
    t = d1.uniform_grid(64)
    pts = sft.sample(sft.parry_measure(f3.base), seed=5, count=6, radius=200)
    gaps = []
    for k in (10, 20, 40, 80):
        gaps.append(max(float(np.abs(im.log_tau_hat(f3, x, t, k) - im.log_tau_hat(f3, x, t, 2 * k)).max())
                        for x in pts))
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.5 * gaps[0]


# -- invariance --------------------------------------------------------------


def test_window_bookkeeping_identity(f3):
    t = np.linspace(0, 1, 33, endpoint=False)
    for x in _points(f3.base, 3):
        a = f3.gen.value(x)
        at_image = im.log_tau_hat(f3, sft.shift(x, 1), a.lift(t), 15)
        shifted = im.log_tau_hat(f3, x, t, window=(-14, 16)) - 2.0 * np.log(a.derivative(1, t))
        # exact up to rounding accumulated over ~30 chain-rule steps
        assert np.abs(at_image - shifted).max() <= 1e-11


def test_rotation_invariance_exact(full2):
    c = fam.f1_constant_rotation(full2)
    x = _points(full2, 1)[0]
    assert im.invariance_defect(c, x, d1.uniform_grid(32), 10).value == 0.0


def test_half_turn_invariance(half):
    t = d1.uniform_grid(256)
    for x in _points(half.base, 4):
        d = im.invariance_defect(half, x, t, 40)
        assert d.value <= 1e-10


@settings(max_examples=15)
@given(seed=seeds, which=st.sampled_from(["F3", "F4"]), k=st.integers(1, 20))
def test_invariance_defect_within_window_gap(full2, seed, which, k):
    c = fam.f3_conjugated(full2) if which == "F3" else fam.f4_series_angle(full2)
    x = sft.random_point(full2, np.random.default_rng(seed), radius=30)
    assert im.invariance_defect(c, x, d1.uniform_grid(32), k).ok


def test_hyperbolic_defect_does_not_decay(full2):
    c = fam.f5_hyperbolic(full2)
    x = _points(full2, 1)[0]
    prof = im.invariance_profile(c, x, d1.uniform_grid(32), (5, 10, 20))
    assert not im.decays(prof)
    assert prof[-1].value > 0.1


def test_closed_form_metric_is_invariant(half, f3):
    t = d1.uniform_grid(512)
    for c in (half, f3):
        for x in _points(c.base, 4):
            a = c.gen.value(x)
            lhs = half_turn_metric(c, sft.shift(x, 1), a.lift(t)) * a.derivative(1, t) ** 2
            assert np.abs(np.log(lhs / half_turn_metric(c, x, t))).max() <= 1e-10


# -- field, fiber continuity -------------------------------------------------


def test_field_json_round_trip(half_field, full2):
    back = im.MetricField.from_json(half_field.to_json(), full2)
    assert back.base_samples == half_field.base_samples
    assert np.array_equal(back.log_values, half_field.log_values)
    assert back.to_json() == half_field.to_json()
    assert half_field.log_bound < 2.0


def test_field_rejects_bad_values(full2):
    x = _points(full2, 1)[0]
    with pytest.raises(im.InvMetricError):
        im.MetricField((x,), ("p",), d1.uniform_grid(4), np.array([[0.0, np.nan, 0.0, 0.0]]), 1)
    with pytest.raises(im.InvMetricError):
        im.MetricField((x,), ("p",), d1.uniform_grid(4), np.zeros((2, 4)), 1)


def test_field_parallel_matches_serial(half):
    pts, prov = im.field_samples(half.base, 3, seed=4, periodic_max=2)
    a = im.build_field(half, pts, prov, n_grid=64, k=10)
    b = im.build_field(half, pts, prov, n_grid=64, k=10, jobs=2)
    assert a.to_json() == b.to_json()


def test_fiber_holder(full2, half, half_field):
    pts, prov = im.field_samples(full2, 3, seed=0, periodic_max=2)
    flat = im.fiber_holder_check(im.build_field(fam.f1_constant_rotation(full2), pts, prov, 256, 10))
    assert flat.exact and flat.exponent == math.inf
    fit = im.fiber_holder_check(half_field)
    assert fit.exponent >= 0.9
    coarse = im.fiber_holder_check(im.build_field(half, pts, prov, 512, 40))
    fine = im.fiber_holder_check(im.build_field(half, pts, prov, 2048, 40))
    assert abs(coarse.constant / fine.constant - 1) < 0.1
    assert abs(coarse.holder_constant / fine.holder_constant - 1) < 0.1


def test_fiber_holder_needs_grid_offsets(half, full2):
    pts, prov = im.field_samples(full2, 1, seed=0, periodic_max=0)
    with pytest.raises(im.InvMetricError):
        im.fiber_holder_check(im.build_field(half, pts, prov, 100, 5))


# -- holonomy invariance and base continuity ---------------------------------


def test_holonomy_isometry(half, half_field, full2):
    x = half_field.base_samples[0]
    assert im.holonomy_isometry_defect(half, x, x, half_field).value <= 1e-12
    rng = np.random.default_rng(7)
    for side, perturb in (("stable", sft.perturb_past), ("unstable", sft.perturb_future)):
        y = perturb(x, 3, rng)
        d = im.holonomy_isometry_defect(half, x, y, half_field, side)
        assert d.value <= 1e-3 and d.ok
    rot = fam.f1_constant_rotation(full2)
    fld = im.build_field(rot, [x], None, 64, 10)
    assert im.holonomy_isometry_defect(rot, x, sft.perturb_past(x, 2, rng), fld).value == 0.0


def test_base_holder_rotation_flat(full2):
    c = fam.f1_constant_rotation(full2)
    pts, prov = im.field_samples(full2, 2, seed=0, periodic_max=0)
    fld = im.build_field(c, pts, prov, 64, 10)
    for kind in ("stable", "unstable", "bracket"):
        fit = im.base_holder_check(c, fld, kind, n_base=2)
        assert fit.exact and all(v == 0.0 for _, v in fit.samples)


def test_base_holder_half_turn(half, half_field):
    er = half.beta * half.rho
    for kind in ("stable", "unstable"):
        fit = im.base_holder_check(half, half_field, kind, n_base=2)
        dists = [dx for dx, _ in fit.samples]
        assert max(dists) / min(dists) >= 1e3
        assert fit.exponent >= 0.9 * er
    br = im.base_holder_check(half, half_field, "bracket", n_base=2)
    assert br.exponent >= 0.9 * er
    assert br.bracket_ratio <= 3.0


def test_base_holder_bad_kind(half, half_field):
    with pytest.raises(im.InvMetricError):
        im.base_holder_check(half, half_field, "diagonal")


def test_metric_distance():
    a = np.zeros(16)
    assert im.metric_distance(a, a) == 0.0
    assert im.metric_distance(a, a + 0.3) == pytest.approx(0.3)


# -- verdict -----------------------------------------------------------------

SMALL = im.VerdictConfig(n_parry=4, periodic_max=3, n_grid=256, base_pairs=1, depths=tuple(range(1, 12)),
                         holonomy_pairs=1)


def test_verdict_rotation_pass(full2):
    rep = im.theorem13_verdict(fam.f1_constant_rotation(full2), SMALL)
    assert rep["verdict"] == "PASS"
    assert rep["checks"][0]["value"] <= 1e-10
    for ch in rep["checks"]:
        if ch["name"].startswith("holonomy"):
            assert ch["value"] <= 1e-10


def test_verdict_half_turn_pass(half):
    rep = im.theorem13_verdict(half, SMALL)
    assert rep["verdict"] == "PASS", im.verdict_table(rep)
    assert all(ch["invariant"].startswith("invmetric.") for ch in rep["checks"])


def test_verdict_hyperbolic_not_applicable(full2):
    rep = im.theorem13_verdict(fam.f5_hyperbolic(full2), SMALL)
    assert rep["verdict"] == "NOT-APPLICABLE"
    assert not rep["gate"]["bounded"]
    assert "NOT-APPLICABLE" in im.verdict_table(rep)


def test_verdict_generic_angles_fail_at_short_horizon(f3):
    # equidistributed angles: the orbit-set extremes close in like k^-2, so k = 40 leaves ~1e-2
    rep = im.theorem13_verdict(f3, SMALL)
    assert rep["verdict"] == "FAIL"
    iso = rep["checks"][0]
    assert iso["name"] == "isometry" and not iso["pass"] and iso["value"] < 0.1
