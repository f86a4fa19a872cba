import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocyclelab import spdspace as sp

from oracles import brute_force_meb_radius, log_midpoint

seeds = st.integers(0, 2**32 - 1)


def _set(rng, m, size, spread=1.0):
    return [sp.random_spd(rng, m, spread) for _ in range(size)]


# -- points and distance ---------------------------------------------------


def test_validation():
    with pytest.raises(sp.SpdError):
        sp.SpdPoint(np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(sp.SpdError):
        sp.SpdPoint(np.diag([1.0, 0.0]))
    with pytest.raises(sp.SpdError):
        sp.dist(1.0, np.eye(2))


def test_distance_examples():
    assert sp.dist(np.eye(2), np.eye(2)) == 0.0
    assert sp.dist(1.0, math.e**2) == pytest.approx(2.0, abs=1e-15)
    assert sp.dist(np.eye(2), np.diag([math.e, 1 / math.e])) == pytest.approx(math.sqrt(2), abs=1e-12)


@given(seed=seeds, m=st.integers(1, 3))
def test_distance_is_congruence_invariant(seed, m):
    rng = np.random.default_rng(seed)
    a, b = _set(rng, m, 2)
    l = rng.standard_normal((m, m)) + 2 * np.eye(m)
    assert sp.dist(a, b) == pytest.approx(sp.dist(b, a), abs=1e-12)
    assert sp.dist(sp.pullback(a, l), sp.pullback(b, l)) == pytest.approx(sp.dist(a, b), abs=1e-10)


def test_distance_matches_whitened_log():
    rng = np.random.default_rng(0)
    a, b = _set(rng, 3, 2)
    assert np.linalg.norm(sp.log_at(a, b)) == pytest.approx(sp.dist(a, b), abs=1e-12)


# -- geodesic and pullback -------------------------------------------------


def test_geodesic_examples():
    a = sp.SpdPoint(np.diag([2.0, 3.0]))
    assert np.allclose(sp.geodesic(a, a, 0.3).matrix, a.matrix)
    assert sp.geodesic(1.0, 4.0, 0.5).matrix[0, 0] == pytest.approx(2.0, abs=1e-15)
    mid = sp.geodesic(np.eye(2), np.diag([math.e**2] * 2), 0.5)
    assert np.allclose(mid.matrix, np.diag([math.e] * 2), atol=1e-12)


@given(seed=seeds, m=st.integers(1, 3), s=st.floats(0, 1))
def test_geodesic_is_constant_speed(seed, m, s):
    a, b = _set(np.random.default_rng(seed), m, 2)
    g = sp.geodesic(a, b, s)
    d = sp.dist(a, b)
    assert sp.dist(a, g) == pytest.approx(s * d, abs=1e-9)
    assert sp.dist(g, b) == pytest.approx((1 - s) * d, abs=1e-9)


def test_pullback_examples():
    e = sp.SpdPoint(np.diag([2.0, 5.0]))
    assert np.array_equal(sp.pullback(e, np.eye(2)).matrix, e.matrix)
    assert sp.pullback(1.0, [[3.0]]).matrix[0, 0] == 9.0
    with pytest.raises(sp.SpdError):
        sp.pullback(e, np.array([[1.0, 2.0], [2.0, 4.0]]))


# -- minimal enclosing ball ------------------------------------------------


def test_meb_examples():
    p = sp.SpdPoint(np.diag([2.0, 3.0]))
    b = sp.min_enclosing_ball([p])
    assert b.center is p and b.radius == 0.0
    b = sp.min_enclosing_ball([1.0, 4.0])
    assert b.center.matrix[0, 0] == pytest.approx(2.0, abs=1e-15)
    assert b.radius == pytest.approx(math.log(2), abs=1e-15)
    b = sp.min_enclosing_ball([np.eye(2), np.diag([math.e**2] * 2)])
    assert np.allclose(b.center.matrix, np.diag([math.e] * 2), atol=1e-9)
    # d(I, e^2 I) = ||2 I||_F = 2 sqrt(2)
    assert b.radius == pytest.approx(math.sqrt(2.0), abs=1e-9)
    with pytest.raises(sp.SpdError):
        sp.min_enclosing_ball([])


@given(seed=seeds, size=st.integers(1, 30))
def test_meb_scalar_iterative_matches_closed_form(seed, size):
    rng = np.random.default_rng(seed)
    vals = list(np.exp(rng.uniform(-3, 3, size)))
    closed = sp.min_enclosing_ball(vals)
    it = sp.min_enclosing_ball(vals, method="tangent")
    assert closed.center.matrix[0, 0] == pytest.approx(log_midpoint(vals), rel=1e-14)
    assert abs(it.center.matrix[0, 0] - closed.center.matrix[0, 0]) <= 1e-12 * closed.center.matrix[0, 0]
    assert abs(it.radius - closed.radius) <= 1e-12


@given(seed=seeds, m=st.integers(2, 3), size=st.integers(2, 12))
def test_meb_certificate(seed, m, size):
    tol = 1e-10
    pts = _set(np.random.default_rng(seed), m, size, 1.5)
    b = sp.min_enclosing_ball(pts, tol=tol)
    assert all(sp.dist(b.center, p) <= b.radius + tol for p in pts)
    assert b.gap <= tol


@given(seed=seeds)
def test_two_point_ball_is_midpoint(seed):
    a, c = _set(np.random.default_rng(seed), 2, 2)
    b = sp.min_enclosing_ball([a, c])
    assert sp.dist(b.center, sp.geodesic(a, c, 0.5)) <= 1e-8
    assert b.radius == pytest.approx(sp.dist(a, c) / 2, abs=1e-10)


@given(seed=seeds, m=st.integers(1, 3))
def test_meb_congruence_equivariant(seed, m):
    rng = np.random.default_rng(seed)
    pts = _set(rng, m, 6)
    l = rng.standard_normal((m, m)) + 2 * np.eye(m)
    c1 = sp.min_enclosing_ball([sp.pullback(p, l) for p in pts]).center
    c2 = sp.pullback(sp.min_enclosing_ball(pts).center, l)
    assert sp.dist(c1, c2) <= 1e-8


def test_meb_matches_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(3):
        pts = _set(rng, 2, 20, 1.5)
        assert abs(sp.min_enclosing_ball(pts).radius - brute_force_meb_radius(pts)) <= 1e-4


def test_farthest_point_scheme_agrees_loosely():
    pts = _set(np.random.default_rng(3), 2, 5, 1.0)
    fast = sp.min_enclosing_ball(pts)
    slow = sp.min_enclosing_ball(pts, method="farthest", tol=1e-6, max_iter=5000)
    assert slow.lower_bound <= fast.radius + 1e-9
    assert slow.radius >= fast.radius - 1e-9
    assert slow.radius - fast.radius < 1e-2


def _perturbed_pair(rng, m):
    s1 = _set(rng, m, int(rng.integers(1, 8)))
    s2 = [sp.geodesic(p, sp.random_spd(rng, m, 1.0), float(rng.uniform(0, 0.3))) for p in s1]
    s2 += _set(rng, m, int(rng.integers(0, 3)), 0.5)
    return s1, s2


@given(seed=seeds)
def test_center_is_lipschitz_on_the_line(seed):
    tol = 1e-10
    s1, s2 = _perturbed_pair(np.random.default_rng(seed), 1)
    c1 = sp.min_enclosing_ball(s1, tol=tol).center
    c2 = sp.min_enclosing_ball(s2, tol=tol).center
    assert sp.dist(c1, c2) <= sp.hausdorff(s1, s2) + 2 * tol


@settings(max_examples=40)
@given(seed=seeds, m=st.integers(1, 3))
def test_center_shift_square_root_bound(seed, m):
    tol = 1e-10
    s1, s2 = _perturbed_pair(np.random.default_rng(seed), m)
    b1 = sp.min_enclosing_ball(s1, tol=tol)
    b2 = sp.min_enclosing_ball(s2, tol=tol)
    bound = sp.center_shift_bound(b1.radius, b2.radius, sp.hausdorff(s1, s2))
    assert sp.dist(b1.center, b2.center) <= bound + 2 * tol


def test_center_not_lipschitz_in_a_flat():
    s1, s2 = sp.flat_counterexample()
    b1, b2 = sp.min_enclosing_ball(s1), sp.min_enclosing_ball(s2)
    dh = sp.hausdorff(s1, s2)
    shift = sp.dist(b1.center, b2.center)
    # both centers stay diagonal (the flat is totally geodesic and symmetric)
    assert abs(b1.center.matrix[0, 1]) < 1e-9 and abs(b2.center.matrix[0, 1]) < 1e-9
    assert shift > 2.5 * dh
    assert shift <= sp.center_shift_bound(b1.radius, b2.radius, dh)


# -- Hausdorff and perturbation bound --------------------------------------


def test_hausdorff_examples():
    s = [1.0, 2.0]
    assert sp.hausdorff(s, s) == 0.0
    assert sp.hausdorff([1.0], [math.e]) == pytest.approx(1.0, abs=1e-15)
    assert sp.hausdorff([1.0], [1.0, math.e**3]) == pytest.approx(3.0, abs=1e-14)
    with pytest.raises(sp.SpdError):
        sp.hausdorff([], [1.0])


@given(h=st.floats(-0.1, 0.1))
def test_perturbation_scalar(h):
    lhs, rhs = sp.perturbation_bound_check(1.0, [[1 + h]])
    assert lhs == pytest.approx(2 * abs(math.log1p(h)), abs=1e-15)
    assert lhs <= 2.2 * abs(h) + 1e-15
    assert rhs == pytest.approx(abs(h), abs=1e-15)


def test_perturbation_identity():
    tau = sp.SpdPoint(np.diag([0.5, 4.0]))
    assert sp.perturbation_bound_check(tau, np.eye(2))[0] == 0.0


def test_perturbation_constant_bounded():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 4))
        tau = sp.random_spd(rng, m, math.log(10))
        e = rng.standard_normal((m, m))
        l = np.eye(m) + rng.uniform(0.001, 0.1) * e / np.linalg.norm(e, 2)
        lhs, rhs = sp.perturbation_bound_check(tau, l)
        worst = max(worst, lhs / rhs)
    assert worst < 25
