import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cocyclelab import diffeo1d as d1
from cocyclelab import estimates

TWO_PI = 2 * math.pi


def sine(eps, shift=0.0):
    return d1.sine_map(eps, shift=shift)


@st.composite
def smooth_maps(draw, amplitude=0.5):
    seed = draw(st.integers(0, 2**32 - 1))
    modes = draw(st.integers(1, 4))
    return d1.random_smooth(np.random.default_rng(seed), modes=modes, amplitude=amplitude)


def test_rotation_composition():
    g = d1.compose(d1.Rotation(0.3), d1.Rotation(0.45))
    assert isinstance(g, d1.Rotation) and g.angle == pytest.approx(0.75, abs=1e-15)
    assert d1.compose(d1.Rotation(0.7), d1.Rotation(0.6)).angle == pytest.approx(0.3, abs=1e-15)


def test_identity_composition():
    g = sine(0.2, 0.1)
    assert d1.compose(g, d1.identity()) is g
    assert d1.compose(d1.identity(), g) is g


def test_moebius_composition_is_matrix_product():
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    b = np.array([[1.0, 0.5], [0.0, 1.0]])
    g = d1.compose(d1.Moebius(a), d1.Moebius(b))
    assert isinstance(g, d1.Moebius)
    np.testing.assert_allclose(g.matrix, a @ b, atol=1e-14)
    t = np.linspace(0, 1, 33)
    # lifts of a circle map are defined up to an integer
    assert d1.circle_dist(g.lift(t) - d1.Moebius(a).lift(d1.Moebius(b).lift(t))).max() < 1e-13
    # -A acts like A on lines
    assert d1.circle_dist(d1.Moebius(-a).lift(t) - d1.Moebius(a).lift(t)).max() < 1e-13


def test_moebius_matches_projective_action():
    a = np.array([[1.3, -0.4], [0.7, 0.554]])
    g = d1.Moebius(a, normalize=True)
    t = np.linspace(0, 1, 101)
    v = np.stack([np.cos(math.pi * t), np.sin(math.pi * t)])
    w = g.matrix @ v
    image = np.mod(np.arctan2(w[1], w[0]), math.pi) / math.pi
    assert d1.circle_dist(image - g(t)).max() < 1e-14
    with pytest.raises(d1.DiffeoError):
        d1.Moebius(a)


def test_moebius_classification():
    assert d1.Moebius(np.diag([1.2, 1 / 1.2])).classification == "hyperbolic"
    assert d1.Moebius(np.array([[1.0, 1.0], [0.0, 1.0]])).classification == "parabolic"
    assert d1.Rotation(0.2).as_moebius().classification == "elliptic"


def test_hyperbolic_fixed_point_multipliers():
    s = 1.2
    g = d1.Moebius(np.diag([s, 1 / s]))
    d = g.derivative(1, np.array([0.0, 0.5]))
    np.testing.assert_allclose(d, [1 / s**2, s**2], rtol=1e-14)
    assert abs(g.lift(0.0)) < 1e-15 and abs(g.lift(0.5) - 0.5) < 1e-15


def test_rotation_moebius_mixing_is_exact():
    g = d1.compose(d1.Rotation(0.25), d1.Moebius(np.diag([2.0, 0.5])))
    assert isinstance(g, d1.Moebius)
    t = np.linspace(0, 1, 17)
    assert d1.circle_dist(g.lift(t) - 0.25 - d1.Moebius(np.diag([2.0, 0.5])).lift(t)).max() < 1e-13


def test_grid_composition_against_pointwise():
    g, h = sine(0.3, 0.2), d1.Moebius(np.array([[1.5, 0.2], [0.1, 0.68]]), normalize=True)
    gh = d1.compose(g, h)
    assert isinstance(gh, d1.GridDiffeo)
    t = np.random.default_rng(0).random(200)
    assert d1.circle_dist(gh.lift(t) - g.lift(h.lift(t))).max() < 1e-12


def test_inversion_examples():
    assert d1.invert(d1.Rotation(0.3)).angle == pytest.approx(0.7, abs=1e-15)
    assert d1.invert(d1.identity()).angle == 0.0
    a = np.array([[2.0, 1.0], [1.0, 1.0]])
    np.testing.assert_allclose(d1.invert(d1.Moebius(a)).matrix @ a, np.eye(2), atol=1e-14)


@given(smooth_maps(amplitude=0.7))
def test_inversion_round_trip(g):
    gi = d1.invert(g)
    t = np.linspace(0, 1, 997)
    assert np.abs(g.lift(gi.lift(t)) - t).max() <= 1e-10
    assert np.abs(gi.lift(g.lift(t)) - t).max() <= 1e-10
    back = d1.invert(gi)
    assert np.abs(back.lift(t) - g.lift(t)).max() <= 1e-10


@given(smooth_maps(), smooth_maps(), smooth_maps())
def test_associativity(f, g, h):
    a = d1.compose(f, d1.compose(g, h))
    b = d1.compose(d1.compose(f, g), h)
    t = np.linspace(0, 1, 513)
    assert np.abs(a.lift(t) - b.lift(t)).max() <= 1e-9


def test_derivative_closed_forms():
    t = np.linspace(0, 1, 9)
    r = d1.Rotation(0.37)
    assert (r.derivative(1, t) == 1).all() and (r.derivative(2, t) == 0).all()
    g = sine(0.4)
    np.testing.assert_allclose(g.derivative(1, t), 1 + 0.4 * np.cos(TWO_PI * t), atol=1e-14)
    np.testing.assert_allclose(g.derivative(3, t), -0.4 * TWO_PI**2 * np.cos(TWO_PI * t), atol=1e-11)
    with pytest.raises(d1.DiffeoError):
        g.derivative(4, t)


def test_spectral_derivatives_match_finite_differences():
    g = d1.GridDiffeo.from_fourier(1024, 0.1, cos=(0.02, 0.005), sin=(0.01,))
    t = np.random.default_rng(3).random(64)
    h = 1e-4
    fd2 = (g.lift(t + h) - 2 * g.lift(t) + g.lift(t - h)) / h**2
    assert np.abs(fd2 - g.derivative(2, t)).max() <= 1e-6
    fd1 = (g.lift(t + h) - g.lift(t - h)) / (2 * h)
    assert np.abs(fd1 - g.derivative(1, t)).max() <= 1e-6


def test_moebius_derivatives_match_spectral():
    g = d1.Moebius(np.array([[2.0, 1.0], [1.0, 1.0]]))
    grid = g.to_grid(4096)
    t = np.random.default_rng(4).random(40)
    for order in (1, 2, 3):
        scale = np.abs(g.derivative(order, t)).max()
        assert np.abs(grid.derivative(order, t) - g.derivative(order, t)).max() <= 1e-8 * scale


def test_derivative_floor_is_enforced():
    with pytest.raises(d1.CompositionError):
        d1.GridDiffeo(-0.9999995 * np.sin(TWO_PI * d1.uniform_grid(64)) / TWO_PI)


def test_norm_report_identity():
    rep = d1.norm_report(d1.identity(), 1.5)
    assert rep.sup_displacement == 0 and rep.deriv_sups == (1.0,) and rep.holder_seminorm == 0
    assert rep.one_sided == 1.0 and rep.two_sided == 2.0


@pytest.mark.parametrize("a", [0.1, 0.3, 0.8])
def test_norm_report_rotation(a):
    rep = d1.norm_report(d1.Rotation(a), 1.4)
    assert rep.one_sided == pytest.approx(min(a, 1 - a) + 1, abs=1e-15)
    assert rep.holder_seminorm == 0
    grid = d1.norm_report(d1.Rotation(a).to_grid(), 1.4)
    assert grid.one_sided == pytest.approx(rep.one_sided, abs=1e-12)
    assert grid.holder_seminorm <= 1e-10


def test_norm_report_sine_refinement():
    g = sine(0.1)
    for r, rel in ((2.0, 1e-4), (1.5, 1e-3), (2.5, 1e-3), (0.5, 1e-3)):
        coarse = d1.norm_report(g, r, n_eval=4096)
        fine = d1.norm_report(g, r, n_eval=16384)
        assert coarse.one_sided == pytest.approx(fine.one_sided, rel=rel)
        assert coarse.two_sided == pytest.approx(fine.two_sided, rel=rel)
        assert coarse.two_sided >= coarse.one_sided >= 0
    rep = d1.norm_report(g, 2.0)
    # closed form: disp 0.1/(2 pi), |Dg| <= 1.1, |D^2 g| = 0.2 pi
    assert rep.sup_displacement == pytest.approx(0.1 / TWO_PI, rel=1e-12)
    assert rep.deriv_sups == pytest.approx((1.1, 0.2 * math.pi), rel=1e-12)


def test_holder_seminorm_closed_form():
    # |t|-like tent: on the grid the alpha=1 seminorm of a piecewise linear function is its slope
    n = 1024
    t = d1.uniform_grid(n)
    tent = np.minimum(t, 1 - t)
    assert d1.holder_seminorm(tent, 1.0 - 1e-9, 0.25) == pytest.approx(1.0, rel=1e-6)
    assert d1.holder_seminorm(tent, 0.0) == 0.0
    # sqrt cusp at 0: the 1/2-seminorm is attained at the cusp and equals 1
    cusp = np.sqrt(np.minimum(t, 1 - t))
    assert d1.holder_seminorm(cusp, 0.5, 0.25) == pytest.approx(1.0, rel=1e-9)


def test_dist_cr_examples():
    g = sine(0.2, 0.4)
    assert d1.dist_cr(g, g, 1.5) == 0.0
    assert d1.dist_cr(d1.Rotation(0.30), d1.Rotation(0.32), 1) == pytest.approx(0.04, abs=1e-14)
    assert d1.dist_cr(d1.Rotation(0.30).to_grid(), d1.Rotation(0.32).to_grid(), 1) == pytest.approx(0.04, abs=1e-12)
    assert d1.dist_cr(d1.Rotation(0.99), d1.Rotation(0.01), 1.25) == pytest.approx(0.04, abs=1e-12)
    with pytest.raises(d1.FarApartError):
        d1.dist_cr(sine(0.1), sine(0.1, 0.5), 1)


def test_dist_cr_triangle_inequality():
    rng = np.random.default_rng(5)
    for _ in range(100):
        base = d1.random_smooth(rng, modes=2, amplitude=0.4)
        maps = []
        for _ in range(3):
            bump = d1.random_smooth(rng, modes=2, amplitude=0.05)
            maps.append(d1.GridDiffeo(base.displacement + 0.1 * (bump.displacement - bump.displacement.mean())))
        f, g, h = maps
        r = float(rng.choice([1.0, 1.25, 1.5]))
        fg, gh, fh = d1.dist_cr(f, g, r, n_eval=1024), d1.dist_cr(g, h, r, n_eval=1024), d1.dist_cr(f, h, r, n_eval=1024)
        assert fh <= fg + gh + 1e-12
        assert fg == pytest.approx(d1.dist_cr(g, f, r, n_eval=1024), abs=1e-12)


def test_dist_c0_and_sup_distance():
    assert d1.sup_distance(d1.Rotation(0.95), d1.Rotation(0.05)) == pytest.approx(0.1, abs=1e-12)
    assert d1.dist_c0(d1.Rotation(0.2), d1.Rotation(0.3)) == pytest.approx(0.2, abs=1e-12)


def test_fit_inequality_constant():
    assert d1.fit_inequality_constant([(1, 2), (3, 2)]) == 1.5
    assert d1.fit_inequality_constant([(0, 1), (0, 5)]) == 0
    with pytest.raises(ValueError):
        d1.fit_inequality_constant([])
    with pytest.raises(ValueError):
        d1.fit_inequality_constant([(1, 0)])


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 2.5])
def test_composition_norm_constant_is_grid_stable(r):
    coarse = estimates.composition_norm_suite(r, 200, n_eval=1024)
    fine = estimates.composition_norm_suite(r, 200, n_eval=4096)
    assert math.isfinite(fine.constant) and fine.constant > 0
    assert abs(coarse.constant / fine.constant - 1) < 0.05


def test_conjugated_difference_estimate():
    q, r = 1.5, 1.25
    coarse = estimates.conjugated_difference_suite(q, r, n_triples=15, n_eval=1024)
    fine = estimates.conjugated_difference_suite(q, r, n_triples=15, n_eval=4096)
    assert math.isfinite(fine.constant)
    assert abs(coarse.constant / fine.constant - 1) < 0.05
    assert fine.exponent >= (q - r) - 0.05


def test_far_norm_estimate():
    fit = estimates.far_norm_suite(1.25, n_pairs=40)
    assert math.isfinite(fit.constant) and fit.constant >= 0
