import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cocyclelab import sft

FULL2 = sft.SftSpace.full_shift(2, 0.5)
GOLDEN = sft.SftSpace.golden_mean(0.5)
THREE = sft.SftSpace(((1, 1, 0), (0, 1, 1), (1, 0, 1)), 0.5)
SPACES = [FULL2, GOLDEN, THREE, sft.SftSpace.full_shift(3, 0.3)]


def brute_symbol(space, left, core, start, right, i):
    # direct index arithmetic on the raw, non-canonical representation
    if i < start:
        return left[(i - start) % len(left)]
    if i >= start + len(core):
        return right[(i - start - len(core)) % len(right)]
    return core[i - start]


@st.composite
def points(draw, space=None):
    space = space or draw(st.sampled_from(SPACES))
    seed = draw(st.integers(0, 2**32 - 1))
    radius = draw(st.integers(1, 10))
    return sft.random_point(space, np.random.default_rng(seed), radius)


@st.composite
def triples(draw):
    space = draw(st.sampled_from(SPACES))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    x = sft.random_point(space, rng, 6)
    out = [x]
    for _ in range(2):
        depth = int(rng.integers(1, 8))
        y = sft.perturb_past(x, depth, rng) if rng.random() < 0.5 else sft.perturb_future(x, depth, rng)
        out.append(y if rng.random() < 0.8 else sft.random_point(space, rng, 6))
    return out


def test_space_validation():
    with pytest.raises(sft.SftError):
        sft.SftSpace(((1, 1), (0, 0)), 0.5)
    with pytest.raises(sft.NotMixingError):
        sft.SftSpace(((0, 1), (1, 0)), 0.5)
    with pytest.raises(sft.SftError):
        sft.SftSpace(((1, 1), (1, 1)), 1.0)
    assert FULL2.mixing_power == 1
    assert GOLDEN.mixing_power == 2


def test_shift_examples():
    x = FULL2.point((0,), (0, 1), 0, (0,))
    assert sft.shift(x, 0) == x
    zero = FULL2.periodic_point((0,))
    assert sft.shift(zero, 5) == zero
    y = sft.shift(x, 1)
    assert y.symbol_at(-1) == 0 and y.symbol_at(0) == 1 and y.symbol_at(1) == 0


@given(points(), st.integers(-20, 20), st.integers(-20, 20))
def test_shift_is_a_group_action(x, a, b):
    assert sft.shift(sft.shift(x, a), b) == sft.shift(x, a + b)
    y = sft.shift(x, a)
    for i in range(-30, 31):
        assert y.symbol_at(i) == x.symbol_at(i + a)


@given(points())
def test_canonical_form_matches_raw(x):
    for i in range(-40, 41):
        assert x.symbol_at(i) == brute_symbol(x.space, x.left_period, x.core, x.core_start, x.right_period, i)
        assert x.space.allowed(x.symbol_at(i), x.symbol_at(i + 1))
    assert sft.parse_point(x.space, x.serialize()) == x


def test_canonical_representation_is_unique():
    a = FULL2.point((0, 1), (0, 1, 1), -4, (1,))
    b = FULL2.point((0, 1), (), -2, (1, 1))
    assert a == b
    assert (a.left_period, a.core, a.core_start, a.right_period) == ((1, 0), (), -3, (1,))
    assert FULL2.point((0, 1, 0, 1), (), 3, (0, 1)) == FULL2.periodic_point((1, 0))


def test_metric_examples():
    zero = FULL2.periodic_point((0,))
    assert sft.metric(zero, zero) == 0.0
    y = FULL2.point((0,), (1,), 2, (0,))
    assert sft.metric(zero, y) == 0.25
    z = FULL2.point((0,), (1,), -3, (0,))
    assert sft.metric(zero, z) == 0.125
    with pytest.raises(sft.SftError):
        sft.metric(zero, GOLDEN.periodic_point((0,)))


@given(triples())
def test_metric_is_an_ultrametric(xyz):
    x, y, z = xyz
    dxy, dyz, dxz = sft.metric(x, y), sft.metric(y, z), sft.metric(x, z)
    assert dxy == sft.metric(y, x)
    assert (dxy == 0.0) == (x == y)
    assert dxz <= max(dxy, dyz)


def test_bracket_examples():
    x = FULL2.periodic_point((0,))
    assert sft.bracket(x, x) == x
    z = FULL2.point((1,), (), 0, (0,))
    assert sft.bracket(x, z) == z
    x2 = FULL2.point((0,), (1,), 1, (0,))
    z2 = FULL2.point((0,), (1,), -1, (0,))
    y = sft.bracket(x2, z2)
    assert y.symbol_at(1) == 1 and y.symbol_at(-1) == 1
    with pytest.raises(sft.BracketUndefinedError):
        sft.bracket(FULL2.periodic_point((0,)), FULL2.periodic_point((1,)))


@given(triples())
def test_bracket_laws(xyz):
    x, _, z = xyz
    if x.symbol_at(0) != z.symbol_at(0):
        return
    y = sft.bracket(x, z)
    for i in range(0, 30):
        assert y.symbol_at(i) == x.symbol_at(i)
        assert y.symbol_at(-i) == z.symbol_at(-i)
    assert sft.in_local_stable(x, y) and sft.in_local_unstable(z, y)
    assert sft.bracket(x, y) == y
    assert sft.bracket(x, x) == x


def test_contraction_examples():
    x = FULL2.periodic_point((0,))
    assert sft.stable_contraction_check(x, x, 7) == 0.0
    y = FULL2.point((0,), (1,), -1, (0,))
    assert sft.metric(x, y) == 0.5
    assert sft.stable_contraction_check(x, y, 3) == 1 / 16
    assert sft.stable_contraction_check(x, y, 3) == 0.5**3 * sft.metric(x, y)
    u = FULL2.point((0,), (1,), 1, (0,))
    assert sft.stable_contraction_check(x, u, 3, unstable=True) == 1 / 16
    with pytest.raises(sft.SftError):
        sft.stable_contraction_check(x, u, 1)


@given(points(), st.integers(1, 12), st.integers(0, 25), st.integers(0, 2**32 - 1))
def test_exact_leaf_scaling(x, depth, n, seed):
    rng = np.random.default_rng(seed)
    lam = x.space.lam
    y = sft.perturb_past(x, depth, rng)
    d = sft.first_difference(x, y)
    assert d >= depth and sft.in_local_stable(x, y)
    assert sft.first_difference(sft.shift(x, n), sft.shift(y, n)) == d + n
    assert sft.stable_contraction_check(x, y, n) == lam ** (d + n)
    u = sft.perturb_future(x, depth, rng)
    d = sft.first_difference(x, u)
    assert d >= depth and sft.in_local_unstable(x, u)
    assert sft.stable_contraction_check(x, u, n, unstable=True) == lam ** (d + n)
    if lam == 0.5:
        assert sft.stable_contraction_check(x, u, n, unstable=True) == lam**n * sft.metric(x, u)


def test_closing_examples():
    p = FULL2.periodic_point((0, 1, 1, 0))
    assert sft.closing(p, 4) == p
    # x and f^4 x first disagree at index 3, so d(x, f^4 x) = 1/8
    x = FULL2.point((0,), (1, 0, 1, 1) * 2 + (1, 0, 1), -4, (0,))
    assert sft.metric(x, sft.shift(x, 4)) == 1 / 8
    p = sft.closing(x, 4)
    assert p == FULL2.periodic_point(x.window(0, 3))
    assert sft.closing_defect(x, p, 4) <= sft.metric(x, sft.shift(x, 4))
    g = GOLDEN.from_window((0, 1, 0, 0, 1, 0), 0)
    pg = sft.closing(g, 3)
    assert pg == GOLDEN.periodic_point((0, 1, 0))
    with pytest.raises(sft.NoShadowingError):
        sft.closing(GOLDEN.from_window((0, 1, 0, 1), 0), 3)


def test_closing_bound_randomized():
    rng = np.random.default_rng(8)
    done = 0
    while done < 500:
        space = SPACES[done % len(SPACES)]
        x = sft.random_point(space, rng, int(rng.integers(2, 12)))
        k = int(rng.integers(1, 10))
        if x.symbol_at(k) != x.symbol_at(0):
            continue
        p = sft.closing(x, k)
        assert sft.shift(p, k) == p
        assert sft.closing_defect(x, p, k) <= sft.metric(x, sft.shift(x, k))
        done += 1


def test_periodic_point_examples():
    fixed = sft.periodic_points(FULL2, 1)
    assert {p for p, _ in fixed} == {FULL2.periodic_point((0,)), FULL2.periodic_point((1,))}
    assert len(sft.fixed_points_of_power(FULL2, 3)) == 8
    assert sft.trace_count(GOLDEN, 4) == 7
    assert len(sft.fixed_points_of_power(GOLDEN, 4)) == 7
    with pytest.raises(sft.BudgetExceededError):
        sft.periodic_points(sft.SftSpace.full_shift(3), 12, budget=1000)


@pytest.mark.parametrize("space", [FULL2, GOLDEN, THREE], ids=["full2", "golden", "three"])
def test_periodic_counts_match_traces(space):
    # oracle: trace of M^k by repeated integer multiplication
    m = np.array(space.transition, dtype=object)
    power = np.identity(len(m), dtype=object)
    for k in range(1, 9):
        power = power.dot(m)
        expected = sum(power[i, i] for i in range(len(m)))
        pts = sft.fixed_points_of_power(space, k)
        assert len(set(pts)) == len(pts) == expected
        assert all(sft.shift(p, k) == p for p in pts)
    by_period = sft.periodic_points(space, 6)
    for p, k in by_period:
        assert sft.shift(p, k) == p and all(sft.shift(p, j) != p for j in range(1, k))


@pytest.mark.parametrize("space", [FULL2, GOLDEN, THREE], ids=["full2", "golden", "three"])
@pytest.mark.parametrize("depth", [0, 1, 2])
def test_dense_orbit_visits_every_cylinder(space, depth):
    x = sft.dense_orbit_point(space, depth)
    length = 2 * depth + 1
    wanted = set(space.words(length))
    seen = sft.cylinders_visited(x, depth, len(x.core) + x.core_start + 2 * length)
    assert wanted <= seen
    if space is FULL2 and depth == 1:
        assert len(wanted) == 8
    if space is GOLDEN:
        assert all((1, 1) != w[i : i + 2] for w in wanted for i in range(length - 1))


def test_connecting_words_are_shortest():
    for a in range(2):
        for b in range(2):
            w = GOLDEN.connecting_word(a, b)
            assert GOLDEN.admissible((a, *w, b))
            assert len(w) <= GOLDEN.mixing_power


def test_parry_full_shift():
    mu = sft.parry_measure(FULL2)
    assert mu.perron_root == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(mu.stationary, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(mu.kernel, 0.5, atol=1e-12)
    assert mu.cylinder((0, 1)) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("space", SPACES)
def test_parry_invariants(space):
    mu = sft.parry_measure(space)
    m = space.matrix
    assert mu.perron_root == pytest.approx(max(abs(np.linalg.eigvals(m))), rel=1e-12)
    np.testing.assert_allclose(mu.kernel.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(mu.stationary @ mu.kernel, mu.stationary, atol=1e-12)
    assert ((mu.kernel > 0) == (m == 1)).all()
    assert (mu.stationary > 0).all()
    # every admissible word of length n has measure in [C^-1, C] * rho^-n
    for w in space.words(6):
        assert mu.cylinder(w) * mu.perron_root**6 == pytest.approx(mu.cylinder(w) * mu.perron_root**6)
        assert 0.0 < mu.cylinder(w)


def test_parry_golden_ratio():
    mu = sft.parry_measure(GOLDEN)
    phi = (1 + math.sqrt(5)) / 2
    assert mu.perron_root == pytest.approx(phi, abs=1e-12)
    # closed form: pi = (phi^2, 1) / (1 + phi^2)
    np.testing.assert_allclose(mu.stationary, np.array([phi**2, 1.0]) / (1 + phi**2), atol=1e-12)


def test_parry_monte_carlo():
    count = 100_000
    mu = sft.parry_measure(GOLDEN)
    w = sft.sample_words(mu, 1234, count, -3, 3)
    for col in range(w.shape[1]):
        freq = np.bincount(w[:, col], minlength=2) / count
        se = np.sqrt(mu.stationary * (1 - mu.stationary) / count)
        assert (np.abs(freq - mu.stationary) <= 3 * se).all()
    for a in range(2):
        for b in range(2):
            target = mu.cylinder((a, b))
            freq = float(np.mean((w[:, 3] == a) & (w[:, 4] == b)))
            assert abs(freq - target) <= 3 * math.sqrt(target * (1 - target) / count) + 1e-15
            back = float(np.mean((w[:, 2] == a) & (w[:, 3] == b)))
            assert abs(back - target) <= 3 * math.sqrt(target * (1 - target) / count) + 1e-15
    assert not ((w[:, :-1] == 1) & (w[:, 1:] == 1)).any()


def test_sampling_is_deterministic():
    mu = sft.parry_measure(THREE)
    a = sft.sample(mu, 7, 20, radius=10)
    b = sft.sample(mu, 7, 20, radius=10)
    assert a == b
    assert sft.sample(mu, 8, 20, radius=10) != a
