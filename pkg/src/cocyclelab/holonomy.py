"""Stable and unstable holonomies of a cocycle.

The stable holonomy between ``x`` and ``y`` in the same local stable set is
the limit of ``H_n = (A_y^n)^{-1} o A_x^n``; the unstable one uses
``n -> -infinity``. Convergence is monitored through consecutive distances
``d_{C^r}(H_n, H_{n+1})``; a measured geometric ratio gives the truncation
bound. Before certifying, the cocycle's measured subexponential growth rate
``eps`` must satisfy ``exp(2 eps (1 + r)) lambda^(beta rho) < 1``.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import cocycle as cc
from . import diffeo1d as d1
from . import sft
from .estimates import loglog_slope


class HolonomyError(ValueError):
    pass


class NoDecayError(HolonomyError):
    """Consecutive holonomy approximations do not contract (hypotheses violated)."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


FLOOR_SCALE = 1e-14
FLOOR_MIN = 1e-10  # composition rounding measured at ~3e-11 independently of the grid
RATIO_RUN = 5
NO_DECAY_WINDOW = 10


@dataclass
class HolonomyResult:
    map: d1.CircleMap = field(repr=False)
    inverse: d1.CircleMap = field(repr=False)
    n_used: int
    consecutive_dists: list[float]
    theta_hat: float
    tail_bound: float
    converged: bool
    exact: bool
    side: str
    eps: float
    theta_star: float
    partial: list[tuple[int, float]] = field(default_factory=list, repr=False)
    floor: float = 0.0
    envelope_bound: float = 0.0

    @property
    def error_bound(self) -> float:
        """The larger of ``tail_bound`` and the envelope estimate."""
        return max(self.tail_bound, self.envelope_bound)

    def ratios(self) -> list[float]:
        """Consecutive-term ratios among distances above the rounding floor."""
        d = [v for v in self.consecutive_dists if v > self.floor]
        return [b / a for a, b in zip(d, d[1:])]

    def decay_ok(self, transient: int = 5, mode: str = "step") -> bool:
        """Eventually ``d_{n+1} / d_n <= theta_star``.

        ``mode='step'`` checks every ratio after ``transient``; ``mode='window'``
        checks the geometric mean of each run of ``RATIO_RUN`` ratios instead,
        which absorbs symbol-dependent constants in front of the geometric rate.
        """
        rat = self.ratios()[transient:]
        if not rat:
            return True
        if mode == "step":
            return max(rat) <= self.theta_star
        if mode == "window":
            if len(rat) < RATIO_RUN:
                return math.exp(sum(math.log(v) for v in rat) / len(rat)) <= self.theta_star
            logs = [math.log(v) for v in rat]
            means = [sum(logs[i : i + RATIO_RUN]) / RATIO_RUN for i in range(len(logs) - RATIO_RUN + 1)]
            return math.exp(max(means)) <= self.theta_star
        raise HolonomyError(f"unknown mode {mode!r}")


def noise_floor(r: float, n_eval: int) -> float:
    """Rounding level of a C^r distance between grid maps: spectral derivatives amplify by ~n^r."""
    return max(FLOOR_MIN, FLOOR_SCALE * float(n_eval) ** r)


def stalled(dists: Sequence[float], floor: float, window: int = NO_DECAY_WINDOW) -> bool:
    """True when none of the last ``window`` distances is below the one ``window`` steps back."""
    if len(dists) <= window or dists[-1] <= floor:
        return False
    tail = dists[-window - 1 :]
    return min(tail[1:]) >= tail[0]


# ---------------------------------------------------------------------------
# growth gate


@functools.lru_cache(maxsize=64)
def _eps_for(c: cc.Cocycle, n: int, n_eval: int) -> float:
    probes = [sft.dense_orbit_point(c.base, 1)]
    eps = 0.0
    for x in probes:
        seq = cc.norm_sequence(c, x, n, c.q, n_eval=n_eval)
        eps = max(eps, cc.measured_eps(seq, n))
    return eps


def measured_growth(c: cc.Cocycle, n: int = 24, n_eval: int = 1024) -> float:
    """Empirical eps in ``|A_x^n|_{C^q} <= K e^{eps |n|}`` along a dense orbit."""
    return _eps_for(c, n, n_eval)


def smallness_factor(c: cc.Cocycle, r: float, eps: float) -> float:
    """``exp(2 eps (1 + r)) lambda^(beta rho)`` (must be < 1)."""
    return math.exp(2 * eps * (1 + r)) * c.lam ** (c.beta * (c.q - r))


def contraction_ratio(c: cc.Cocycle, r: float, eps: float) -> float:
    """``lambda^(beta rho) exp(eps (1 + r))``: the predicted decay rate of consecutive terms."""
    return c.lam ** (c.beta * (c.q - r)) * math.exp(eps * (1 + r))


# ---------------------------------------------------------------------------
# the limit


def _holonomy(c: cc.Cocycle, x, y, r, tol, n_max, side, n_eval, eps, record_partial=False) -> HolonomyResult:
    if r is None:
        r = c.r
    if not r < c.q:
        raise HolonomyError("need r < q")
    if side == "stable":
        if not sft.in_local_stable(x, y):
            raise HolonomyError("y is not in the local stable set of x")
    elif not sft.in_local_unstable(x, y):
        raise HolonomyError("y is not in the local unstable set of x")
    if eps is None:
        eps = measured_growth(c)
    factor = smallness_factor(c, r, eps)
    theta_star = contraction_ratio(c, r, eps)
    if factor >= 1:
        raise NoDecayError(
            f"growth gate failed: exp(2 eps (1+r)) lambda^(beta rho) = {factor:.4g} >= 1 with measured eps = {eps:.4g}",
            {"eps": eps, "smallness_factor": factor, "theta_star": theta_star},
        )
    backward = side == "unstable"
    ident = d1.identity()
    if x == y:
        return HolonomyResult(ident, ident, 0, [], 0.0, 0.0, True, True, side, eps, theta_star)
    settle = 3
    if c.gen.locally_constant:
        settle = max(settle, max(abs(v) for v in c.gen.window) + 2)
    floor = noise_floor(r, n_eval)
    h_prev, hi_prev = ident, ident
    dists: list[float] = []
    partial: list[tuple[int, float]] = []
    floor_run = 0
    ratio_run = 0
    theta_hat = 1.0
    steps = zip(cc.iterates(c, x, n_max, backward), cc.iterates(c, y, n_max, backward))
    for (n, ax, axi), (_, ay, ayi) in steps:
        h = d1.compose(ayi, ax)
        hi = d1.compose(axi, ay)
        try:
            d = d1.dist_cr(h_prev, h, r, n_eval=n_eval, g_inv=hi_prev, h_inv=hi)
        except d1.FarApartError as exc:
            raise NoDecayError(f"consecutive terms at n = {abs(n)} are too far apart to compare",
                               {"eps": eps, "smallness_factor": factor, "dists": dists}) from exc
        dists.append(d)
        if record_partial:
            partial.append((abs(n), d1.dist_cr(h, ident, r, n_eval=n_eval, g_inv=hi, h_inv=ident)))
        h_prev, hi_prev = h, hi
        m = len(dists)
        floor_run = floor_run + 1 if d <= floor else 0
        if m >= 2 and dists[-2] > floor and d < dists[-2]:
            ratio_run += 1
        elif d > floor:
            ratio_run = 0
        if ratio_run >= RATIO_RUN:
            recent = dists[-RATIO_RUN - 1 :]
            ratios = [b / a for a, b in zip(recent, recent[1:])]
            theta_hat = math.exp(sum(math.log(v) for v in ratios) / len(ratios))
            if d < tol * (1 - theta_hat):
                tail = d * theta_hat / (1 - theta_hat)
                # C theta^(n+1) / (1 - theta) with C fitted over the whole window, robust to a dip in the last term
                env = max(v * theta_hat ** (RATIO_RUN - j) for j, v in enumerate(recent)) * theta_hat / (1 - theta_hat)
                return HolonomyResult(h, hi, abs(n), dists, theta_hat, tail, True, False, side, eps, theta_star, partial,
                                      floor, env)
        if floor_run >= settle:
            th = theta_hat if theta_hat < 1 else 0.0
            return HolonomyResult(h, hi, abs(n), dists, th, d * th / (1 - th) if th else d, True, True,
                                  side, eps, theta_star, partial, floor)
        if stalled(dists, floor):
            raise NoDecayError(
                    f"no decrease of consecutive distances over {NO_DECAY_WINDOW} steps (n = {abs(n)})",
                    {"eps": eps, "smallness_factor": factor, "dists": dists},
                )
    tail = dists[-1] * theta_hat / (1 - theta_hat) if theta_hat < 1 else math.inf
    return HolonomyResult(h_prev, hi_prev, n_max, dists, theta_hat, tail, False, False, side, eps, theta_star, partial, floor)


def stable_holonomy(c: cc.Cocycle, x, y, r: float | None = None, tol: float = 1e-9, n_max: int = 200,
                    n_eval: int = d1.EVAL_GRID, eps: float | None = None, record_partial: bool = False) -> HolonomyResult:
    """``H^s_{x,y} = lim_{n -> +inf} (A_y^n)^{-1} o A_x^n`` for y in the local stable set of x."""
    return _holonomy(c, x, y, r, tol, n_max, "stable", n_eval, eps, record_partial)


def unstable_holonomy(c: cc.Cocycle, x, y, r: float | None = None, tol: float = 1e-9, n_max: int = 200,
                      n_eval: int = d1.EVAL_GRID, eps: float | None = None, record_partial: bool = False) -> HolonomyResult:
    """``H^u_{x,y} = lim_{n -> -inf} (A_y^n)^{-1} o A_x^n`` for y in the local unstable set of x."""
    return _holonomy(c, x, y, r, tol, n_max, "unstable", n_eval, eps, record_partial)


def holonomy(c, x, y, side: str = "stable", **kw) -> HolonomyResult:
    if side == "stable":
        return stable_holonomy(c, x, y, **kw)
    if side == "unstable":
        return unstable_holonomy(c, x, y, **kw)
    raise HolonomyError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# identities


class Defect(NamedTuple):
    value: float
    budget: float

    @property
    def ok(self) -> bool:
        return self.value <= self.budget


COMPOSITION_TOL = 1e-9


def verify_H1(c: cc.Cocycle, x, y, z, r: float | None = None, side: str = "stable", **kw) -> Defect:
    """``d_{C^r}(H_{y,z} o H_{x,y}, H_{x,z})`` with its budget (sum of error bounds + composition tolerance)."""
    r = c.r if r is None else r
    hxy = holonomy(c, x, y, side, r=r, **kw)
    hyz = holonomy(c, y, z, side, r=r, **kw)
    hxz = holonomy(c, x, z, side, r=r, **kw)
    lhs = d1.compose(hyz.map, hxy.map)
    lhs_inv = d1.compose(hxy.inverse, hyz.inverse)
    n_eval = kw.get("n_eval", d1.EVAL_GRID)
    value = d1.dist_cr(lhs, hxz.map, r, n_eval=n_eval, g_inv=lhs_inv, h_inv=hxz.inverse)
    return Defect(value, hxy.error_bound + hyz.error_bound + hxz.error_bound + COMPOSITION_TOL)


def verify_H2(c: cc.Cocycle, x, y, n: int, r: float | None = None, side: str = "stable", **kw) -> Defect:
    """``d_{C^r}(H_{x,y}, (A_y^n)^{-1} o H_{f^n x, f^n y} o A_x^n)`` (n -> -n for the unstable side)."""
    r = c.r if r is None else r
    if n < 1:
        raise HolonomyError("n must be >= 1")
    m = n if side == "stable" else -n
    hxy = holonomy(c, x, y, side, r=r, **kw)
    hn = holonomy(c, sft.shift(x, m), sft.shift(y, m), side, r=r, **kw)
    ax, axi = cc.iterate_pair(c, x, m)
    ay, ayi = cc.iterate_pair(c, y, m)
    rhs = d1.compose(ayi, d1.compose(hn.map, ax))
    rhs_inv = d1.compose(axi, d1.compose(hn.inverse, ay))
    n_eval = kw.get("n_eval", d1.EVAL_GRID)
    value = d1.dist_cr(hxy.map, rhs, r, n_eval=n_eval, g_inv=hxy.inverse, h_inv=rhs_inv)
    return Defect(value, hxy.error_bound + conjugation_factor(ax, ayi, r, n_eval) * hn.error_bound + COMPOSITION_TOL)


def conjugation_factor(f: d1.CircleMap, g: d1.CircleMap, r: float, n_eval: int = d1.EVAL_GRID) -> float:
    """Bound on ``d_{C^r}(g o H o f, g o H' o f) / d_{C^r}(H, H')`` from the composition estimate
    ``|g|_{C^(r+1)} max(1, |f|_{C^r})^max(r, 1)``, at least 1."""
    gn = d1.one_sided_norm(g, r + 1.0, n_eval=n_eval)
    fn = d1.one_sided_norm(f, r, n_eval=n_eval)
    return max(1.0, gn * max(1.0, fn) ** max(r, 1.0))


@dataclass
class H3Fit:
    exact: bool
    slope: float | None
    intercept: float | None
    constant: float | None
    exponent: float
    intermediate_ok: bool
    samples: list[tuple[float, float]] = field(repr=False)
    worst_intermediate: float = 0.0
    intermediate_constant: float = 0.0
    intermediate_by_pair: list[tuple[float, float]] = field(default_factory=list, repr=False)


def fit_H3(c: cc.Cocycle, pairs: Sequence[tuple], r: float | None = None, side: str = "stable",
           slack: float = 1.1, **kw) -> H3Fit:
    """Regress ``d_{C^r}(H_{x,y}, Id)`` on ``d(x, y)``; check every intermediate ``H_n`` against the bound.

    The bound constant is the smallest C with ``d(H, Id) <= C d(x,y)^(beta rho)``
    on the sample; intermediate terms must satisfy it with factor ``slack``.
    ``intermediate_by_pair`` lists ``(d(x,y), sup_n d(H_n, Id) / d(x,y)^(beta rho))``.
    """
    r = c.r if r is None else r
    expo = c.beta * (c.q - r)
    samples, partials = [], []
    n_eval = kw.get("n_eval", d1.EVAL_GRID)
    ident = d1.identity()
    for x, y in pairs:
        res = holonomy(c, x, y, side, r=r, record_partial=True, **kw)
        dh = d1.dist_cr(res.map, ident, r, n_eval=n_eval, g_inv=res.inverse, h_inv=ident)
        dx = sft.metric(x, y)
        samples.append((dx, dh))
        partials.append((dx, res.partial))
    if len({dx for dx, _ in samples}) < 2:
        raise HolonomyError("degenerate sample: all base distances equal")
    positive = [(dx, dh) for dx, dh in samples if dh > noise_floor(r, n_eval)]
    if not positive:
        return H3Fit(True, None, None, 0.0, expo, True, samples)
    const = d1.fit_inequality_constant([(dh, dx**expo) for dx, dh in samples])
    by_pair = [(dx, max((dn for _, dn in part), default=0.0) / dx**expo) for dx, part in partials]
    inter = max(v for _, v in by_pair)
    worst = inter / const
    if len({dx for dx, _ in positive}) < 2:
        # identity beyond a finite depth (locally constant data): the bound holds with any exponent
        return H3Fit(True, None, None, const, expo, worst <= slack, samples, worst, inter, by_pair)
    slope, intercept = loglog_slope(*zip(*positive))
    return H3Fit(False, slope, intercept, const, expo, worst <= slack, samples, worst, inter, by_pair)


# ---------------------------------------------------------------------------
# pointwise holonomy and the skew product


def holonomy_points(c: cc.Cocycle, x, y, t, side: str = "stable", tol: float = 1e-13, n_max: int = 200,
                    settle: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """``H_{x,y}(t)`` and ``D_t H_{x,y}`` at an array of points, by pushing t forward
    along x and pulling back along y (chain rule in log space)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    backward = side == "unstable"
    if backward:
        fx = list(reversed(c.gen.along(x, -n_max, 0, inverse=True)))
        by = list(reversed(c.gen.along(y, -n_max, 0)))
    else:
        fx = c.gen.along(x, 0, n_max)
        by = c.gen.along(y, 0, n_max, inverse=True)
    u = t.copy()
    lu = np.zeros_like(t)
    prev = None
    run = 0
    for n in range(1, n_max + 1):
        g = fx[n - 1]
        lu += np.log(g.derivative(1, u))
        u = g.lift(u)
        s, ls = u.copy(), lu.copy()
        for m in range(n - 1, -1, -1):
            b = by[m]
            ls += np.log(b.derivative(1, s))
            s = b.lift(s)
        if prev is not None:
            step = float(np.abs(d1.circle_dist(s - prev[0])).max() + np.abs(ls - prev[1]).max())
            run = run + 1 if step <= tol else 0
            if run >= settle:
                return s, np.exp(ls)
        prev = (s, ls)
    return prev[0], np.exp(prev[1])


@dataclass(frozen=True)
class SkewRow:
    n: int
    total: float
    base: float
    fiber: float
    crosscheck: float


def skew_stable_contraction(c: cc.Cocycle, x, t: float, y, n_max: int = 40, tol: float = 1e-13) -> list[SkewRow]:
    """``d(F^n(x, t), F^n(y, t'))`` with ``t' = H^s_{x,y}(t)``, plus the defect of
    ``A_y^n(t') = H^s_{f^n x, f^n y}(A_x^n(t))`` at each n."""
    if not sft.in_local_stable(x, y):
        raise HolonomyError("y is not in the local stable set of x")
    tp = np.array([float(t)]) if x == y else holonomy_points(c, x, y, [t], tol=tol)[0]
    u = np.array([float(t)])
    v = tp.copy()
    rows = []
    d0 = sft.metric(x, y)
    xs, ys = c.gen.along(x, 0, n_max), c.gen.along(y, 0, n_max)
    for n in range(n_max + 1):
        fx, fy = sft.shift(x, n), sft.shift(y, n)
        base = c.lam**n * d0
        fiber = float(d1.circle_dist(u - v)[0])
        if x == y:
            cross = 0.0
        else:
            pred = holonomy_points(c, fx, fy, u, tol=tol)[0]
            cross = float(d1.circle_dist(pred - v)[0])
        rows.append(SkewRow(n, base + fiber, base, fiber, cross))
        if n < n_max:
            u = xs[n].lift(u)
            v = ys[n].lift(v)
    return rows


# ---------------------------------------------------------------------------
# reports


def holonomy_report(c: cc.Cocycle, x, y, z=None, r: float | None = None, side: str = "stable", h2_n: int = 2,
                    h3_pairs: Sequence[tuple] | None = None, **kw) -> dict:
    res = holonomy(c, x, y, side, r=r, **kw)
    defects: dict = {}
    if z is not None:
        h1 = verify_H1(c, x, y, z, r=r, side=side, **kw)
        defects["H1"] = {"value": h1.value, "budget": h1.budget}
    h2 = verify_H2(c, x, y, h2_n, r=r, side=side, **kw)
    defects["H2"] = {"value": h2.value, "budget": h2.budget}
    if h3_pairs:
        fit = fit_H3(c, h3_pairs, r=r, side=side, **kw)
        defects["H3_fit"] = {"exact": fit.exact, "slope": fit.slope, "constant": fit.constant,
                             "exponent": fit.exponent, "intermediate_ok": fit.intermediate_ok}
    return {
        "pair": [x.serialize(), y.serialize()],
        "side": side,
        "n_used": res.n_used,
        "theta_hat": res.theta_hat,
        "tail_bound": res.tail_bound,
        "envelope_bound": res.envelope_bound,
        "converged": res.converged,
        "defects": defects,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
