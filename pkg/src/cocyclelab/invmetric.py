"""Invariant fiber metrics built from orbit pullback sets.

For circle fibers a metric on the tangent line at ``(x, t)`` is a positive
number ``rho``. The pullback of the reference metric along the orbit is
``(D_t A_x^n)^2 * tau_ref(F^n(x, t))`` and the candidate invariant metric is
the center of the smallest ball containing these numbers for ``|n| <= k``.
With the metric ``|log a - log b|`` that center is the log-midpoint, so all
field values are stored and compared as ``log rho``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import cocycle as cc
from . import diffeo1d as d1
from . import holonomy as hol
from . import sft
from . import spdspace as sp
from .estimates import loglog_slope

ROUNDING_FLOOR = 1e-12
ROUNDING_PER_STEP = 5e-14  # log-derivative rounding gathered per chain-rule step
FIBER_OFFSETS = tuple(2.0**-j for j in range(3, 9))

RefMetric = Callable[[sft.SftPoint, np.ndarray], np.ndarray] | None


class InvMetricError(ValueError):
    pass


# ---------------------------------------------------------------------------
# orbit pullback sets


def _window(k: int, window: tuple[int, int] | None) -> tuple[int, int]:
    if window is None:
        if k < 0:
            raise InvMetricError("horizon k must be >= 0")
        return -k, k
    lo, hi = (int(v) for v in window)
    if not lo <= 0 <= hi:
        raise InvMetricError("window must contain n = 0")
    return lo, hi


def orbit_log_pullbacks(c: cc.Cocycle, x: sft.SftPoint, t, k: int = 40, window: tuple[int, int] | None = None,
                        tau_ref: RefMetric = None) -> np.ndarray:
    """Rows ``log((D_t A_x^n)^2 tau_ref(F^n(x, t)))`` for n = lo..hi, columns over ``t``.

    One pass forward and one pass backward along the orbit (chain rule).
    """
    lo, hi = _window(k, window)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    rows = np.empty((hi - lo + 1, t.size))

    def ref(n, s):
        return 0.0 if tau_ref is None else np.log(tau_ref(sft.shift(x, n), s))

    rows[-lo] = ref(0, t)
    s, logd = t.copy(), np.zeros_like(t)
    for i, m in enumerate(c.gen.along(x, 0, hi), start=1):
        logd += np.log(m.derivative(1, s))
        s = m.lift(s)
        rows[-lo + i] = 2.0 * logd + ref(i, s)
    s, logd = t.copy(), np.zeros_like(t)
    for i, m in enumerate(reversed(c.gen.along(x, lo, 0, inverse=True)), start=1):
        logd += np.log(m.derivative(1, s))
        s = m.lift(s)
        rows[-lo - i] = 2.0 * logd + ref(-i, s)
    return rows


def orbit_pullbacks(c: cc.Cocycle, x: sft.SftPoint, t: float, k: int = 40, tau_ref: RefMetric = None) -> list[sp.SpdPoint]:
    """The pullback set as 1x1 SPD points, ordered n = -k..k."""
    rows = orbit_log_pullbacks(c, x, [float(t)], k, tau_ref=tau_ref)[:, 0]
    return [sp.SpdPoint.scalar(math.exp(v)) for v in rows]


def log_tau_hat(c: cc.Cocycle, x: sft.SftPoint, t, k: int = 40, window: tuple[int, int] | None = None,
                tau_ref: RefMetric = None) -> np.ndarray:
    """``log`` of the enclosing-ball center of the pullback set, vectorized over ``t``."""
    rows = orbit_log_pullbacks(c, x, t, k, window, tau_ref)
    return 0.5 * (rows.min(axis=0) + rows.max(axis=0))


def tau_hat(c: cc.Cocycle, x: sft.SftPoint, t: float, k: int = 40, tau_ref: RefMetric = None) -> sp.SpdPoint:
    return sp.min_enclosing_ball(orbit_pullbacks(c, x, t, k, tau_ref)).center


def _log_hausdorff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Columnwise Hausdorff distance between the row sets of ``a`` and ``b`` on the log line."""
    gap = np.abs(a[:, None, :] - b[None, :, :])
    return np.maximum(gap.min(axis=1).max(axis=0), gap.min(axis=0).max(axis=0))


# ---------------------------------------------------------------------------
# metric field


@dataclass(frozen=True)
class MetricField:
    base_samples: tuple[sft.SftPoint, ...] = field(repr=False)
    provenance: tuple[str, ...] = field(repr=False)
    fiber_grid: np.ndarray = field(repr=False)
    log_values: np.ndarray = field(repr=False)
    k_horizon: int
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.log_values.shape != (len(self.base_samples), self.fiber_grid.size):
            raise InvMetricError("log_values must have one row per base sample and one column per fiber point")
        if not np.all(np.isfinite(self.log_values)):
            raise InvMetricError("field values must be positive and finite")

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    @property
    def n_grid(self) -> int:
        return self.fiber_grid.size

    @property
    def log_bound(self) -> float:
        return float(np.abs(self.log_values).max()) if self.log_values.size else 0.0

    def row(self, x: sft.SftPoint) -> np.ndarray:
        for i, p in enumerate(self.base_samples):
            if p == x:
                return self.log_values[i]
        raise InvMetricError("point is not a base sample of this field")

    def to_json(self) -> str:
        out = {
            "family": self.family,
            "params": self.params,
            "k_horizon": self.k_horizon,
            "points": [p.serialize() for p in self.base_samples],
            "provenance": list(self.provenance),
            "fiber_grid": self.fiber_grid.tolist(),
            "log_values": self.log_values.tolist(),
        }
        return json.dumps(out, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str, space: sft.SftSpace) -> "MetricField":
        raw = json.loads(text)
        pts = tuple(sft.parse_point(space, s) for s in raw["points"])
        return cls(pts, tuple(raw["provenance"]), np.array(raw["fiber_grid"]),
                   np.array(raw["log_values"]).reshape(len(pts), -1), int(raw["k_horizon"]),
                   raw["family"], raw["params"])


def field_samples(space: sft.SftSpace, n_parry: int = 100, seed: int = 0,
                  periodic_max: int = 6) -> tuple[list[sft.SftPoint], list[str]]:
    """Parry-measure samples followed by every periodic point of period <= periodic_max."""
    pts = sft.sample(sft.parry_measure(space), seed=seed, count=n_parry) if n_parry else []
    prov = [f"parry:{seed}:{i}" for i in range(len(pts))]
    for p, k in sft.periodic_points(space, periodic_max) if periodic_max else []:
        pts.append(p)
        prov.append(f"periodic:{k}")
    return pts, prov


def _row_task(args):
    c, x, t, k = args
    return log_tau_hat(c, x, t, k)


def parallel_rows(c: cc.Cocycle, points: Sequence[sft.SftPoint], t: np.ndarray, k: int, jobs: int = 1) -> np.ndarray:
    """Field rows in input order; ``jobs > 1`` fans out over processes."""
    tasks = [(c, x, t, k) for x in points]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_row_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_row_task(a) for a in tasks]
    return np.array(rows).reshape(len(points), t.size)


def build_field(c: cc.Cocycle, points: Sequence[sft.SftPoint], provenance: Sequence[str] | None = None,
                n_grid: int = 1024, k: int = 40, jobs: int = 1, params: dict | None = None) -> MetricField:
    t = d1.uniform_grid(n_grid)
    prov = tuple(provenance) if provenance is not None else tuple("given" for _ in points)
    rows = parallel_rows(c, points, t, k, jobs)
    return MetricField(tuple(points), prov, t, rows, k, c.name, dict(params or {}))


# ---------------------------------------------------------------------------
# invariance under the cocycle


class InvarianceDefect(NamedTuple):
    value: float
    budget: float
    k: int

    @property
    def allowed(self) -> float:
        return self.budget + ROUNDING_FLOOR + ROUNDING_PER_STEP * (2 * self.k + 2)

    @property
    def ok(self) -> bool:
        return self.value <= self.allowed


def invariance_defect(c: cc.Cocycle, x: sft.SftPoint, t, k: int = 40) -> InvarianceDefect:
    """``sup_t |log(tau(F(x,t)) (D_t A_x)^2 / tau(x,t))|`` at horizon k.

    The budget is the log-Hausdorff gap between the pullback sets over the
    windows ``[-k, k]`` and ``[-k+1, k+1]`` of ``(x, t)``; the ball center moves
    by at most that much on the log line.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    a = c.gen.value(x)
    here = log_tau_hat(c, x, t, k)
    there = log_tau_hat(c, sft.shift(x, 1), a.lift(t), k)
    value = float(np.abs(there + 2.0 * np.log(a.derivative(1, t)) - here).max())
    rows = orbit_log_pullbacks(c, x, t, window=(-k, k + 1))
    budget = float(_log_hausdorff(rows[:-1], rows[1:]).max())
    return InvarianceDefect(value, budget, k)


def invariance_profile(c: cc.Cocycle, x: sft.SftPoint, t, ks: Sequence[int]) -> list[InvarianceDefect]:
    return [invariance_defect(c, x, t, k) for k in ks]


def decays(profile: Sequence[InvarianceDefect], floor: float = 1e-10) -> bool:
    """True when the defect ends at the floor or has at least halved over the horizons."""
    first, last = profile[0].value, profile[-1].value
    return last <= floor or last <= 0.5 * first


# ---------------------------------------------------------------------------
# fiber Hoelder continuity


@dataclass(frozen=True)
class FiberHolderFit:
    exact: bool
    exponent: float
    constant: float
    holder_constant: float
    alpha: float
    offsets: tuple[float, ...]
    sups: tuple[float, ...]


def fiber_holder_check(fld: MetricField, alpha: float = 0.25, offsets: Sequence[float] = FIBER_OFFSETS,
                       floor: float = ROUNDING_FLOOR) -> FiberHolderFit:
    """Log-log fit of ``sup |log rho(t + h) - log rho(t)|`` against dyadic offsets ``h``.

    ``constant`` goes with the fitted exponent, ``holder_constant`` with ``alpha``;
    both are maxima over the offsets, so they are comparable across grids.
    """
    n = fld.n_grid
    vals = fld.log_values
    sups = []
    for h in offsets:
        j = h * n
        if abs(j - round(j)) > 1e-9 or round(j) < 1:
            raise InvMetricError(f"offset {h} is not on the fiber grid of size {n}")
        sups.append(float(np.abs(np.roll(vals, -int(round(j)), axis=1) - vals).max()))
    if max(sups) <= floor:
        return FiberHolderFit(True, math.inf, 0.0, 0.0, alpha, tuple(offsets), tuple(sups))
    keep = [(h, s) for h, s in zip(offsets, sups) if s > floor]
    if len(keep) < 2:
        raise InvMetricError("too few offsets above the rounding floor for a fit")
    slope, _ = loglog_slope(*zip(*keep))
    const = max(s / h**slope for h, s in keep)
    hconst = max(s / h**alpha for h, s in keep)
    return FiberHolderFit(False, slope, const, hconst, alpha, tuple(offsets), tuple(sups))


# ---------------------------------------------------------------------------
# holonomy invariance


class IsometryDefect(NamedTuple):
    value: float
    budget: float
    tail: float
    horizon_gap: float

    @property
    def ok(self) -> bool:
        return self.value <= self.budget


def holonomy_isometry_defect(c: cc.Cocycle, x: sft.SftPoint, y: sft.SftPoint, fld: MetricField,
                             side: str = "stable", tol: float = 1e-9, n_eval: int = 1024) -> IsometryDefect:
    """``sup_t |log(rho_y(H t) H'(t)^2 / rho_x(t))|`` with H the computed holonomy.

    Off-grid values ``rho_y(H t)`` are evaluated from the orbit directly, so
    the budget has no interpolation term: it is the holonomy tail (position
    error times the slope of ``log rho_y`` plus the log-derivative error) and
    the horizon gap ``sup |log rho^k - log rho^2k|`` at both points.
    """
    k, t = fld.k_horizon, fld.fiber_grid
    lx = _row_or_eval(c, fld, x)
    res = hol.holonomy(c, x, y, side, tol=tol, n_eval=n_eval)
    h = res.map
    ht, dh = h.lift(t), h.derivative(1, t)
    ly_ht = log_tau_hat(c, y, ht, k)
    value = float(np.abs(ly_ht + 2.0 * np.log(dh) - lx).max())
    # an exact stop still only pins H down to the rounding floor of the C^r distances
    err = max(res.error_bound if res.converged else math.inf, res.floor)
    if isinstance(h, d1.Rotation) and res.exact and h.angle == 0.0:
        err = 0.0
    ly = _row_or_eval(c, fld, y)
    slope = float(np.abs(np.diff(np.append(ly, ly[0]))).max()) * fld.n_grid
    tail = err * (slope + 2.0 / float(dh.min()))
    gap = 0.0
    if k > 0:
        for p, s, base in ((x, t, lx), (y, ht, ly_ht)):
            gap += float(np.abs(log_tau_hat(c, p, s, 2 * k) - base).max())
    return IsometryDefect(value, float(tail + gap + ROUNDING_FLOOR), float(tail), gap)


def _row_or_eval(c, fld: MetricField, x) -> np.ndarray:
    try:
        return fld.row(x)
    except InvMetricError:
        return log_tau_hat(c, x, fld.fiber_grid, fld.k_horizon)


# ---------------------------------------------------------------------------
# base Hoelder continuity


def metric_distance(lx: np.ndarray, ly: np.ndarray, alpha: float = 0.25, eps0: float = d1.EPS0) -> float:
    """``sup |log rho_x - log rho_y| + alpha-Hoelder seminorm of the difference``."""
    diff = lx - ly
    return float(np.abs(diff).max()) + d1.holder_seminorm(diff, alpha, eps0)


@dataclass(frozen=True)
class BaseHolderFit:
    kind: str
    exact: bool
    exponent: float
    constant: float
    samples: tuple[tuple[float, float], ...]
    leaf_constant: float | None = None
    bracket_ratio: float | None = None


def _general_pair(x, d, rng):
    return sft.perturb_future(sft.perturb_past(x, d, rng), d, rng)


def base_holder_check(c: cc.Cocycle, fld: MetricField, pair_kind: str = "stable", depths: Sequence[int] = range(1, 13),
                      n_base: int = 4, seed: int = 0, alpha: float = 0.25,
                      floor: float = ROUNDING_FLOOR) -> BaseHolderFit:
    """Fit ``d_T(rho_x, rho_y)`` against ``d(x, y)`` for pairs built from the field's base samples.

    ``bracket`` pairs differ on both sides; they are also compared against the
    leaf-wise constant through the bracket point ``w`` (future of x, past of y).
    """
    if pair_kind not in ("stable", "unstable", "bracket"):
        raise InvMetricError(f"unknown pair kind {pair_kind!r}")
    rng = np.random.default_rng(seed)
    k, t = fld.k_horizon, fld.fiber_grid
    er = c.beta * c.rho

    def ev(p):
        return _row_or_eval(c, fld, p)

    samples, leaf = [], []
    for x in fld.base_samples[:n_base]:
        lx = ev(x)
        for d in depths:
            if pair_kind == "stable":
                y = sft.perturb_past(x, d, rng)
            elif pair_kind == "unstable":
                y = sft.perturb_future(x, d, rng)
            else:
                y = _general_pair(x, d, rng)
            ly = ev(y)
            samples.append((sft.metric(x, y), metric_distance(lx, ly, alpha)))
            if pair_kind == "bracket":
                w = sft.bracket(x, y)
                lw = ev(w)
                for p, lp, q, lq in ((x, lx, w, lw), (w, lw, y, ly)):
                    dd = sft.metric(p, q)
                    if dd > 0:
                        leaf.append(metric_distance(lp, lq, alpha) / dd**er)
    if max(v for _, v in samples) <= floor:
        return BaseHolderFit(pair_kind, True, math.inf, 0.0, tuple(samples), 0.0 if leaf else None,
                             0.0 if leaf else None)
    keep = [(dx, v) for dx, v in samples if v > floor]
    if len({dx for dx, _ in keep}) < 2:
        raise InvMetricError("degenerate samples: need two distinct base distances above the floor")
    slope, _ = loglog_slope(*zip(*keep))
    const = max(v / dx**er for dx, v in keep)
    leaf_const = ratio = None
    if pair_kind == "bracket":
        leaf_const = max(leaf)
        ratio = const / leaf_const if leaf_const > 0 else math.inf
    return BaseHolderFit(pair_kind, False, slope, const, tuple(samples), leaf_const, ratio)


@dataclass(frozen=True)
class JointHolderFit:
    exact: bool
    exponent: float
    samples: tuple[tuple[float, float], ...]


def joint_holder_check(c: cc.Cocycle, fld: MetricField, depths: Sequence[int] = range(1, 13), n_base: int = 2,
                       seed: int = 0, floor: float = ROUNDING_FLOOR) -> JointHolderFit:
    """Fit ``sup_t |log rho_x(t) - log rho_y(t + delta)|`` against ``d(x, y) + delta`` with ``delta = d(x, y)``."""
    rng = np.random.default_rng(seed)
    k, t = fld.k_horizon, fld.fiber_grid
    samples = []
    for x in fld.base_samples[:n_base]:
        lx = _row_or_eval(c, fld, x)
        for d in depths:
            y = _general_pair(x, d, rng)
            dx = sft.metric(x, y)
            ly = log_tau_hat(c, y, t + dx, k)
            samples.append((2.0 * dx, float(np.abs(lx - ly).max())))
    keep = [(dx, v) for dx, v in samples if v > floor]
    if len(keep) < 2:
        return JointHolderFit(True, math.inf, tuple(samples))
    slope, _ = loglog_slope(*zip(*keep))
    return JointHolderFit(False, slope, tuple(samples))


# ---------------------------------------------------------------------------
# verdict


@dataclass(frozen=True)
class VerdictConfig:
    k: int = 40
    n_grid: int = 1024
    n_parry: int = 100
    periodic_max: int = 6
    seed: int = 0
    alpha: float = 0.25
    defect_tol: float = 1e-3
    exponent_slack: float = 0.1
    gate: float = 1.5
    gate_period: int = 6
    base_pairs: int = 4
    depths: tuple[int, ...] = tuple(range(1, 13))
    holonomy_pairs: int = 2
    holonomy_tol: float = 1e-9
    jobs: int = 1


def _finite(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def isometry_defect(c: cc.Cocycle, fld: MetricField) -> tuple[float, list[float]]:
    """``sup |log(rho_fx(A_x t) A_x'(t)^2 / rho_x(t))|`` over the field, with the per-sample values."""
    t, k = fld.fiber_grid, fld.k_horizon
    per = []
    for x, lx in zip(fld.base_samples, fld.log_values):
        a = c.gen.value(x)
        lf = log_tau_hat(c, sft.shift(x, 1), a.lift(t), k)
        per.append(float(np.abs(lf + 2.0 * np.log(a.derivative(1, t)) - lx).max()))
    return max(per), per


def theorem13_verdict(c: cc.Cocycle, cfg: VerdictConfig = VerdictConfig()) -> dict:
    """Isometry verdict: PASS, FAIL or NOT-APPLICABLE with the evidence for each check."""
    report = {"family": c.name, "config": asdict(cfg), "q": c.q, "r": c.r, "beta": c.beta}
    summary = cc.periodic_data(c, cfg.gate_period, n_eval=cfg.n_grid, gate=cfg.gate)
    report["gate"] = {
        "invariant": "cocycle.periodic_data bounded",
        "bounded": summary.bounded,
        "growth_ratio": summary.growth_ratio,
        "sup_q": summary.sup_q,
        "sup_q_half": summary.sup_q_half,
        "periods": cfg.gate_period,
    }
    if not summary.bounded:
        report["verdict"] = "NOT-APPLICABLE"
        report["checks"] = []
        return report

    pts, prov = field_samples(c.base, cfg.n_parry, cfg.seed, cfg.periodic_max)
    fld = build_field(c, pts, prov, cfg.n_grid, cfg.k, cfg.jobs, params={"seed": cfg.seed})
    checks = []

    def add(name, invariant, value, threshold, ok, **evidence):
        checks.append({"name": name, "invariant": invariant, "value": _finite(value),
                       "threshold": _finite(threshold), "pass": bool(ok), "evidence": evidence})

    sup, per = isometry_defect(c, fld)
    worst = int(np.argmax(per))
    add("isometry", "invmetric.isometry_defect", sup, cfg.defect_tol, sup <= cfg.defect_tol,
        samples=len(per), worst_point=prov[worst], field_log_bound=fld.log_bound)

    fh = fiber_holder_check(fld, cfg.alpha)
    need = cfg.alpha - cfg.exponent_slack
    add("fiber_holder", "invmetric.fiber_holder_check", fh.exponent, need, fh.exponent >= need,
        exact=fh.exact, constant=fh.constant, holder_constant=fh.holder_constant,
        offsets=list(fh.offsets), sups=list(fh.sups))

    er = c.beta * c.rho
    need = er - cfg.exponent_slack
    base_exps = []
    for kind in ("stable", "unstable", "bracket"):
        bh = base_holder_check(c, fld, kind, cfg.depths, cfg.base_pairs, cfg.seed, cfg.alpha)
        base_exps.append(bh.exponent)
        ok = bh.exponent >= need and (kind != "bracket" or bh.exact or bh.bracket_ratio <= 3.0)
        add(f"base_holder_{kind}", "invmetric.base_holder_check", bh.exponent, need, ok,
            exact=bh.exact, constant=bh.constant, leaf_constant=bh.leaf_constant,
            bracket_ratio=bh.bracket_ratio, n_samples=len(bh.samples))

    jh = joint_holder_check(c, fld, cfg.depths, min(2, cfg.base_pairs), cfg.seed)
    need = min(cfg.alpha, er) - cfg.exponent_slack
    add("joint_holder", "invmetric.joint_holder_check", jh.exponent, need, jh.exponent >= need,
        exact=jh.exact, n_samples=len(jh.samples))

    rng = np.random.default_rng(cfg.seed + 1)
    for side in ("stable", "unstable"):
        perturb = sft.perturb_past if side == "stable" else sft.perturb_future
        for i, x in enumerate(fld.base_samples[:cfg.holonomy_pairs]):
            y = perturb(x, 3, rng)
            dfc = holonomy_isometry_defect(c, x, y, fld, side, cfg.holonomy_tol)
            add(f"holonomy_{side}_{i}", "invmetric.holonomy_isometry_defect", dfc.value, cfg.defect_tol,
                dfc.value <= cfg.defect_tol, budget=dfc.budget, tail=dfc.tail, horizon_gap=dfc.horizon_gap)

    report["checks"] = checks
    report["n_samples"] = len(pts)
    report["verdict"] = "PASS" if all(ch["pass"] for ch in checks) else "FAIL"
    return report


def verdict_table(report: dict) -> str:
    lines = [f"verdict {report['verdict']}  family {report['family']}",
             f"gate: bounded={report['gate']['bounded']} growth_ratio={report['gate']['growth_ratio']:.4g}"]
    for ch in report.get("checks", []):
        v, th = ch["value"], ch["threshold"]
        fv = v if isinstance(v, str) else f"{v:.4g}"
        ft = th if isinstance(th, str) else f"{th:.4g}"
        lines.append(f"{'PASS' if ch['pass'] else 'FAIL':4}  {ch['name']:<22} value={fv:<12} threshold={ft}")
    return "\n".join(lines)
