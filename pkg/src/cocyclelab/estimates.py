"""Randomized suites that fit the constants of the composition estimates.

Each suite draws band-limited random diffeomorphisms, evaluates both sides of
an inequality and returns the smallest constant that makes it hold on the
sample. Refinement stability is measured by rerunning at a finer evaluation
grid with the same maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diffeo1d as d1


@dataclass
class FitResult:
    constant: float
    n_samples: int
    pairs: list[tuple[float, float]] = field(repr=False, default_factory=list)
    exponent: float | None = None


def loglog_slope(x, y) -> tuple[float, float]:
    """Least squares fit of log y = slope * log x + intercept."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if np.ptp(lx) <= 0:
        raise ValueError("degenerate sample: all abscissae equal")
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def _random_maps(seed: int, count: int, n: int = d1.MAP_GRID):
    rng = np.random.default_rng(seed)
    maps = []
    for _ in range(count):
        amp = float(rng.uniform(0.05, 0.6))
        modes = int(rng.integers(1, 4))
        maps.append(d1.random_smooth(rng, n=n, modes=modes, amplitude=amp))
    return maps


def composition_norm_suite(r: float, n_pairs: int = 200, seed: int = 0, n_eval: int = d1.EVAL_GRID) -> FitResult:
    """Fit M_r in ||h o g|| <= M_r ||h|| (1 + ||g||)^r."""
    maps = _random_maps(seed, 2 * n_pairs)
    pairs = []
    for h, g in zip(maps[0::2], maps[1::2]):
        lhs = d1.one_sided_norm(d1.compose(h, g), r, n_eval=n_eval)
        rhs = d1.one_sided_norm(h, r, n_eval=n_eval) * (1.0 + d1.one_sided_norm(g, r, n_eval=n_eval)) ** r
        pairs.append((lhs, rhs))
    return FitResult(d1.fit_inequality_constant(pairs), len(pairs), pairs)


def _bump(n: int) -> np.ndarray:
    t = d1.uniform_grid(n)
    return np.sin(2 * math.pi * t) / (2 * math.pi) + 0.5 * np.cos(4 * math.pi * t) / (4 * math.pi)


def conjugated_difference_suite(q: float, r: float, n_triples: int = 40, deltas=None, seed: int = 1,
                                n_eval: int = d1.EVAL_GRID) -> FitResult:
    """Fit M in d(g h1 g~, g h2 g~) <= M * factor * d(h1, h2)^(q - r) and the distance exponent.

    ``h2`` is ``h1`` with its displacement moved by ``delta * bump``; the
    exponent is the median of per-triple log-log slopes over the delta range.
    """
    rho = q - r
    if deltas is None:
        deltas = np.geomspace(1e-3, 1e-2, 5)
    maps = _random_maps(seed, 3 * n_triples)
    bump = _bump(d1.MAP_GRID)
    pairs = []
    slopes = []
    for g, gt, h1 in zip(maps[0::3], maps[1::3], maps[2::3]):
        g_inv, gt_inv = g.inverse(), gt.inverse()
        factor = (
            d1.one_sided_norm(g, q, n_eval=n_eval) * (1 + d1.one_sided_norm(gt, r, n_eval=n_eval)) ** r
            + d1.one_sided_norm(gt_inv, q, n_eval=n_eval) * (1 + d1.one_sided_norm(g_inv, r, n_eval=n_eval)) ** r
        )
        left = d1.compose(g, d1.compose(h1, gt))
        ds, lhs_list = [], []
        for delta in deltas:
            h2 = d1.GridDiffeo(h1.displacement + delta * bump)
            d_h = d1.dist_cr(h1, h2, r, n_eval=n_eval)
            right = d1.compose(g, d1.compose(h2, gt))
            lhs = d1.dist_cr(left, right, r, n_eval=n_eval)
            pairs.append((lhs, factor * d_h**rho))
            ds.append(d_h)
            lhs_list.append(lhs)
        slopes.append(loglog_slope(ds, lhs_list)[0])
    return FitResult(d1.fit_inequality_constant(pairs), len(pairs), pairs, exponent=float(np.median(slopes)))


def far_norm_suite(r: float, n_pairs: int = 100, seed: int = 2, n_eval: int = d1.EVAL_GRID) -> FitResult:
    """Fit kappa' in |g| <= exp(kappa' d_C0(g, h)) (|h| + d_Cr(g, h)) on close pairs.

    The returned constant is ``max(0, sup log(|g| / (|h| + d)) / d_C0)``.
    """
    rng = np.random.default_rng(seed)
    bump = _bump(d1.MAP_GRID)
    pairs = []
    for h in _random_maps(seed + 1000, n_pairs):
        delta = float(rng.uniform(1e-3, 2e-2)) * float(rng.choice([-1.0, 1.0]))
        g = d1.GridDiffeo(h.displacement + delta * bump)
        lhs = math.log(
            d1.two_sided_norm(g, r, n_eval=n_eval)
            / (d1.two_sided_norm(h, r, n_eval=n_eval) + d1.dist_cr(g, h, r, n_eval=n_eval))
        )
        pairs.append((lhs, d1.dist_c0(g, h, n_eval=n_eval)))
    return FitResult(max(0.0, d1.fit_inequality_constant(pairs)), len(pairs), pairs)
