"""Circle-diffeomorphism cocycles over a subshift of finite type.

A generator assigns to each base point ``x`` a diffeomorphism ``A_x`` of the
circle. Iterates follow

    A_x^n = A_{f^{n-1} x} o ... o A_x,        A_x^{-n} = (A_{f^{-n} x}^n)^{-1}.

Generators read symbols through a numpy window around the current index, so
orbit segments are evaluated without materializing shifted points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from . import diffeo1d as d1
from . import sft
from .estimates import loglog_slope


class CocycleError(ValueError):
    pass


Word = tuple


def _table_lookup(table, key):
    if callable(table):
        return table(key)
    try:
        return table[key]
    except KeyError as exc:
        raise CocycleError(f"no table entry for word {''.join(map(str, key))}") from exc


# ---------------------------------------------------------------------------
# generators


class Generator:
    """Base class. Subclasses implement ``_value_at(sym, c)``.

    ``sym`` is an integer array and ``c`` the position holding the symbol
    ``x_0`` of the point whose value is requested. The generator may read
    ``sym[c - reach : c + reach + 1]``.
    """

    family = "custom"
    reach = 0
    window: tuple[int, int] | None = None
    declared_beta = 1.0
    declared_q = 1.5

    @property
    def locally_constant(self) -> bool:
        return self.window is not None

    def _value_at(self, sym: np.ndarray, c: int) -> d1.CircleMap:
        raise NotImplementedError

    def _inverse_at(self, sym: np.ndarray, c: int) -> d1.CircleMap:
        return self._value_at(sym, c).inverse()

    def value(self, x: sft.SftPoint) -> d1.CircleMap:
        r = self.reach
        return self._value_at(x.window_array(-r, r), r)

    def inverse_value(self, x: sft.SftPoint) -> d1.CircleMap:
        r = self.reach
        return self._inverse_at(x.window_array(-r, r), r)

    def along(self, x: sft.SftPoint, i0: int, i1: int, inverse: bool = False) -> list[d1.CircleMap]:
        """``[A_{f^i x} for i in range(i0, i1)]`` (or their inverses)."""
        if i1 <= i0:
            return []
        r = self.reach
        sym = x.window_array(i0 - r, i1 - 1 + r)
        get = self._inverse_at if inverse else self._value_at
        return [get(sym, r + j) for j in range(i1 - i0)]

    def describe(self) -> dict:
        return {"family": self.family, "window": self.window, "declared_beta": self.declared_beta,
                "declared_q": self.declared_q}


class TableGenerator(Generator):
    """Locally constant generator: ``A_x = table[x_lo .. x_hi]``.

    ``table`` maps words (tuples of symbols) to circle maps, or is a callable.
    """

    family = "table"

    def __init__(self, window: tuple[int, int], table, declared_q: float = 1.5, family: str | None = None):
        lo, hi = window
        if lo > hi:
            raise CocycleError("empty window")
        self.window = (int(lo), int(hi))
        self.reach = max(abs(lo), abs(hi))
        self._table = table
        self._cache: dict = {}
        self._inv_cache: dict = {}
        self.declared_q = declared_q
        if family:
            self.family = family

    def key(self, sym, c) -> Word:
        lo, hi = self.window
        return tuple(int(s) for s in sym[c + lo : c + hi + 1])

    def map_for(self, word: Word) -> d1.CircleMap:
        m = self._cache.get(word)
        if m is None:
            m = _table_lookup(self._table, word)
            self._cache[word] = m
        return m

    def _value_at(self, sym, c):
        return self.map_for(self.key(sym, c))

    def _inverse_at(self, sym, c):
        word = self.key(sym, c)
        m = self._inv_cache.get(word)
        if m is None:
            m = self.map_for(word).inverse()
            self._inv_cache[word] = m
        return m


class ConstantGenerator(TableGenerator):
    family = "constant"

    def __init__(self, value: d1.CircleMap, declared_q: float = 1.5, family: str | None = None):
        super().__init__((0, 0), lambda word: value, declared_q, family)
        self.constant = value
        self.window = (0, 0)


class ConjugatedRotation(Generator):
    """``A_x = g(fx) o R_{alpha(x)} o g(x)^{-1}`` with locally constant ``g`` and ``alpha``.

    ``alpha`` reads ``alpha_window``; ``g`` reads ``conj_window`` (so ``g(fx)``
    reads that window shifted by one).
    """

    family = "conjugated_rotation"

    def __init__(self, alpha_window, alpha, conj_window, conj, declared_q: float = 1.5):
        self.alpha_window = tuple(int(v) for v in alpha_window)
        self.conj_window = tuple(int(v) for v in conj_window)
        lo = min(self.alpha_window[0], self.conj_window[0])
        hi = max(self.alpha_window[1], self.conj_window[1] + 1)
        self.window = (lo, hi)
        self.reach = max(abs(lo), abs(hi))
        self._alpha = alpha
        self._conj = conj
        self._conj_cache: dict = {}
        self._cache: dict = {}
        self._inv_cache: dict = {}
        self.declared_q = declared_q

    def _akey(self, sym, c):
        lo, hi = self.alpha_window
        return tuple(int(s) for s in sym[c + lo : c + hi + 1])

    def _gkey(self, sym, c):
        lo, hi = self.conj_window
        return tuple(int(s) for s in sym[c + lo : c + hi + 1])

    def conjugacy_for(self, word: Word):
        pair = self._conj_cache.get(word)
        if pair is None:
            g = _table_lookup(self._conj, word)
            pair = (g, g.inverse())
            self._conj_cache[word] = pair
        return pair

    def angle_for(self, word: Word) -> float:
        return float(_table_lookup(self._alpha, word))

    def conjugacy(self, x: sft.SftPoint) -> d1.CircleMap:
        r = self.reach
        return self.conjugacy_for(self._gkey(x.window_array(-r, r), r))[0]

    def angle(self, x: sft.SftPoint) -> float:
        r = self.reach
        return self.angle_for(self._akey(x.window_array(-r, r), r))

    def _key(self, sym, c):
        return self._gkey(sym, c + 1), self._akey(sym, c), self._gkey(sym, c)

    def _value_at(self, sym, c):
        key = self._key(sym, c)
        m = self._cache.get(key)
        if m is None:
            g1 = self.conjugacy_for(key[0])[0]
            g0_inv = self.conjugacy_for(key[2])[1]
            m = d1.compose(g1, d1.compose(d1.Rotation(self.angle_for(key[1])), g0_inv))
            self._cache[key] = m
        return m

    def _inverse_at(self, sym, c):
        key = self._key(sym, c)
        m = self._inv_cache.get(key)
        if m is None:
            g0 = self.conjugacy_for(key[2])[0]
            g1_inv = self.conjugacy_for(key[0])[1]
            m = d1.compose(g0, d1.compose(d1.Rotation(-self.angle_for(key[1])), g1_inv))
            self._inv_cache[key] = m
        return m


def series_terms(weight: float, cutoff: float = 1e-17) -> int:
    return int(math.ceil(math.log(cutoff) / math.log(weight)))


class _Series:
    """``theta(x) = amp * sum_i weight^|i| coeff[x_i]`` truncated where weight^T < 1e-17."""

    def __init__(self, weight: float, amp: float, coeff: Sequence[float]):
        if not 0.0 < weight < 1.0:
            raise CocycleError("series weight must lie in (0, 1)")
        self.weight = float(weight)
        self.amp = float(amp)
        self.coeff = np.asarray(coeff, dtype=float)
        self.terms = series_terms(self.weight)
        i = np.arange(-self.terms, self.terms + 1)
        self._w = self.amp * self.weight ** np.abs(i)

    def at(self, sym, c) -> float:
        t = self.terms
        return float(self._w @ self.coeff[sym[c - t : c + t + 1]])


class SeriesConjugatedRotation(Generator):
    """``A_x = h(fx) o R_{alpha(x)} o h(x)^{-1}`` with ``h(x) = R_{theta(x)} o g0``.

    ``theta`` is a geometric series in all coordinates, so ``x -> A_x`` is
    Lipschitz for d_lambda when ``weight = lambda``; ``alpha`` is locally constant.
    """

    family = "conjugated_rotation_series"

    def __init__(self, base: d1.CircleMap, weight: float, amp: float, coeff: Sequence[float],
                 alpha_window, alpha, declared_q: float = 1.5, declared_beta: float = 1.0):
        self.base = base
        self.base_inv = base.inverse()
        self.theta = _Series(weight, amp, coeff)
        self.alpha_window = tuple(int(v) for v in alpha_window)
        self._alpha = alpha
        self.reach = max(self.theta.terms + 1, abs(self.alpha_window[0]), abs(self.alpha_window[1]))
        self._core: dict = {}
        self.declared_q = declared_q
        self.declared_beta = declared_beta

    @property
    def window(self):
        return None

    def _akey(self, sym, c):
        lo, hi = self.alpha_window
        return tuple(int(s) for s in sym[c + lo : c + hi + 1])

    def angle_for(self, word) -> float:
        return float(_table_lookup(self._alpha, word))

    def core_for(self, word):
        """``(g0 R_a g0^-1, its inverse)`` for the angle of ``word``."""
        pair = self._core.get(word)
        if pair is None:
            a = self.angle_for(word)
            m = d1.compose(self.base, d1.compose(d1.Rotation(a), self.base_inv))
            mi = d1.compose(self.base, d1.compose(d1.Rotation(-a), self.base_inv))
            pair = (m, mi)
            self._core[word] = pair
        return pair

    def theta_of(self, x: sft.SftPoint) -> float:
        r = self.reach
        return self.theta.at(x.window_array(-r, r), r)

    def angle(self, x: sft.SftPoint) -> float:
        r = self.reach
        return self.angle_for(self._akey(x.window_array(-r, r), r))

    def conjugacy(self, x: sft.SftPoint) -> d1.CircleMap:
        return d1.compose(d1.Rotation(self.theta_of(x)), self.base)

    def _value_at(self, sym, c):
        core = self.core_for(self._akey(sym, c))[0]
        th0, th1 = self.theta.at(sym, c), self.theta.at(sym, c + 1)
        return d1.compose(d1.Rotation(th1), d1.compose(core, d1.Rotation(-th0)))

    def _inverse_at(self, sym, c):
        core_inv = self.core_for(self._akey(sym, c))[1]
        th0, th1 = self.theta.at(sym, c), self.theta.at(sym, c + 1)
        return d1.compose(d1.Rotation(th0), d1.compose(core_inv, d1.Rotation(-th1)))


class SeriesAngleGenerator(Generator):
    """``A_x = R_{alpha(x)} o s_{eps(x)}``, ``s_e(t) = t + e sin(2 pi t) / (2 pi)``; both series."""

    family = "series_angle"

    def __init__(self, weight: float, alpha0: float, alpha_amp: float, alpha_coeff, eps0: float,
                 eps_amp: float, eps_coeff, n_grid: int = d1.MAP_GRID, declared_q: float = 1.5,
                 declared_beta: float = 1.0):
        self.alpha = _Series(weight, alpha_amp, alpha_coeff)
        self.eps = _Series(weight, eps_amp, eps_coeff)
        self.alpha0 = float(alpha0)
        self.eps0 = float(eps0)
        self.reach = self.alpha.terms
        self.n_grid = n_grid
        t = d1.uniform_grid(n_grid)
        self._sin = np.sin(2 * math.pi * t) / (2 * math.pi)
        bound = abs(self.eps0) + abs(eps_amp) * float(np.abs(self.eps.coeff).max()) * (1 + weight) / (1 - weight)
        if bound >= 1:
            raise CocycleError("sine amplitude series may reach 1; maps would not be diffeomorphisms")
        self.declared_q = declared_q
        self.declared_beta = declared_beta

    @property
    def window(self):
        return None

    def _value_at(self, sym, c):
        a = self.alpha0 + self.alpha.at(sym, c)
        e = self.eps0 + self.eps.at(sym, c)
        return d1.GridDiffeo(a + e * self._sin)


class MoebiusSeriesGenerator(Generator):
    """``A_x = M o Rot(alpha(x))`` as a projective map; ``alpha`` a series."""

    family = "moebius_series"

    def __init__(self, matrix, weight: float, alpha0: float, amp: float, coeff, declared_q: float = 1.5):
        self.matrix = np.asarray(matrix, dtype=float)
        self.alpha = _Series(weight, amp, coeff)
        self.alpha0 = float(alpha0)
        self.reach = self.alpha.terms
        self.declared_q = declared_q

    @property
    def window(self):
        return None

    def _value_at(self, sym, c):
        a = math.pi * (self.alpha0 + self.alpha.at(sym, c))
        rot = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        return d1.Moebius(self.matrix @ rot, normalize=True)


# ---------------------------------------------------------------------------
# cocycles and iterates


@dataclass(frozen=True)
class Cocycle:
    base: sft.SftSpace
    gen: Generator = field(repr=False)
    q: float = 1.5
    r: float = 1.25
    beta: float | None = None
    name: str = "custom"

    def __post_init__(self):
        if not self.r < self.q:
            raise CocycleError("target regularity r must be below q")
        if self.beta is None:
            object.__setattr__(self, "beta", float(self.gen.declared_beta))

    @property
    def rho(self) -> float:
        return self.q - self.r

    @property
    def lam(self) -> float:
        return self.base.lam


def iterates(c: Cocycle, x: sft.SftPoint, n_max: int, backward: bool = False) -> Iterator[tuple[int, d1.CircleMap, d1.CircleMap]]:
    """Yield ``(n, A_x^n, (A_x^n)^{-1})`` for n = 1..n_max (or -1..-n_max).

    Inverses are accumulated from generator inverses, never by root solving.
    """
    a: d1.CircleMap = d1.identity()
    ai: d1.CircleMap = d1.identity()
    if not backward:
        vals = c.gen.along(x, 0, n_max)
        invs = c.gen.along(x, 0, n_max, inverse=True)
        for i in range(n_max):
            a = d1.compose(vals[i], a)
            ai = d1.compose(ai, invs[i])
            yield i + 1, a, ai
    else:
        vals = c.gen.along(x, -n_max, 0)
        invs = c.gen.along(x, -n_max, 0, inverse=True)
        for m in range(1, n_max + 1):
            j = n_max - m  # position of f^{-m} x in the lists
            a = d1.compose(invs[j], a)
            ai = d1.compose(ai, vals[j])
            yield -m, a, ai


def iterate_pair(c: Cocycle, x: sft.SftPoint, n: int) -> tuple[d1.CircleMap, d1.CircleMap]:
    if n == 0:
        return d1.identity(), d1.identity()
    out = None
    for out in iterates(c, x, abs(n), backward=n < 0):
        pass
    return out[1], out[2]


def iterate(c: Cocycle, x: sft.SftPoint, n: int) -> d1.CircleMap:
    """``A(x, n)``; ``A(x, 0) = Id`` and negative n uses the inverse branch."""
    if n >= 0:
        return d1.compose_all(c.gen.along(x, 0, n))
    return d1.compose_all(reversed(c.gen.along(x, n, 0, inverse=True)))


def orbit_points(c: Cocycle, x: sft.SftPoint, t, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Image ``A_x^n(t)`` and ``log |D_t A_x^n|`` by the chain rule (pointwise, any sign of n)."""
    t = np.array(t, dtype=float, copy=True)
    logd = np.zeros_like(t)
    if n >= 0:
        for m in c.gen.along(x, 0, n):
            logd += np.log(m.derivative(1, t))
            t = m.lift(t)
    else:
        for m in reversed(c.gen.along(x, n, 0, inverse=True)):
            logd += np.log(m.derivative(1, t))
            t = m.lift(t)
    return t, logd


# ---------------------------------------------------------------------------
# periodic data


@dataclass(frozen=True)
class PeriodicDatum:
    point: sft.SftPoint
    period: int
    value: d1.CircleMap = field(repr=False)
    norm_q: d1.NormReport
    norm_1: d1.NormReport


@dataclass(frozen=True)
class PeriodicSummary:
    data: list[PeriodicDatum] = field(repr=False)
    sup_q: float
    sup_1: float
    sup_q_half: float
    sup_1_half: float
    growth_ratio: float
    bounded: bool


def periodic_data(c: Cocycle, k_max: int, n_eval: int = d1.EVAL_GRID, gate: float = 1.5,
                  budget: int = 200_000) -> PeriodicSummary:
    """All values ``A_p^k`` over points of minimal period ``k <= k_max``.

    ``bounded`` compares the sup over periods ``<= k_max`` with the sup over
    periods ``<= k_max // 2``; a ratio above ``gate`` flags growth.
    """
    data = []
    for p, k in sft.periodic_points(c.base, k_max, budget):
        val, inv = iterate_pair(c, p, k)
        nq = d1.norm_report(val, c.q, n_eval=n_eval, inverse=inv)
        n1 = d1.norm_report(val, 1.0, n_eval=n_eval, inverse=inv)
        data.append(PeriodicDatum(p, k, val, nq, n1))
    half = max(1, k_max // 2)
    sup_q = max(d.norm_q.two_sided for d in data)
    sup_1 = max(d.norm_1.two_sided for d in data)
    sup_q_half = max(d.norm_q.two_sided for d in data if d.period <= half)
    sup_1_half = max(d.norm_1.two_sided for d in data if d.period <= half)
    ratio = max(sup_q / sup_q_half, sup_1 / sup_1_half)
    return PeriodicSummary(data, sup_q, sup_1, sup_q_half, sup_1_half, ratio, ratio <= gate)


# ---------------------------------------------------------------------------
# growth scans


@dataclass(frozen=True)
class ScanRow:
    x_id: int
    n: int
    norm_r: float
    norm_1: float
    log_deriv_rate: float


@dataclass
class ScanResult:
    r: float
    rows: list[ScanRow] = field(repr=False)
    sup: float
    argmax: tuple[int, int]
    early: int
    sup_early: float
    ratio: float
    trend: str

    def sup_upto(self, n_abs: int) -> float:
        return max(row.norm_r for row in self.rows if abs(row.n) <= n_abs)

    def csv_lines(self) -> list[str]:
        out = ["x_id,n,norm_r,norm_1,log_deriv_rate"]
        out += [f"{w.x_id},{w.n},{w.norm_r!r},{w.norm_1!r},{w.log_deriv_rate!r}" for w in self.rows]
        return out


def _max_log_deriv(a: d1.CircleMap, n_eval: int) -> float:
    if isinstance(a, d1.Rotation):
        return 0.0
    return float(np.log(np.abs(a.grid_values(n_eval, 1)).max()))


def value_bound_scan(c: Cocycle, samples: Sequence[sft.SftPoint], n_max: int, r: float, early: int = 10,
                     flat_tol: float = 0.05, n_eval: int = d1.EVAL_GRID) -> ScanResult:
    """``|A_x^n|_{C^r}`` for every sample and ``|n| <= n_max``.

    ``trend`` is ``plateaued`` when the overall sup exceeds the sup over
    ``|n| <= early`` by less than ``flat_tol`` (relative), else ``growing``.
    """
    rows: list[ScanRow] = []
    for xi, x in enumerate(samples):
        rows.append(ScanRow(xi, 0, d1.two_sided_norm(d1.identity(), r, n_eval=n_eval),
                            d1.two_sided_norm(d1.identity(), 1.0, n_eval=n_eval), 0.0))
        for backward in (False, True):
            for n, a, ai in iterates(c, x, n_max, backward=backward):
                nr = d1.two_sided_norm(a, r, n_eval=n_eval, inverse=ai)
                n1 = nr if r == 1.0 else d1.two_sided_norm(a, 1.0, n_eval=n_eval, inverse=ai)
                rows.append(ScanRow(xi, n, nr, n1, _max_log_deriv(a, n_eval) / abs(n)))
    rows.sort(key=lambda w: (w.x_id, w.n))
    best = rows[0]
    for w in rows:
        if w.norm_r > best.norm_r:
            best = w
    early = min(early, n_max)
    sup_early = max(w.norm_r for w in rows if abs(w.n) <= early)
    ratio = best.norm_r / sup_early
    return ScanResult(r, rows, best.norm_r, (best.x_id, best.n), early, sup_early, ratio,
                      "plateaued" if ratio < 1 + flat_tol else "growing")


def growth_exponent(c: Cocycle, x: sft.SftPoint, t: float, n_max: int) -> dict[int, float]:
    """``n^{-1} log |D_t A_x^n|`` for n = +-1..+-n_max, accumulated in log space."""
    out: dict[int, float] = {}
    for sign in (1, -1):
        tt = np.array([float(t)])
        logd = 0.0
        if sign > 0:
            maps = c.gen.along(x, 0, n_max)
        else:
            maps = list(reversed(c.gen.along(x, -n_max, 0, inverse=True)))
        for m, g in enumerate(maps, start=1):
            logd += float(np.log(g.derivative(1, tt))[0])
            tt = g.lift(tt)
            out[sign * m] = logd / (sign * m)
    return dict(sorted(out.items()))


def norm_sequence(c: Cocycle, x: sft.SftPoint, n_max: int, q: float, n_eval: int = d1.EVAL_GRID) -> dict[int, float]:
    out = {0: d1.two_sided_norm(d1.identity(), q, n_eval=n_eval)}
    for backward in (False, True):
        for n, a, ai in iterates(c, x, n_max, backward=backward):
            out[n] = d1.two_sided_norm(a, q, n_eval=n_eval, inverse=ai)
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class SubexpRow:
    eps: float
    k_eps: float
    k_eps_half: float
    stable: bool


def subexp_fit(c: Cocycle, x: sft.SftPoint, n_max: int, q: float, eps_grid: Sequence[float],
               n_eval: int = d1.EVAL_GRID, norms: Mapping[int, float] | None = None) -> list[SubexpRow]:
    """``K_eps = max_{|n| <= n_max} |A_x^n|_{C^q} e^{-|n| eps}`` per eps.

    ``stable`` means the max is already attained (to 1%) on ``|n| <= n_max / 2``;
    otherwise the weighted norms are still increasing at the horizon.
    """
    seq = norms if norms is not None else norm_sequence(c, x, n_max, q, n_eval)
    half = n_max // 2
    rows = []
    for eps in eps_grid:
        w = {n: v * math.exp(-abs(n) * eps) for n, v in seq.items()}
        k_all = max(w.values())
        k_half = max(v for n, v in w.items() if abs(n) <= half)
        rows.append(SubexpRow(float(eps), k_all, k_half, k_all <= 1.01 * k_half))
    return rows


def measured_eps(norms: Mapping[int, float], n_max: int | None = None) -> float:
    """Exponential growth rate of the running sup: ``(log S(N) - log S(N/2)) / (N/2)``, floored at 0."""
    n_max = n_max or max(abs(n) for n in norms)
    half = n_max // 2
    s_all = max(v for n, v in norms.items() if abs(n) <= n_max)
    s_half = max(v for n, v in norms.items() if abs(n) <= half)
    return max(0.0, (math.log(s_all) - math.log(s_half)) / (n_max - half))


@dataclass(frozen=True)
class HolderFit:
    exact: bool
    slope: float | None
    constant: float | None
    distances: list[tuple[float, float]] = field(repr=False)
    note: str = ""


def holder_exponent_fit(c: Cocycle, pairs: Sequence[tuple[sft.SftPoint, sft.SftPoint]], r: float | None = None,
                        n_eval: int = d1.EVAL_GRID) -> HolderFit:
    """Fit ``d_{C^q}(A_x, A_y) ~ C d(x, y)^beta`` by log-log regression over the pairs."""
    r = c.q if r is None else r
    dist = []
    for x, y in pairs:
        dx = sft.metric(x, y)
        da = d1.dist_cr(c.gen.value(x), c.gen.value(y), r, n_eval=n_eval,
                        g_inv=c.gen.inverse_value(x), h_inv=c.gen.inverse_value(y))
        dist.append((dx, da))
    xs = [d for d, _ in dist]
    if len(set(xs)) < 2:
        raise CocycleError("degenerate pair set: base distances all equal")
    positive = [(dx, da) for dx, da in dist if da > 1e-14 and dx > 0]
    if c.gen.locally_constant:
        lo, hi = c.gen.window
        reach = max(abs(lo), abs(hi))
        cutoff = c.base.lam**reach
        inside = [da for dx, da in dist if dx < cutoff]
        if all(da <= 1e-14 for da in inside):
            return HolderFit(True, None, None, dist, f"exact: zero beyond window (d < lambda^{reach})")
    if not positive:
        return HolderFit(True, None, None, dist, "exact: all value distances vanish")
    if len({dx for dx, _ in positive}) < 2:
        raise CocycleError("degenerate pair set: nonzero distances at a single base distance")
    slope, intercept = loglog_slope([p[0] for p in positive], [p[1] for p in positive])
    return HolderFit(False, slope, math.exp(intercept), dist)
