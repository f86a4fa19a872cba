"""Orientation-preserving diffeomorphisms of the flat circle R/Z.

Every map is handled through a lift ``F`` with ``F(t + 1) = F(t) + 1``.
Three representations are supported: exact rotations, projective actions of
SL(2, R) ("Moebius" maps) and maps sampled on a uniform grid whose
displacement ``F(t) - t`` is interpolated trigonometrically.

The ``C^r`` sizes follow the usual convention

    ||g||_{C^{k+a}} = max_t d(g(t), t) + max_{1<=i<=k} sup |D^i g| + [D^k g]_a

where ``[.]_a`` is the ``a``-Hoelder seminorm restricted to pairs closer than
``eps0``. All sups are taken over a uniform evaluation grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * math.pi
DERIVATIVE_FLOOR = 1e-6
MAP_GRID = 1024
EVAL_GRID = 4096
EPS0 = 0.25
MAX_GRID = 16384
_TRIM = 1e-15
_TAIL = 1e-13


class DiffeoError(ValueError):
    pass


class CompositionError(DiffeoError):
    """Numerical composition left the space of diffeomorphisms (or the grid)."""


class InversionError(DiffeoError):
    pass


class FarApartError(DiffeoError):
    pass


def split_regularity(r: float) -> tuple[int, float]:
    k = int(math.floor(r + 1e-12))
    alpha = max(0.0, r - k)
    if alpha < 1e-12:
        alpha = 0.0
    return k, alpha


def circle_dist(a) -> np.ndarray:
    """Distance to the nearest integer, i.e. d_M between lifts differing by ``a``."""
    a = np.asarray(a, dtype=float)
    return np.abs(a - np.round(a))


def uniform_grid(n: int) -> np.ndarray:
    return np.arange(n) / n


# ---------------------------------------------------------------------------
# trigonometric helpers


def _coefficients(samples: np.ndarray) -> np.ndarray:
    """Complex coefficients c_k with f(t) = Re sum_k c_k exp(2 pi i k t)."""
    n = samples.size
    x = np.fft.rfft(samples) / n
    x[1:] *= 2.0
    if n % 2 == 0:
        x[-1] /= 2.0
    return x


def _trim(coef: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(coef).max()))
    big = np.nonzero(np.abs(coef) > _TRIM * scale)[0]
    last = int(big[-1]) if big.size else 0
    return coef[: max(last, 1) + 1].copy()


def _horner(coef: np.ndarray, t: np.ndarray, order: int = 0) -> np.ndarray:
    k = np.arange(coef.size)
    c = coef * (1j * TWO_PI * k) ** order if order else coef
    z = np.exp(1j * TWO_PI * t)
    acc = np.full(t.shape, c[-1], dtype=complex)
    for ck in c[-2::-1]:
        acc = acc * z + ck
    return acc.real


def _horner_pair(coef: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Series value and first derivative at t from one shared ``exp(2 pi i t)``."""
    dc = coef * (1j * TWO_PI * np.arange(coef.size))
    z = np.exp(1j * TWO_PI * t)
    acc = np.full(t.shape, coef[-1], dtype=complex)
    dacc = np.full(t.shape, dc[-1], dtype=complex)
    for ck, dk in zip(coef[-2::-1], dc[-2::-1]):
        acc = acc * z + ck
        dacc = dacc * z + dk
    return acc.real, dacc.real


def _uniform_eval(coef: np.ndarray, m: int, order: int = 0) -> np.ndarray:
    kmax = coef.size - 1
    if kmax >= m // 2:
        return _horner(coef, uniform_grid(m), order)
    k = np.arange(coef.size)
    c = coef * (1j * TWO_PI * k) ** order if order else coef
    spec = np.zeros(m // 2 + 1, dtype=complex)
    spec[: coef.size] = c * (m / 2.0)
    spec[0] = c[0] * m
    return np.fft.irfft(spec, m)


def holder_seminorm(values: np.ndarray, alpha: float, eps0: float = EPS0, period_shift: float = 0.0) -> float:
    """Grid Hoelder seminorm of a sampled periodic function (pairs with 0 < d < eps0).

    ``period_shift`` is added across the wrap, so lifts ``F(t+1) = F(t) + 1``
    can be passed directly.
    """
    if alpha <= 0.0:
        return 0.0
    n = values.size
    jmax = int(math.ceil(eps0 * n)) - 1
    if jmax < 1:
        return 0.0
    ext = np.concatenate([values, values[:jmax] + period_shift])
    steps = (np.arange(1, jmax + 1) / n) ** alpha
    best = 0.0
    for j in range(1, jmax + 1):
        d = float(np.abs(ext[j : j + n] - values).max()) / steps[j - 1]
        if d > best:
            best = d
    return best


# ---------------------------------------------------------------------------
# map representations


class CircleMap:
    """Common interface; subclasses supply ``lift``, ``derivative`` and samples."""

    kind = "abstract"

    def lift(self, t) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, order: int, t) -> np.ndarray:
        raise NotImplementedError

    def grid_values(self, m: int, order: int) -> np.ndarray:
        """Order 0: displacement ``F(t) - t``; order i >= 1: ``D^i g`` on the m-grid."""
        t = uniform_grid(m)
        if order == 0:
            return self.lift(t) - t
        return self.derivative(order, t)

    def __call__(self, t):
        return np.mod(self.lift(t), 1.0)

    @property
    def n_grid(self) -> int | None:
        return None

    def inverse(self) -> "CircleMap":
        raise NotImplementedError

    def to_grid(self, n: int = MAP_GRID) -> "GridDiffeo":
        t = uniform_grid(n)
        return GridDiffeo(self.lift(t) - t)


class Rotation(CircleMap):
    kind = "rotation"

    def __init__(self, angle: float):
        self.angle = float(angle) % 1.0

    def lift(self, t):
        return np.asarray(t, dtype=float) + self.angle

    def derivative(self, order, t):
        _check_order(order)
        t = np.asarray(t, dtype=float)
        return np.ones_like(t) if order == 1 else np.zeros_like(t)

    def inverse(self):
        return Rotation(-self.angle)

    def as_moebius(self) -> "Moebius":
        c, s = math.cos(math.pi * self.angle), math.sin(math.pi * self.angle)
        return Moebius(np.array([[c, -s], [s, c]]))

    def __repr__(self):
        return f"Rotation({self.angle!r})"


def identity() -> Rotation:
    return Rotation(0.0)


class Moebius(CircleMap):
    """Projective action of A in SL(2, R) on lines, with chart t -> angle pi t."""

    kind = "moebius"

    def __init__(self, matrix, normalize: bool = False):
        a = np.array(matrix, dtype=float).reshape(2, 2)
        det = float(np.linalg.det(a))
        if normalize:
            if det <= 0:
                raise DiffeoError("Moebius matrix must have positive determinant")
            a = a / math.sqrt(det)
        elif abs(det - 1.0) > 1e-12:
            raise DiffeoError(f"Moebius matrix must have determinant 1 (got {det!r})")
        self.matrix = a
        u, p = scipy.linalg.polar(a)
        self._p = p
        self._omega = math.atan2(u[1, 0], u[0, 0]) % math.pi

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def classification(self) -> str:
        tr = abs(self.trace)
        if abs(tr - 2.0) < 1e-12:
            return "parabolic"
        return "elliptic" if tr < 2.0 else "hyperbolic"

    def lift(self, t):
        t = np.asarray(t, dtype=float)
        th = math.pi * t
        c, s = np.cos(th), np.sin(th)
        p = self._p
        px = p[0, 0] * c + p[0, 1] * s
        py = p[1, 0] * c + p[1, 1] * s
        psi = np.arctan2(c * py - s * px, c * px + s * py)
        return t + (psi + self._omega) / math.pi

    def _n(self, t):
        # N = |A v|^2 with v = (cos pi t, sin pi t), and its t-derivatives;
        # evaluated from A v directly to avoid cancellation for large |A|
        th = math.pi * np.asarray(t, dtype=float)
        c, s = np.cos(th), np.sin(th)
        a = self.matrix
        w = np.stack([a[0, 0] * c + a[0, 1] * s, a[1, 0] * c + a[1, 1] * s])
        w1 = np.stack([-a[0, 0] * s + a[0, 1] * c, -a[1, 0] * s + a[1, 1] * c])
        n0 = (w * w).sum(axis=0)
        n1 = 2.0 * math.pi * (w * w1).sum(axis=0)
        n2 = 2.0 * math.pi**2 * ((w1 * w1).sum(axis=0) - n0)
        return n0, n1, n2

    def derivative(self, order, t):
        _check_order(order)
        n0, n1, n2 = self._n(t)
        if order == 1:
            return 1.0 / n0
        if order == 2:
            return -n1 / n0**2
        return -n2 / n0**2 + 2.0 * n1**2 / n0**3

    def inverse(self):
        a = self.matrix
        return Moebius(np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]))

    def __repr__(self):
        return f"Moebius({self.matrix.tolist()!r})"


class GridDiffeo(CircleMap):
    """Map with displacement sampled on ``n`` uniform points (power of two)."""

    kind = "grid"

    def __init__(self, displacement, check: bool = True):
        phi = np.array(displacement, dtype=float)
        n = phi.size
        if n < 8 or n & (n - 1):
            raise DiffeoError("grid size must be a power of two >= 8")
        phi -= round(float(phi.mean()))
        self.displacement = phi
        self.coef = _trim(_coefficients(phi))
        self._inverse = None
        if check:
            d1 = 1.0 + _uniform_eval(self.coef, 2 * n, 1)
            if d1.min() <= DERIVATIVE_FLOOR:
                raise CompositionError(
                    f"derivative {d1.min():.3e} below floor {DERIVATIVE_FLOOR:g}; map is not a diffeomorphism "
                    "at this resolution"
                )

    @classmethod
    def from_function(cls, fn, n: int = MAP_GRID) -> "GridDiffeo":
        t = uniform_grid(n)
        return cls(np.asarray(fn(t), dtype=float) - t)

    @classmethod
    def from_fourier(cls, n: int = MAP_GRID, const: float = 0.0, cos: Sequence[float] = (), sin: Sequence[float] = ()) -> "GridDiffeo":
        """Displacement ``const + sum_j cos[j-1] cos(2 pi j t) + sin[j-1] sin(2 pi j t)``."""
        t = uniform_grid(n)
        phi = np.full(n, float(const))
        for j, a in enumerate(cos, start=1):
            phi += float(a) * np.cos(TWO_PI * j * t)
        for j, b in enumerate(sin, start=1):
            phi += float(b) * np.sin(TWO_PI * j * t)
        return cls(phi)

    @property
    def n_grid(self) -> int:
        return self.displacement.size

    @property
    def bandwidth(self) -> int:
        return self.coef.size - 1

    @property
    def resolved(self) -> bool:
        """Spectrum has decayed well before the Nyquist band."""
        cut = (3 * self.n_grid) // 8
        if self.coef.size <= cut:
            return True
        scale = max(1.0, float(np.abs(self.coef).max()))
        return float(np.abs(self.coef[cut:]).max()) <= _TAIL * scale

    def lift(self, t):
        t = np.asarray(t, dtype=float)
        return t + _horner(self.coef, t)

    def derivative(self, order, t):
        _check_order(order)
        t = np.asarray(t, dtype=float)
        d = _horner(self.coef, t, order)
        return 1.0 + d if order == 1 else d

    def grid_values(self, m, order):
        vals = _uniform_eval(self.coef, m, order)
        return 1.0 + vals if order == 1 else vals

    def inverse(self) -> "GridDiffeo":
        if self._inverse is None:
            self._inverse = _invert_grid(self)
            self._inverse._inverse = self
        return self._inverse

    def __repr__(self):
        return f"GridDiffeo(n={self.n_grid}, bandwidth={self.bandwidth})"


def _check_order(order: int):
    if order not in (1, 2, 3):
        raise DiffeoError(f"unsupported derivative order {order}")


def _invert_grid(g: GridDiffeo, tol: float = 1e-13, max_iter: int = 200) -> GridDiffeo:
    n = g.n_grid
    while True:
        out = GridDiffeo(_invert_samples(g, n, tol, max_iter), check=False)
        if out.resolved or n >= MAX_GRID:
            return out
        n *= 2


def _invert_samples(g: CircleMap, n: int, tol: float, max_iter: int) -> np.ndarray:
    t = uniform_grid(n)
    phi = g.grid_values(n, 0)
    # off-grid extrema of phi exceed the sampled ones by at most sup|phi'| / (2n)
    pad = (1.0 + float(np.abs(g.grid_values(n, 1) - 1.0).max())) / n
    lo = t - phi.max() - pad
    hi = t - phi.min() + pad
    s = t - phi
    for _ in range(max_iter):
        if isinstance(g, GridDiffeo):
            disp, slope = _horner_pair(g.coef, s)
            f, deriv = s + disp - t, 1.0 + slope
        else:
            f, deriv = g.lift(s) - t, g.derivative(1, s)
        if np.abs(f).max() <= tol:
            break
        hi = np.where(f > 0, s, hi)
        lo = np.where(f < 0, s, lo)
        step = s - f / deriv
        bad = (step <= lo) | (step >= hi) | ~np.isfinite(step)
        s = np.where(bad, 0.5 * (lo + hi), step)
    else:
        raise InversionError("monotone root solve did not converge")
    return s - t


# ---------------------------------------------------------------------------
# group operations


def _as_moebius(g: CircleMap) -> Moebius | None:
    if isinstance(g, Moebius):
        return g
    if isinstance(g, Rotation):
        return g.as_moebius()
    return None


def compose(g: CircleMap, h: CircleMap, n_grid: int | None = None) -> CircleMap:
    """``g o h`` (apply h first)."""
    if isinstance(g, Rotation) and isinstance(h, Rotation):
        return Rotation(g.angle + h.angle)
    if isinstance(g, Rotation) and g.angle == 0.0:
        return h
    if isinstance(h, Rotation) and h.angle == 0.0:
        return g
    mg, mh = _as_moebius(g), _as_moebius(h)
    if mg is not None and mh is not None:
        prod = mg.matrix @ mh.matrix
        return Moebius(prod, normalize=True)
    if isinstance(g, Rotation) and isinstance(h, GridDiffeo):
        return GridDiffeo(h.displacement + g.angle, check=False)
    if isinstance(g, GridDiffeo) and isinstance(h, Rotation):
        return _precompose_rotation(g, h.angle)
    n = n_grid or max(x for x in (g.n_grid, h.n_grid, MAP_GRID) if x)
    while True:
        t = uniform_grid(n)
        out = GridDiffeo(g.lift(t + h.grid_values(n, 0)) - t)
        if out.resolved or n_grid is not None:
            return out
        if n >= MAX_GRID:
            raise CompositionError(f"composition not resolved at {n} grid points")
        n *= 2


def _precompose_rotation(g: GridDiffeo, a: float) -> GridDiffeo:
    # t -> g(t + a): phase shift of every Fourier mode
    n = g.n_grid
    coef = g.coef * np.exp(1j * TWO_PI * a * np.arange(g.coef.size))
    return GridDiffeo(a + _uniform_eval(coef, n), check=False)


def compose_all(maps: Iterable[CircleMap]) -> CircleMap:
    """``m_last o ... o m_first`` for maps listed in application order."""
    out: CircleMap = identity()
    for m in maps:
        out = compose(m, out)
    return out


def invert(g: CircleMap) -> CircleMap:
    return g.inverse()


def derivative(g: CircleMap, order: int, t) -> np.ndarray:
    return g.derivative(order, t)


def sup_distance(g: CircleMap, h: CircleMap, n_eval: int = EVAL_GRID) -> float:
    """``max_t d_M(g(t), h(t))`` on the evaluation grid."""
    return float(circle_dist(g.grid_values(n_eval, 0) - h.grid_values(n_eval, 0)).max())


def dist_c0(g: CircleMap, h: CircleMap, n_eval: int = EVAL_GRID) -> float:
    return sup_distance(g, h, n_eval) + sup_distance(g.inverse(), h.inverse(), n_eval)


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class NormReport:
    r: float
    sup_displacement: float
    deriv_sups: tuple[float, ...]
    holder_seminorm: float
    one_sided: float
    two_sided: float
    inverse_one_sided: float


def _one_sided_parts(g: CircleMap, r: float, eps0: float, n_eval: int):
    k, alpha = split_regularity(r)
    if isinstance(g, Rotation):
        disp = float(circle_dist(g.angle))
        sups = tuple(1.0 if i == 1 else 0.0 for i in range(1, k + 1))
        return disp, sups, 0.0
    phi = g.grid_values(n_eval, 0)
    disp = float(circle_dist(phi).max())
    sups = []
    top = None
    for i in range(1, k + 1):
        d = g.grid_values(n_eval, i)
        sups.append(float(np.abs(d).max()))
        top = d
    if k == 0:
        holder = holder_seminorm(uniform_grid(n_eval) + phi, alpha, eps0, period_shift=1.0)
    else:
        holder = holder_seminorm(top, alpha, eps0)
    return disp, tuple(sups), holder


def one_sided_norm(g: CircleMap, r: float, eps0: float = EPS0, n_eval: int = EVAL_GRID) -> float:
    disp, sups, holder = _one_sided_parts(g, r, eps0, n_eval)
    return disp + (max(sups) if sups else 0.0) + holder


def norm_report(g: CircleMap, r: float, eps0: float = EPS0, n_eval: int = EVAL_GRID, inverse: CircleMap | None = None) -> NormReport:
    if not 0.0 < eps0 <= 0.25:
        raise DiffeoError("eps0 must lie in (0, 1/4]")
    disp, sups, holder = _one_sided_parts(g, r, eps0, n_eval)
    one = disp + (max(sups) if sups else 0.0) + holder
    inv = inverse if inverse is not None else g.inverse()
    inv_one = one_sided_norm(inv, r, eps0, n_eval)
    return NormReport(r, disp, sups, holder, one, one + inv_one, inv_one)


def two_sided_norm(g: CircleMap, r: float, eps0: float = EPS0, n_eval: int = EVAL_GRID, inverse: CircleMap | None = None) -> float:
    inv = inverse if inverse is not None else g.inverse()
    return one_sided_norm(g, r, eps0, n_eval) + one_sided_norm(inv, r, eps0, n_eval)


def _difference_norm(g: CircleMap, h: CircleMap, r: float, eps0: float, n_eval: int) -> float:
    k, alpha = split_regularity(r)
    if isinstance(g, Rotation) and isinstance(h, Rotation):
        delta = g.angle - h.angle
        delta -= round(delta)
        if abs(delta) >= 0.5:
            raise FarApartError("maps are too far apart to align lifts")
        return abs(delta)
    delta = g.grid_values(n_eval, 0) - h.grid_values(n_eval, 0)
    delta -= round(float(delta.mean()))
    total = float(np.abs(delta).max())
    if total >= 0.5:
        raise FarApartError("maps are too far apart to align lifts")
    top = delta
    if k >= 1:
        sups = []
        for i in range(1, k + 1):
            top = g.grid_values(n_eval, i) - h.grid_values(n_eval, i)
            sups.append(float(np.abs(top).max()))
        total += max(sups)
    return total + holder_seminorm(top, alpha, eps0)


def dist_cr(g: CircleMap, h: CircleMap, r: float, eps0: float = EPS0, n_eval: int = EVAL_GRID,
            g_inv: CircleMap | None = None, h_inv: CircleMap | None = None) -> float:
    """``||g - h||_{C^r} + ||g^-1 - h^-1||_{C^r}`` on aligned lifts."""
    g_inv = g_inv if g_inv is not None else g.inverse()
    h_inv = h_inv if h_inv is not None else h.inverse()
    return _difference_norm(g, h, r, eps0, n_eval) + _difference_norm(g_inv, h_inv, r, eps0, n_eval)


def fit_inequality_constant(pairs: Iterable[tuple[float, float]]) -> float:
    """Smallest C with lhs <= C * rhs over the sample."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no pairs to fit")
    best = -math.inf
    for lhs, rhs in pairs:
        if not rhs > 0:
            raise ValueError("right-hand sides must be positive")
        best = max(best, lhs / rhs)
    return float(best)


# ---------------------------------------------------------------------------
# convenient constructors


def sine_map(eps: float, n: int = MAP_GRID, shift: float = 0.0, harmonic: int = 1) -> GridDiffeo:
    """``t + shift + eps sin(2 pi m t) / (2 pi m)``; a diffeomorphism for |eps| < 1."""
    if abs(eps) >= 1.0:
        raise DiffeoError("|eps| must be < 1")
    t = uniform_grid(n)
    return GridDiffeo(shift + eps * np.sin(TWO_PI * harmonic * t) / (TWO_PI * harmonic))


def random_smooth(rng: np.random.Generator, n: int = MAP_GRID, modes: int = 3, amplitude: float = 0.5) -> GridDiffeo:
    """Random band-limited diffeomorphism with ``min D g >= 1 - amplitude``."""
    a = rng.normal(size=modes)
    b = rng.normal(size=modes)
    j = np.arange(1, modes + 1)
    lip = float(np.sum(TWO_PI * j * np.hypot(a, b)))
    scale = amplitude / lip
    shift = float(rng.random())
    return GridDiffeo.from_fourier(n, shift, a * scale, b * scale)
