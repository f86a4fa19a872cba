"""Symmetric positive definite forms with the affine-invariant metric.

``d(A, B) = ||log(A^{-1/2} B A^{-1/2})||_F``. The space has non-positive
curvature, so finite sets have a unique minimal enclosing ball. For m = 1 the
ball is the log-midpoint; for m >= 2 the center is found by iterating an exact
Euclidean enclosing ball in the tangent space at the current center. Because
the exponential map of a non-positively curved space does not decrease
distances, the Euclidean radius of the log-vectors is a lower bound for the
optimal radius, which certifies the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

SYM_TOL = 1e-12
EIG_FLOOR = 1e-10


class SpdError(ValueError):
    pass


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _fun(a: np.ndarray, f) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return _sym((v * f(w)) @ v.T)


@dataclass(frozen=True, eq=False)
class SpdPoint:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpdError("matrix must be square")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > SYM_TOL * scale:
            raise SpdError("matrix is not symmetric")
        m = _sym(m)
        if np.linalg.eigvalsh(m).min() <= EIG_FLOOR:
            raise SpdError("matrix is not positive definite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def scalar(cls, a: float) -> "SpdPoint":
        return cls(np.array([[float(a)]]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def sqrt(self) -> np.ndarray:
        return _fun(self.matrix, np.sqrt)

    def inv_sqrt(self) -> np.ndarray:
        return _fun(self.matrix, lambda w: 1.0 / np.sqrt(w))

    def to_list(self) -> list[list[float]]:
        return self.matrix.tolist()

    def __repr__(self):
        return f"SpdPoint({self.matrix.tolist()!r})"


def as_spd(p) -> SpdPoint:
    if isinstance(p, SpdPoint):
        return p
    if np.isscalar(p):
        return SpdPoint.scalar(p)
    return SpdPoint(np.asarray(p, dtype=float))


def _same_dim(a: SpdPoint, b: SpdPoint):
    if a.dim != b.dim:
        raise SpdError(f"dimension mismatch: {a.dim} vs {b.dim}")


def dist(a, b) -> float:
    """Affine-invariant distance; ``|log a - log b|`` when m = 1."""
    a, b = as_spd(a), as_spd(b)
    _same_dim(a, b)
    if np.array_equal(a.matrix, b.matrix):
        return 0.0
    if a.dim == 1:
        return abs(math.log(b.matrix[0, 0]) - math.log(a.matrix[0, 0]))
    w = scipy.linalg.eigh(b.matrix, a.matrix, eigvals_only=True)
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def log_at(c: SpdPoint, p: SpdPoint) -> np.ndarray:
    """Tangent vector at c in whitened coordinates: ``log(c^{-1/2} p c^{-1/2})``; its Frobenius norm is d(c, p)."""
    ci = c.inv_sqrt()
    return _fun(_sym(ci @ p.matrix @ ci), np.log)


def exp_at(c: SpdPoint, v: np.ndarray) -> SpdPoint:
    cs = c.sqrt()
    return SpdPoint(_sym(cs @ _fun(_sym(v), np.exp) @ cs))


def geodesic(a, b, s: float) -> SpdPoint:
    """``a^{1/2} (a^{-1/2} b a^{-1/2})^s a^{1/2}``."""
    a, b = as_spd(a), as_spd(b)
    _same_dim(a, b)
    if s == 0:
        return a
    if s == 1:
        return b
    if a.dim == 1:
        return SpdPoint.scalar(a.matrix[0, 0] ** (1 - s) * b.matrix[0, 0] ** s)
    with np.errstate(under="ignore"):  # denormal s: the tangent step flushes to zero, which is exact enough
        return exp_at(a, s * log_at(a, b))


def pullback(e, l) -> SpdPoint:
    """``L^T E L``."""
    e = as_spd(e)
    l = np.atleast_2d(np.asarray(l, dtype=float))
    if l.shape != e.matrix.shape:
        raise SpdError("dimension mismatch")
    if np.linalg.matrix_rank(l) < l.shape[0]:
        raise SpdError("L is singular")
    return SpdPoint(_sym(l.T @ e.matrix @ l))


# ---------------------------------------------------------------------------
# Euclidean minimal enclosing ball (Welzl, move-to-front)


def _ball_through(pts: list[np.ndarray]) -> tuple[np.ndarray, float]:
    if not pts:
        return None, -1.0
    p0 = pts[0]
    if len(pts) == 1:
        return p0.copy(), 0.0
    a = np.array([p - p0 for p in pts[1:]])
    g = a @ a.T
    rhs = 0.5 * np.einsum("ij,ij->i", a, a)
    lam = np.linalg.lstsq(g, rhs, rcond=None)[0]
    c = p0 + lam @ a
    return c, float(np.linalg.norm(c - p0))


def euclidean_meb(points: np.ndarray, rtol: float = 1e-13) -> tuple[np.ndarray, float, list[int]]:
    """Exact smallest enclosing ball of a point cloud; returns (center, radius, support indices)."""
    pts = [np.asarray(p, dtype=float) for p in points]
    n = len(pts)
    if n == 0:
        raise SpdError("empty point set")
    dim = pts[0].size
    scale = max(1.0, max(float(np.abs(p).max()) for p in pts))
    slack = rtol * scale

    def inside(c, r, p):
        return r >= 0 and np.linalg.norm(p - c) <= r + slack

    # iterative Welzl with move-to-front on indices
    order = list(range(n))

    def mtf(limit: int, support: list[int]):
        c, r = _ball_through([pts[i] for i in support])
        if len(support) == dim + 1:
            return c, r
        i = 0
        while i < limit:
            j = order[i]
            if not inside(c, r, pts[j]):
                c, r = mtf(i, support + [j])
                order.insert(0, order.pop(i))
            i += 1
        return c, r

    c, r = mtf(n, [])
    far = max(float(np.linalg.norm(p - c)) for p in pts)
    support = [i for i in range(n) if far - float(np.linalg.norm(pts[i] - c)) <= 1e3 * slack]
    return c, far, support


# ---------------------------------------------------------------------------
# minimal enclosing ball in the SPD space


@dataclass
class Ball:
    center: SpdPoint
    radius: float
    lower_bound: float = 0.0
    iterations: int = 0
    method: str = "closed-form"
    support: list[int] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.radius - self.lower_bound

    def to_dict(self) -> dict:
        return {"center": self.center.to_list(), "radius": self.radius, "lower_bound": self.lower_bound,
                "iterations": self.iterations, "method": self.method, "support": list(self.support)}


def _sym_to_vec(v: np.ndarray) -> np.ndarray:
    """Symmetric matrix to a vector with the Frobenius inner product."""
    iu = np.triu_indices(v.shape[0], 1)
    return np.concatenate([np.diag(v), math.sqrt(2.0) * v[iu]])


def _vec_to_sym(x: np.ndarray, m: int) -> np.ndarray:
    out = np.diag(x[:m])
    iu = np.triu_indices(m, 1)
    out[iu] = x[m:] / math.sqrt(2.0)
    return out + np.triu(out, 1).T


def _tangent_certificate(c: SpdPoint, pts: Sequence[SpdPoint]):
    m = c.dim
    vecs = np.array([_sym_to_vec(log_at(c, p)) for p in pts])
    ec, er, sup = euclidean_meb(vecs)
    upper = float(np.linalg.norm(vecs, axis=1).max())
    return vecs, ec, er, sup, upper, m


def _meb_tangent(pts: Sequence[SpdPoint], tol: float, max_iter: int) -> Ball:
    c = pts[0]
    for it in range(1, max_iter + 1):
        vecs, ec, er, sup, upper, m = _tangent_certificate(c, pts)
        if upper - er <= tol:
            return Ball(c, upper, er, it, "tangent", sup)
        c = exp_at(c, _vec_to_sym(ec, m))
    vecs, ec, er, sup, upper, m = _tangent_certificate(c, pts)
    return Ball(c, upper, er, max_iter, "tangent", sup)


def _meb_farthest(pts: Sequence[SpdPoint], tol: float, max_iter: int) -> Ball:
    c = pts[0]
    it = 0
    for it in range(1, max_iter + 1):
        d = [dist(c, p) for p in pts]
        j = int(np.argmax(d))  # first index wins ties
        nxt = geodesic(c, pts[j], 1.0 / (it + 1))
        step = dist(c, nxt)
        c = nxt
        if step < tol:
            break
    vecs, ec, er, sup, upper, m = _tangent_certificate(c, pts)
    return Ball(c, upper, er, it, "farthest", sup)


def min_enclosing_ball(points, tol: float = 1e-10, method: str = "auto", max_iter: int = 500) -> Ball:
    """Smallest closed ball containing the points.

    ``method``: ``auto`` (closed form for m = 1, tangent iteration otherwise),
    ``tangent`` or ``farthest`` (geodesic step of length 1/(k+1) toward the
    farthest point; Cauchy stop). The returned ``lower_bound`` certifies that
    no ball of smaller radius exists.
    """
    pts = [as_spd(p) for p in points]
    if not pts:
        raise SpdError("empty point set")
    for p in pts[1:]:
        _same_dim(pts[0], p)
    if len(pts) == 1:
        return Ball(pts[0], 0.0, 0.0, 0, "closed-form", [0])
    if method == "auto" and pts[0].dim == 1:
        logs = np.array([math.log(p.matrix[0, 0]) for p in pts])
        lo, hi = int(np.argmin(logs)), int(np.argmax(logs))
        rad = (logs[hi] - logs[lo]) / 2
        return Ball(SpdPoint.scalar(math.exp((logs[lo] + logs[hi]) / 2)), float(rad), float(rad), 0,
                    "closed-form", sorted({lo, hi}))
    if method in ("auto", "tangent"):
        return _meb_tangent(pts, tol, max_iter)
    if method == "farthest":
        return _meb_farthest(pts, tol, max_iter)
    raise SpdError(f"unknown method {method!r}")


def hausdorff(s1, s2) -> float:
    a = [as_spd(p) for p in s1]
    b = [as_spd(p) for p in s2]
    if not a or not b:
        raise SpdError("empty set")
    d = np.array([[dist(p, q) for q in b] for p in a])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def center_shift_bound(r1: float, r2: float, dh: float) -> float:
    """Upper bound for the distance between the centers of two enclosing balls.

    If ``F = max_p d(., p)^2`` then in non-positive curvature
    ``F(z) >= r^2 + d(z, c)^2 / 2`` around the center c; with
    ``max_{S2} d(c1, .) <= r1 + dh`` and the symmetric statement this gives
    ``d(c1, c2)^2 <= 2 dh (r1 + r2 + dh)``. The linear bound ``dh`` holds
    for m = 1 only (centers are midpoints of extreme logs).
    """
    return math.sqrt(2.0 * dh * (r1 + r2 + dh))


def flat_counterexample() -> tuple[list[SpdPoint], list[SpdPoint]]:
    """Two diagonal sets whose centers are about 3 times their Hausdorff distance apart.

    Diagonal matrices form a flat, so the balls are Euclidean balls of the log-vectors.
    """
    s1 = [(0.2458081, 1.01080135), (0.31885359, 0.62804625), (-1.50714725, 0.34425767), (0.11884639, 0.71567807)]
    s2 = [(0.23397825, 1.01984561), (0.33748852, 0.62151167), (-1.5058861, 0.34838141), (0.1285881, 0.70868827)]
    return ([SpdPoint(np.diag(np.exp(v))) for v in s1], [SpdPoint(np.diag(np.exp(v))) for v in s2])


def perturbation_bound_check(tau, l) -> tuple[float, float]:
    """``(d(tau, L^T tau L), ||L - I||)`` with the operator 2-norm."""
    tau = as_spd(tau)
    l = np.atleast_2d(np.asarray(l, dtype=float))
    return dist(tau, pullback(tau, l)), float(np.linalg.norm(l - np.eye(l.shape[0]), 2))


def random_spd(rng: np.random.Generator, m: int, log_spread: float = 1.0) -> SpdPoint:
    """``Q diag(exp(u)) Q^T`` with Q Haar-orthogonal and u uniform in [-spread, spread]."""
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    w = np.exp(rng.uniform(-log_spread, log_spread, m))
    return SpdPoint(_sym((q * w) @ q.T))
