"""Mixing subshifts of finite type.

Points are two-sided sequences that are eventually periodic in both
directions, stored as ``left_period + core + right_period`` and kept in a
canonical form so that dataclass equality coincides with equality of the
underlying sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

import numpy as np


class SftError(ValueError):
    """Base class for invalid symbolic input."""


class NotMixingError(SftError):
    pass


class InadmissibleError(SftError):
    pass


class BracketUndefinedError(SftError):
    pass


class NoShadowingError(SftError):
    pass


class BudgetExceededError(SftError):
    pass


def _primitive_root(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


@dataclass(frozen=True)
class SftSpace:
    transition: tuple[tuple[int, ...], ...]
    lam: float = 0.5
    max_mixing_power: int = 64

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.transition)
        object.__setattr__(self, "transition", rows)
        k = len(rows)
        if k < 2:
            raise SftError("alphabet must have at least two symbols")
        if any(len(row) != k for row in rows):
            raise SftError("transition matrix must be square")
        if any(v not in (0, 1) for row in rows for v in row):
            raise SftError("transition entries must be 0 or 1")
        if not 0.0 < self.lam < 1.0:
            raise SftError("lambda must lie in (0, 1)")
        m = self.matrix
        if (m.sum(axis=1) == 0).any() or (m.sum(axis=0) == 0).any():
            raise SftError("transition matrix has a dead symbol")
        _ = self.mixing_power

    @classmethod
    def full_shift(cls, k: int = 2, lam: float = 0.5) -> "SftSpace":
        return cls(tuple(tuple(1 for _ in range(k)) for _ in range(k)), lam)

    @classmethod
    def golden_mean(cls, lam: float = 0.5) -> "SftSpace":
        return cls(((1, 1), (1, 0)), lam)

    @property
    def alphabet_size(self) -> int:
        return len(self.transition)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.transition, dtype=np.int64)

    @cached_property
    def mixing_power(self) -> int:
        m = self.matrix
        power = m.copy()
        for n in range(1, self.max_mixing_power + 1):
            if (power > 0).all():
                return n
            power = np.minimum(power @ m, 1)
        raise NotMixingError("transition matrix is not primitive")

    def allowed(self, a: int, b: int) -> bool:
        return self.transition[a][b] == 1

    def admissible(self, word: Sequence[int], cyclic: bool = False) -> bool:
        k = self.alphabet_size
        if any(not 0 <= s < k for s in word):
            return False
        ok = all(self.allowed(a, b) for a, b in zip(word, word[1:]))
        if cyclic and word:
            ok = ok and self.allowed(word[-1], word[0])
        return ok

    def words(self, length: int) -> Iterator[tuple[int, ...]]:
        """Admissible words of the given length in lexicographic order."""
        if length <= 0:
            yield ()
            return
        stack = [(s,) for s in reversed(range(self.alphabet_size))]
        while stack:
            w = stack.pop()
            if len(w) == length:
                yield w
                continue
            for s in reversed(range(self.alphabet_size)):
                if self.allowed(w[-1], s):
                    stack.append(w + (s,))

    def connecting_word(self, a: int, b: int, max_len: int | None = None) -> tuple[int, ...]:
        """Shortest, then lexicographically smallest, word c with a·c·b admissible."""
        if max_len is None:
            max_len = self.mixing_power
        for length in range(0, max_len + 1):
            for c in self.words(length) if length else [()]:
                w = (a, *c, b)
                if self.admissible(w):
                    return c
        raise SftError(f"no connecting word from {a} to {b}")

    def cycle_through(self, a: int) -> tuple[int, ...]:
        """Shortest admissible cyclic word starting with symbol ``a``."""
        if self.allowed(a, a):
            return (a,)
        return (a, *self.connecting_word(a, a))

    def point(self, left, core, core_start: int, right) -> "SftPoint":
        return SftPoint.build(self, left, core, core_start, right)

    def periodic_point(self, word: Sequence[int]) -> "SftPoint":
        word = tuple(word)
        if not self.admissible(word, cyclic=True):
            raise InadmissibleError(f"word {word} is not cyclically admissible")
        return SftPoint.build(self, word, (), 0, word)

    def from_window(self, symbols: Sequence[int], start: int) -> "SftPoint":
        """Point agreeing with ``symbols`` on ``[start, start+len)`` with cyclic tails."""
        symbols = tuple(int(s) for s in symbols)
        if not symbols:
            raise SftError("empty window")
        last = symbols[-1]
        cyc = self.cycle_through(last)
        right = cyc[1:] + cyc[:1]
        first = symbols[0]
        back = self.cycle_through_backward(first)
        return SftPoint.build(self, back, symbols, start, right)

    def cycle_through_backward(self, a: int) -> tuple[int, ...]:
        """Cyclic word whose last symbol may precede ``a`` (usable as a left period)."""
        # (a, c1, ..., cj) with cj -> a admissible
        return self.cycle_through(a)


@dataclass(frozen=True)
class SftPoint:
    """Eventually periodic admissible bi-infinite sequence in canonical form."""

    space: SftSpace = field(repr=False)
    left_period: tuple[int, ...]
    core: tuple[int, ...]
    core_start: int
    right_period: tuple[int, ...]

    @classmethod
    def build(cls, space, left, core, core_start, right) -> "SftPoint":
        left = tuple(int(s) for s in left)
        core = tuple(int(s) for s in core)
        right = tuple(int(s) for s in right)
        if not left or not right:
            raise SftError("periods must be nonempty")
        seq = left + core + right
        if not (
            space.admissible(left, cyclic=True)
            and space.admissible(right, cyclic=True)
            and space.admissible(seq)
        ):
            raise InadmissibleError("point representation is not admissible")
        return _canonical(space, left, core, int(core_start), right)

    @property
    def core_end(self) -> int:
        return self.core_start + len(self.core)

    @property
    def is_periodic(self) -> bool:
        return not self.core and self.left_period == self.right_period and self.core_start == 0

    @property
    def period(self) -> int | None:
        return len(self.right_period) if self.is_periodic else None

    def symbol_at(self, i: int) -> int:
        if i < self.core_start:
            p = self.left_period
            return p[(i - self.core_start) % len(p)]
        if i >= self.core_end:
            p = self.right_period
            return p[(i - self.core_end) % len(p)]
        return self.core[i - self.core_start]

    def window(self, lo: int, hi: int) -> tuple[int, ...]:
        """Symbols on the closed index range ``[lo, hi]``."""
        return tuple(self.symbol_at(i) for i in range(lo, hi + 1))

    def window_array(self, lo: int, hi: int) -> np.ndarray:
        idx = np.arange(lo, hi + 1)
        out = np.empty(idx.size, dtype=np.int64)
        left = np.array(self.left_period)
        right = np.array(self.right_period)
        m_left = idx < self.core_start
        m_right = idx >= self.core_end
        m_core = ~(m_left | m_right)
        out[m_left] = left[(idx[m_left] - self.core_start) % left.size]
        out[m_right] = right[(idx[m_right] - self.core_end) % right.size]
        if m_core.any():
            out[m_core] = np.array(self.core)[idx[m_core] - self.core_start]
        return out

    def reach(self) -> int:
        """Index radius beyond which both tails are purely periodic."""
        return max(abs(self.core_start), abs(self.core_end)) + 1

    def serialize(self) -> str:
        word = lambda w: "".join(str(s) for s in w)
        return f"{word(self.left_period)}|{word(self.core)}@{self.core_start}|{word(self.right_period)}"

    def __str__(self) -> str:
        return self.serialize()


def parse_point(space: SftSpace, text: str) -> SftPoint:
    """Inverse of :meth:`SftPoint.serialize` (``left|core@start|right``)."""
    try:
        left, rest, right = text.split("|")
        core, start = rest.split("@")
    except ValueError as exc:
        raise SftError(f"malformed point literal {text!r}") from exc
    digits = lambda w: tuple(int(c) for c in w)
    return SftPoint.build(space, digits(left), digits(core), int(start), digits(right))


def _canonical(space, left, core, start, right) -> SftPoint:
    left = _primitive_root(left)
    right = _primitive_root(right)
    end = start + len(core)
    pl, pr = len(left), len(right)

    def raw(i):
        if i < start:
            return left[(i - start) % pl]
        if i >= end:
            return right[(i - end) % pr]
        return core[i - start]

    # Push the start of the right-periodic region as far left as possible.
    limit = start - (pl + pr)
    j = end
    while j > limit and raw(j - 1) == right[(j - 1 - end) % pr]:
        j -= 1
    if j <= limit:
        # Left and right tails are the same periodic sequence.
        word = tuple(raw(i) for i in range(pr))
        return SftPoint(space, word, (), 0, word)
    j2 = min(start, j)
    while j2 < j and raw(j2) == left[(j2 - start) % pl]:
        j2 += 1
    new_left = tuple(left[(j2 + m - start) % pl] for m in range(pl))
    new_right = tuple(right[(j + m - end) % pr] for m in range(pr))
    new_core = tuple(raw(i) for i in range(j2, j))
    return SftPoint(space, new_left, new_core, j2, new_right)


def _same_space(x: SftPoint, y: SftPoint):
    if x.space != y.space:
        raise SftError("points belong to different spaces")


def shift(x: SftPoint, n: int = 1) -> SftPoint:
    """``f^n x``: symbol_at(result, i) == symbol_at(x, i + n)."""
    if n == 0:
        return x
    return _canonical(x.space, x.left_period, x.core, x.core_start - n, x.right_period)


def first_difference(x: SftPoint, y: SftPoint) -> int | None:
    """``min{|i| : x_i != y_i}``, or None when x == y."""
    _same_space(x, y)
    if x == y:
        return None
    bound = max(x.reach(), y.reach()) + 2 * (
        len(x.left_period) + len(x.right_period) + len(y.left_period) + len(y.right_period)
    )
    for n in range(bound + 1):
        if x.symbol_at(n) != y.symbol_at(n) or x.symbol_at(-n) != y.symbol_at(-n):
            return n
    raise AssertionError("unequal eventually periodic points agree on the certifying window")


def metric(x: SftPoint, y: SftPoint) -> float:
    n = first_difference(x, y)
    return 0.0 if n is None else x.space.lam**n


def bracket(x: SftPoint, z: SftPoint) -> SftPoint:
    """The point with the future of ``x`` and the past of ``z``."""
    _same_space(x, z)
    if x.symbol_at(0) != z.symbol_at(0):
        raise BracketUndefinedError("bracket needs x_0 == z_0")
    s = min(z.core_start, 0)
    e = max(x.core_end, 1)
    left = tuple(z.symbol_at(s - len(z.left_period) + m) for m in range(len(z.left_period)))
    right = tuple(x.symbol_at(e + m) for m in range(len(x.right_period)))
    core = tuple(z.symbol_at(i) for i in range(s, 0)) + tuple(x.symbol_at(i) for i in range(0, e))
    return SftPoint.build(x.space, left, core, s, right)


def in_local_stable(x: SftPoint, y: SftPoint) -> bool:
    """y in W^s_loc(x): symbols agree for every i >= 0."""
    bound = max(x.reach(), y.reach()) + len(x.right_period) + len(y.right_period)
    return all(x.symbol_at(i) == y.symbol_at(i) for i in range(bound + 1))


def in_local_unstable(x: SftPoint, y: SftPoint) -> bool:
    bound = max(x.reach(), y.reach()) + len(x.left_period) + len(y.left_period)
    return all(x.symbol_at(-i) == y.symbol_at(-i) for i in range(bound + 1))


def stable_contraction_check(x: SftPoint, y: SftPoint, n: int, unstable: bool = False) -> float:
    """``d(f^n x, f^n y)`` (or ``f^{-n}`` when ``unstable``) for a local leaf pair."""
    if n < 0:
        raise SftError("n must be nonnegative")
    if unstable:
        if not in_local_unstable(x, y):
            raise SftError("y is not in the local unstable set of x")
        return metric(shift(x, -n), shift(y, -n))
    if not in_local_stable(x, y):
        raise SftError("y is not in the local stable set of x")
    return metric(shift(x, n), shift(y, n))


def closing(x: SftPoint, k: int) -> SftPoint:
    """Periodic point p = (x_0 ... x_{k-1})^inf with f^k p = p shadowing x."""
    if k < 1:
        raise NoShadowingError("k must be positive")
    if x.symbol_at(k) != x.symbol_at(0):
        raise NoShadowingError("d(x, f^k x) must be < 1 (x_k == x_0)")
    return x.space.periodic_point(x.window(0, k - 1))


def closing_defect(x: SftPoint, p: SftPoint, k: int) -> float:
    """``max_{0<=i<=k} d(f^i x, f^i p)``."""
    return max(metric(shift(x, i), shift(p, i)) for i in range(k + 1))


def cyclic_words(space: SftSpace, k: int, budget: int = 200_000) -> list[tuple[int, ...]]:
    """All cyclically admissible words of length k (points with f^k p = p)."""
    if k < 1:
        raise SftError("k must be positive")
    est = float(np.trace(np.linalg.matrix_power(space.matrix.astype(float), k)))
    if est > budget:
        raise BudgetExceededError(f"{est:.0f} periodic points exceed budget {budget}")
    return [w for w in space.words(k) if space.allowed(w[-1], w[0])]


def fixed_points_of_power(space: SftSpace, k: int, budget: int = 200_000) -> list[SftPoint]:
    return [space.periodic_point(w) for w in cyclic_words(space, k, budget)]


def periodic_points(space: SftSpace, k_max: int, budget: int = 200_000) -> list[tuple[SftPoint, int]]:
    """Distinct points of minimal period <= k_max, paired with that period."""
    if k_max < 1:
        raise SftError("k_max must be positive")
    seen: dict[SftPoint, int] = {}
    total = 0
    for k in range(1, k_max + 1):
        words = cyclic_words(space, k, budget)
        total += len(words)
        if total > budget:
            raise BudgetExceededError("periodic point enumeration exceeds budget")
        for w in words:
            if len(_primitive_root(w)) != k:
                continue
            seen.setdefault(space.periodic_point(w), k)
    return list(seen.items())


def dense_orbit_point(space: SftSpace, depth: int, budget: int = 100_000) -> SftPoint:
    """Point whose forward orbit meets every admissible cylinder of length 2L+1."""
    if depth < 0:
        raise SftError("depth must be nonnegative")
    length = 2 * depth + 1
    if space.alphabet_size**length > budget:
        raise BudgetExceededError("cylinder enumeration exceeds budget")
    words = list(space.words(length))
    core: list[int] = list(words[0])
    for w in words[1:]:
        core.extend(space.connecting_word(core[-1], w[0]))
        core.extend(w)
    return space.from_window(core, 0)


def cylinders_visited(x: SftPoint, depth: int, n_max: int) -> set[tuple[int, ...]]:
    """Central cylinders ``x_{n-L..n+L}`` for 0 <= n <= n_max."""
    return {x.window(n - depth, n + depth) for n in range(n_max + 1)}


@dataclass(frozen=True)
class MarkovMeasure:
    space: SftSpace = field(repr=False)
    stationary: np.ndarray
    kernel: np.ndarray
    perron_root: float

    @cached_property
    def reverse_kernel(self) -> np.ndarray:
        pi = self.stationary
        return (self.kernel.T * pi[None, :]) / pi[:, None]

    def cylinder(self, word: Sequence[int]) -> float:
        if not word:
            return 1.0
        prob = self.stationary[word[0]]
        for a, b in zip(word, word[1:]):
            prob *= self.kernel[a, b]
        return float(prob)


def _perron_vector(m: np.ndarray, tol: float = 1e-13, max_iter: int = 100_000):
    v = np.ones(m.shape[0])
    rho = 0.0
    for _ in range(max_iter):
        w = m @ v
        new_rho = w.max()
        w = w / new_rho
        if np.abs(w - v).max() <= tol * np.abs(w).max() and abs(new_rho - rho) <= tol * new_rho:
            return w, new_rho
        v, rho = w, new_rho
    raise NotMixingError("power iteration did not converge")


def parry_measure(space: SftSpace) -> MarkovMeasure:
    """Measure of maximal entropy as a stationary Markov chain."""
    _ = space.mixing_power
    m = space.matrix.astype(float)
    v, rho = _perron_vector(m)
    u, _ = _perron_vector(m.T)
    kernel = m * v[None, :] / (rho * v[:, None])
    pi = u * v / float(u @ v)
    return MarkovMeasure(space, pi, kernel, float(rho))


def sample_words(measure: MarkovMeasure, seed: int, count: int, lo: int, hi: int) -> np.ndarray:
    """Stationary two-sided chain sampled on indices ``[lo, hi]`` (lo <= 0 <= hi).

    Returns an integer array of shape ``(count, hi - lo + 1)``; column ``-lo``
    holds the symbol at index 0.
    """
    if not lo <= 0 <= hi:
        raise SftError("window must contain index 0")
    rng = np.random.default_rng(seed)
    k = measure.space.alphabet_size
    out = np.empty((count, hi - lo + 1), dtype=np.int64)
    zero = -lo
    cum_pi = np.cumsum(measure.stationary)
    out[:, zero] = np.minimum(np.searchsorted(cum_pi, rng.random(count), side="right"), k - 1)
    cum_f = np.cumsum(measure.kernel, axis=1)
    cum_b = np.cumsum(measure.reverse_kernel, axis=1)
    for j in range(zero + 1, out.shape[1]):
        u = rng.random(count)
        out[:, j] = np.minimum((u[:, None] >= cum_f[out[:, j - 1]]).sum(axis=1), k - 1)
    for j in range(zero - 1, -1, -1):
        u = rng.random(count)
        out[:, j] = np.minimum((u[:, None] >= cum_b[out[:, j + 1]]).sum(axis=1), k - 1)
    return out


def sample(measure: MarkovMeasure, seed: int, count: int, radius: int = 48) -> list[SftPoint]:
    """Points agreeing with a stationary sample on ``[-radius, radius]``."""
    words = sample_words(measure, seed, count, -radius, radius)
    return [measure.space.from_window(row, -radius) for row in words]


def perturb_past(x: SftPoint, depth: int, rng: np.random.Generator) -> SftPoint:
    """A point of W^s_loc(x) whose first disagreement with x is at index -depth' (depth' >= depth)."""
    return _perturb(x, depth, rng, direction=-1)


def perturb_future(x: SftPoint, depth: int, rng: np.random.Generator) -> SftPoint:
    return _perturb(x, depth, rng, direction=+1)


def _perturb(x: SftPoint, depth: int, rng, direction: int) -> SftPoint:
    space = x.space
    if depth < 1:
        raise SftError("depth must be >= 1")
    for d in range(depth, depth + 4 * space.alphabet_size + x.reach() + 64):
        i = direction * d
        anchor = x.symbol_at(i - direction)
        choices = [
            s
            for s in range(space.alphabet_size)
            if s != x.symbol_at(i)
            and (space.allowed(anchor, s) if direction > 0 else space.allowed(s, anchor))
        ]
        if not choices:
            continue
        s = choices[int(rng.integers(len(choices)))]
        if direction < 0:
            kept = x.window(i + 1, max(x.core_end, i + 1) + 1)
            tail_len = int(rng.integers(0, 6))
            past = [s]
            for _ in range(tail_len):
                nxt = [a for a in range(space.alphabet_size) if space.allowed(a, past[0])]
                past.insert(0, nxt[int(rng.integers(len(nxt)))])
            symbols = past + list(kept)
            start = i - tail_len
            right = x.window(start + len(symbols), start + len(symbols) + len(x.right_period) - 1)
            left = space.cycle_through_backward(symbols[0])
            return SftPoint.build(space, left, symbols, start, right)
        lo = min(x.core_start, i - 1) - 1
        kept = x.window(lo, i - 1)
        tail_len = int(rng.integers(0, 6))
        fut = [s]
        for _ in range(tail_len):
            nxt = [a for a in range(space.alphabet_size) if space.allowed(fut[-1], a)]
            fut.append(nxt[int(rng.integers(len(nxt)))])
        symbols = list(kept) + fut
        left = x.window(lo - len(x.left_period), lo - 1)
        cyc = space.cycle_through(symbols[-1])
        right = cyc[1:] + cyc[:1]
        return SftPoint.build(space, left, symbols, lo, right)
    raise SftError("could not find an admissible perturbation")


def random_point(space: SftSpace, rng: np.random.Generator, radius: int = 12) -> SftPoint:
    """Uniform-ish random admissible point (random walk on the transition graph)."""
    k = space.alphabet_size
    sym = [int(rng.integers(k))]
    for _ in range(2 * radius):
        nxt = [a for a in range(k) if space.allowed(sym[-1], a)]
        sym.append(nxt[int(rng.integers(len(nxt)))])
    return space.from_window(sym, -radius)


def trace_count(space: SftSpace, k: int) -> int:
    return int(round(np.trace(np.linalg.matrix_power(space.matrix, k))))


def entropy(space: SftSpace) -> float:
    return math.log(parry_measure(space).perron_root)
