"""Canonical test families of cocycles.

F1  constant rotation
F2  locally constant rotation angles (window radius 1 or 2, or one-sided)
F3  conjugated rotations ``g(fx) R_alpha(x) g(x)^-1``; locally constant or series conjugacies
F4  series angle + series sine distortion (diagnostics only)
F5  constant hyperbolic Moebius map diag(s, 1/s) (negative control)
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import diffeo1d as d1
from . import sft
from .cocycle import (
    ConjugatedRotation,
    ConstantGenerator,
    Cocycle,
    SeriesAngleGenerator,
    SeriesConjugatedRotation,
    TableGenerator,
)

GOLDEN_ANGLE = (3.0 - math.sqrt(5.0)) / 2.0

PROFILES = {
    "default": (1.5, 1.25),
    "high": (2.5, 2.25),
}


def _profile(profile: str) -> tuple[float, float]:
    try:
        return PROFILES[profile]
    except KeyError as exc:
        raise ValueError(f"unknown regularity profile {profile!r}") from exc


def _word_table(k: int, length: int, values: np.ndarray) -> dict:
    words = list(itertools.product(range(k), repeat=length))
    return {w: float(v) for w, v in zip(words, values)}


def f1_constant_rotation(space: sft.SftSpace, angle: float = GOLDEN_ANGLE, profile: str = "default") -> Cocycle:
    q, r = _profile(profile)
    gen = ConstantGenerator(d1.Rotation(angle), declared_q=q, family="F1")
    return Cocycle(space, gen, q, r, beta=1.0, name="F1")


def f2_rotation_table(space: sft.SftSpace, m: int = 1, seed: int = 0, profile: str = "default",
                      side: str = "both") -> Cocycle:
    """Rotation angles depending on ``x_{-m..m}`` (``side='future'``: ``x_{0..m}``; ``'past'``: ``x_{-m..0}``)."""
    q, r = _profile(profile)
    window = {"both": (-m, m), "future": (0, m), "past": (-m, 0)}[side]
    length = window[1] - window[0] + 1
    rng = np.random.default_rng(seed)
    table = _word_table(space.alphabet_size, length, rng.random(space.alphabet_size**length))
    gen = TableGenerator(window, {w: d1.Rotation(a) for w, a in table.items()}, declared_q=q, family="F2")
    return Cocycle(space, gen, q, r, beta=1.0, name=f"F2-{side}-m{m}")


def conjugacy_table(k: int, seed: int = 0, amplitude: float = 0.3, n: int = d1.MAP_GRID) -> dict:
    """One smooth diffeomorphism per symbol, with ``min Dg >= 1 - amplitude``."""
    rng = np.random.default_rng(seed + 7919)
    return {(a,): d1.random_smooth(rng, n=n, modes=2, amplitude=amplitude) for a in range(k)}


def f3_conjugated(space: sft.SftSpace, seed: int = 0, profile: str = "default", alpha_window=(-1, 1),
                  conj_window=(0, 0), amplitude: float = 0.3) -> Cocycle:
    """Locally constant conjugacies (by ``x_0``) and angles (by ``x_{-1..1}``)."""
    q, r = _profile(profile)
    k = space.alphabet_size
    rng = np.random.default_rng(seed)
    length = alpha_window[1] - alpha_window[0] + 1
    alpha = _word_table(k, length, rng.random(k**length))
    clen = conj_window[1] - conj_window[0] + 1
    base = conjugacy_table(k, seed, amplitude)
    conj = {w: base[(w[-1],)] if clen > 1 else base[w] for w in itertools.product(range(k), repeat=clen)}
    if clen > 1:
        # distinct maps per word: add a word-dependent rotation on the left
        conj = {w: d1.compose(d1.Rotation(0.05 * sum(w)), g) for w, g in conj.items()}
    gen = ConjugatedRotation(alpha_window, alpha, conj_window, conj, declared_q=q)
    gen.family = "F3"
    return Cocycle(space, gen, q, r, beta=1.0, name="F3")


def f3_series(space: sft.SftSpace, profile: str = "default", eps: float = 0.3, amp: float = 0.1,
              weight: float | None = None, half_turn: bool = False, seed: int = 0) -> Cocycle:
    """Series conjugacies ``h_x = R_theta(x) o s_eps`` with ``theta`` geometric of ratio ``weight``.

    ``half_turn`` uses angles in {0, 1/2} read from ``x_0``; otherwise angles
    depend on ``x_0`` through a random table.
    """
    q, r = _profile(profile)
    k = space.alphabet_size
    weight = space.lam if weight is None else weight
    base = d1.sine_map(eps)
    coeff = np.arange(k) - (k - 1) / 2.0
    if half_turn:
        alpha = {(a,): 0.5 if a % 2 else 0.0 for a in range(k)}
    else:
        rng = np.random.default_rng(seed)
        alpha = {(a,): float(v) for a, v in enumerate(rng.random(k))}
    beta = math.log(weight) / math.log(space.lam)
    gen = SeriesConjugatedRotation(base, weight, amp, coeff, (0, 0), alpha, declared_q=q, declared_beta=min(1.0, beta))
    gen.family = "F3-series-half" if half_turn else "F3-series"
    return Cocycle(space, gen, q, r, beta=min(1.0, beta), name=gen.family)


def f4_series_angle(space: sft.SftSpace, profile: str = "default", weight: float | None = None,
                    eps0: float = 0.2, eps_amp: float = 0.1) -> Cocycle:
    q, r = _profile(profile)
    k = space.alphabet_size
    weight = space.lam if weight is None else weight
    coeff = np.arange(k) - (k - 1) / 2.0
    gen = SeriesAngleGenerator(weight, GOLDEN_ANGLE, 0.1, coeff, eps0, eps_amp, coeff, declared_q=q)
    gen.family = "F4"
    beta = math.log(weight) / math.log(space.lam)
    return Cocycle(space, gen, q, r, beta=min(1.0, beta), name="F4")


def f5_hyperbolic(space: sft.SftSpace, s: float = 1.2, profile: str = "default") -> Cocycle:
    q, r = _profile(profile)
    gen = ConstantGenerator(d1.Moebius(np.diag([s, 1.0 / s])), declared_q=q, family="F5")
    return Cocycle(space, gen, q, r, beta=1.0, name="F5")


BUILDERS = {
    "F1": f1_constant_rotation,
    "F2": f2_rotation_table,
    "F3": f3_conjugated,
    "F3-series": f3_series,
    "F4": f4_series_angle,
    "F5": f5_hyperbolic,
}


def build(family: str, space: sft.SftSpace, **params) -> Cocycle:
    try:
        builder = BUILDERS[family]
    except KeyError as exc:
        raise ValueError(f"unknown family {family!r}") from exc
    return builder(space, **params)
