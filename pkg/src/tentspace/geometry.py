"""Balls, cones and tents in the upper half-space.

All regions are open: boundary points are excluded everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def unit_ball_volume(n: int) -> float:
    """Lebesgue measure of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _as_point(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def _norm(v) -> np.ndarray:
    return np.sqrt(np.sum(np.square(v), axis=-1))


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(c) for c in _as_point(self.center)))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    def contains(self, y) -> np.ndarray | bool:
        return _norm(_as_point(y) - np.array(self.center)) < self.radius

    def translated(self, offset) -> Ball:
        return Ball(tuple(np.array(self.center) + _as_point(offset)), self.radius)


@dataclass(frozen=True)
class Tent:
    ball: Ball
    aperture: float = 1.0

    def __post_init__(self):
        if not self.aperture > 0:
            raise ValueError(f"aperture must be positive, got {self.aperture}")

    @property
    def height(self) -> float:
        return self.ball.radius / self.aperture

    def contains(self, t, y):
        return tent_contains(self, t, y)


def cone_contains(x, alpha, t, y):
    """True iff ``|y - x| < alpha * t``; vectorizes over leading axes of t, y."""
    if not alpha > 0:
        raise ValueError("aperture must be positive")
    d = _norm(_as_point(y) - _as_point(x))
    return d < alpha * np.asarray(t, dtype=float)


def tent_contains(tent: Tent, t, y):
    """True iff ``0 < t < r/alpha`` and ``|y - x_B| < r - alpha t``."""
    t = np.asarray(t, dtype=float)
    r, a = tent.ball.radius, tent.aperture
    d = _norm(_as_point(y) - np.array(tent.ball.center))
    out = (t > 0) & (t < r / a) & (d < r - a * t)
    return bool(out) if out.ndim == 0 else out


def dilate_ball(ball: Ball, lam: float) -> Ball:
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return Ball(ball.center, lam * ball.radius)


def tent_inclusion_witness(ball: Ball, alpha: float, n_samples: int = 100_000, seed=0):
    """Search for a point violating ``T_a B ⊂ T_1 B`` or ``T_1 B ⊂ T_a(aB)``.

    Points are drawn uniformly from the box ``(0, r] x (B's bounding cube
    scaled by alpha)``.  Returns ``None`` when no counterexample is found,
    otherwise ``(which, t, y)``.
    """
    if alpha < 1:
        raise ValueError("the inclusions hold for alpha >= 1 only")
    rng = np.random.default_rng(seed)
    n = ball.dim
    r = ball.radius
    c = np.array(ball.center)
    t = rng.uniform(0.0, r, size=n_samples)
    t[t == 0] = r / 2
    y = c + rng.uniform(-alpha * r, alpha * r, size=(n_samples, n))

    narrow = tent_contains(Tent(ball, alpha), t, y)
    unit = tent_contains(Tent(ball, 1.0), t, y)
    wide = tent_contains(Tent(dilate_ball(ball, alpha), alpha), t, y)

    bad = np.flatnonzero(narrow & ~unit)
    if bad.size:
        i = bad[0]
        return ("T_alpha B not in T_1 B", float(t[i]), y[i].copy())
    bad = np.flatnonzero(unit & ~wide)
    if bad.size:
        i = bad[0]
        return ("T_1 B not in T_alpha(alpha B)", float(t[i]), y[i].copy())
    return None
