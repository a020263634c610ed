"""Tent-space (quasi-)norms and the sharp change-of-aperture rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import SpatialField, carleson_norm, cone_square_function
from .grid import GridError, GridFunction


def _parse_p(p) -> float:
    if isinstance(p, str):
        p = math.inf if p.strip().lower() in ("inf", "infinity", "∞") else float(p)
    p = float(p)
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    return p


@dataclass(frozen=True)
class TentSpaceParams:
    p: float
    alpha: float = 1.0
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", _parse_p(self.p))
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"aperture must be positive, got {self.alpha}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")

    @property
    def tau(self) -> float:
        return min(self.p, 2.0)

    @property
    def sigma(self) -> float:
        return max(self.p, 2.0)


def lp_quasinorm(field, p: float) -> float:
    """``(sum_k |F(x_k)|^p w_y)^(1/p)`` for ``0 < p < inf``; ``max |F|`` for ``p = inf``."""
    p = _parse_p(p)
    if isinstance(field, SpatialField):
        vals, w = field.values, field.grid.w_y
    else:
        vals, w = field
        vals = np.asarray(vals, dtype=float)
    a = np.abs(vals)
    if p == math.inf:
        return float(a.max()) if a.size else 0.0
    top = a.max() if a.size else 0.0
    if top == 0:
        return 0.0
    # factor out the max so that small p does not underflow
    return float(top * ((a / top) ** p).sum() ** (1.0 / p) * w ** (1.0 / p))


def tent_norm(g: GridFunction, params: TentSpaceParams) -> float:
    """``||A^(alpha) g||_p`` for finite p; the Carleson norm for ``p = inf``."""
    if g.grid.dim != params.n:
        raise GridError(f"grid dimension {g.grid.dim} != params.n {params.n}")
    if params.p == math.inf:
        return carleson_norm(g, params.alpha)
    return lp_quasinorm(cone_square_function(g, params.alpha), params.p)


def rescale_isometry(g: GridFunction, alpha: float) -> GridFunction:
    """``h(t, y) = alpha^(n/2) g(t / alpha, y)`` by an exact shift of the time index.

    ``tent_norm(h, (p, 1)) == tent_norm(g, (p, alpha))``: the map carries the
    aperture-alpha space onto the aperture-1 space.  ``alpha`` must be an
    integer power of the grid ratio.
    """
    k = g.grid.ratio_power(alpha)
    return g.shift(k) * alpha ** (g.grid.dim / 2)


def h_lower(p, alpha, n: int = 1) -> float:
    """``min(alpha^(-n/2), alpha^(-n/p))``; ``p = inf`` gives ``min(alpha^(-n/2), 1)``."""
    p = _parse_p(p)
    return min(alpha ** (-n / 2), alpha ** (-n / p))


def h_upper(p, alpha, n: int = 1) -> float:
    """``max(alpha^(-n/2), alpha^(-n/p))``."""
    p = _parse_p(p)
    return max(alpha ** (-n / 2), alpha ** (-n / p))


def h_lower_by_sign_rule(p, alpha, n: int = 1) -> float:
    """The case form: ``alpha^(-n/p)`` if ``(alpha-1)(p-2) >= 0`` else ``alpha^(-n/2)``.

    Kept for cross-checking against :func:`h_lower`.  Whenever
    ``(alpha - 1)(p - 2) != 0`` this case form returns the *larger* of the two
    powers, i.e. it equals :func:`h_upper`, not :func:`h_lower`.
    """
    p = _parse_p(p)
    s = 0.0 if alpha == 1 or p == 2 else (alpha - 1) * (p - 2)
    return alpha ** (-n / p) if s >= 0 else alpha ** (-n / 2)
