"""Square-function-type functionals of grid functions.

* :func:`cone_square_function` -- the Lusin area functional of aperture alpha,
  ``A(x)^2 = sum |g(t,y)|^2 t^-n w_y w_t`` over cells with ``|y - x| < alpha t``.
* :func:`carleson_functional` / :func:`carleson_norm` -- normalized tent mass.
* :func:`vertical_square_function` -- ``V(x)^2 = sum_t |g(t,x)|^2 w_t``.
* :func:`grand_square_function` -- cone indicator replaced by the weight
  ``(t / (|x - y| + t))^(n lam)`` over the whole half-space.

Distances between nodes are handled as integer cell offsets, so every
functional commutes exactly with translations by whole cells.  Ball
radii are converted to squared offset radii and snapped to the nearest
integer when within roundoff, which keeps boundary decisions stable under
exact dilations of the time grid.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .geometry import Ball, Tent, tent_contains, unit_ball_volume
from .grid import GridError, GridFunction, HalfSpaceGrid

_SNAP = 1e-9


class TruncationWarning(UserWarning):
    """A cone reaches past the spatial grid, so part of the functional is lost."""


@dataclass(frozen=True)
class SpatialField:
    """Nonnegative values ``F(x_k)`` on the spatial nodes of a grid."""

    grid: HalfSpaceGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.spatial_shape:
            raise GridError(f"field shape {vals.shape} != {self.grid.spatial_shape}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise GridError("spatial field values must be finite and nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self, path) -> None:
        """Write one row per node: coordinates x0..x{n-1} then value."""
        pts = self.grid.spatial_points().reshape(-1, self.grid.dim)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i}" for i in range(self.grid.dim)] + ["value"])
            for x, v in zip(pts, self.values.ravel()):
                w.writerow([repr(float(c)) for c in x] + [repr(float(v))])


def _offset_radius_sq(radius: float, dy: float) -> float:
    q2 = (radius / dy) ** 2
    r = round(q2)
    if abs(q2 - r) <= _SNAP * max(1.0, q2):
        return float(r)
    return q2


def _max_offset_sq(radius: float, dy: float) -> int:
    """Largest integer ``s`` with ``s < (radius/dy)^2``: offsets k with |k|^2 <= s lie strictly inside."""
    q2 = _offset_radius_sq(radius, dy)
    return max(int(math.ceil(q2)) - 1, -1)


def ball_kernel(dim: int, max_sq: int, limit: int) -> np.ndarray:
    """Indicator of integer offsets ``k`` in ``[-K, K]^dim`` with ``|k|^2 <= max_sq``."""
    K = min(math.isqrt(max(max_sq, 0)), limit)
    ax = np.arange(-K, K + 1)
    sq = sum(np.meshgrid(*([ax**2] * dim), indexing="ij"))
    return (sq <= max_sq).astype(float)


def _box_sum_1d(v: np.ndarray, K: int) -> np.ndarray:
    """``out[j] = sum(v[j-K : j+K+1])`` with zero padding."""
    n = v.shape[0]
    c = np.concatenate(([0.0], np.cumsum(v)))
    hi = np.minimum(np.arange(n) + K + 1, n)
    lo = np.maximum(np.arange(n) - K, 0)
    return c[hi] - c[lo]


def ball_sum(slice_values: np.ndarray, max_sq: int) -> np.ndarray:
    """Sum of ``slice_values`` over the discrete open ball of squared offset radius ``max_sq``.

    Output node x receives ``sum_{y: |y - x|^2 <= max_sq} slice_values[y]``.
    """
    if max_sq < 0:
        return np.zeros_like(slice_values)
    n_y = slice_values.shape[0]
    if slice_values.ndim == 1:
        return np.clip(_box_sum_1d(slice_values, min(math.isqrt(max_sq), n_y)), 0.0, None)
    ker = ball_kernel(slice_values.ndim, max_sq, n_y - 1)
    out = fftconvolve(slice_values, ker, mode="same")
    # fft roundoff: anything below this is indistinguishable from zero
    out[out < 1e-13 * max(float(slice_values.sum()), 1e-300)] = 0.0
    return out


def _check_aperture(alpha):
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"aperture must be a positive finite number, got {alpha}")


def cone_reach_ok(g: GridFunction, alpha: float) -> bool:
    """True if every cone of aperture alpha meeting supp g has its vertex region inside the grid."""
    grid = g.grid
    idx = g.time_support()
    if idx.size == 0:
        return True
    reach = alpha * grid.t[idx].max()
    mask = g.support_mask().any(axis=0)
    span = np.nonzero(mask)
    lo = min(grid.y[s.min()] for s in span) - reach
    hi = max(grid.y[s.max()] for s in span) + reach
    return lo >= grid.y_lo - 1e-12 and hi <= grid.y_hi + 1e-12


def _warn_reach(g, alpha):
    if not cone_reach_ok(g, alpha):
        warnings.warn(
            f"cones of aperture {alpha} over supp g reach past the spatial grid; "
            "values outside the grid are not represented",
            TruncationWarning,
            stacklevel=3,
        )


def cone_square_function(g: GridFunction, alpha: float, method: str = "fast") -> SpatialField:
    """Area functional of aperture ``alpha`` at every spatial node.

    ``method="fast"`` sums each time slice against a discrete ball kernel;
    ``method="direct"`` loops over every (node, cell) pair with the
    geometric predicate and is meant as a reference.
    """
    _check_aperture(alpha)
    if method == "direct":
        return _cone_direct(g, alpha)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    _warn_reach(g, alpha)
    grid = g.grid
    acc = np.zeros(grid.spatial_shape)
    sq = np.square(g.values)
    t = grid.t
    for i in g.time_support():
        ms = _max_offset_sq(alpha * t[i], grid.dy)
        acc += t[i] ** (-grid.dim) * ball_sum(sq[i], ms)
    return SpatialField(grid, np.sqrt(acc * grid.w_y * grid.w_t))


def _cone_direct(g: GridFunction, alpha: float) -> SpatialField:
    grid = g.grid
    pts = grid.spatial_points().reshape(-1, grid.dim)
    vals = g.values.reshape(grid.n_t, -1)
    t = grid.t
    out = np.zeros(pts.shape[0])
    for i in g.time_support():
        nz = np.flatnonzero(vals[i])
        ys = pts[nz]
        w = vals[i, nz] ** 2 * t[i] ** (-grid.dim)
        for k, x in enumerate(pts):
            inside = np.sqrt(((ys - x) ** 2).sum(axis=1)) < alpha * t[i]
            out[k] += w[inside].sum()
    return SpatialField(grid, np.sqrt(out * grid.w_y * grid.w_t).reshape(grid.spatial_shape))


def vertical_square_function(g: GridFunction) -> SpatialField:
    grid = g.grid
    return SpatialField(grid, np.sqrt((np.square(g.values) * grid.w_t).sum(axis=0)))


def grand_square_function(g: GridFunction, lam: float, method: str = "fast") -> SpatialField:
    """Square function weighted by ``(t / (|x - y| + t))^(n lam)`` over all cells."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    grid = g.grid
    n = grid.dim
    sq = np.square(g.values)
    t = grid.t
    if method == "direct":
        pts = grid.spatial_points().reshape(-1, n)
        flat = sq.reshape(grid.n_t, -1)
        out = np.zeros(pts.shape[0])
        for i in g.time_support():
            nz = np.flatnonzero(flat[i])
            for k, x in enumerate(pts):
                d = np.sqrt(((pts[nz] - x) ** 2).sum(axis=1))
                out[k] += (flat[i, nz] * (t[i] / (d + t[i])) ** (n * lam)).sum() * t[i] ** (-n)
        acc = out.reshape(grid.spatial_shape)
    elif method == "fast":
        ax = np.arange(-(grid.n_y - 1), grid.n_y) * grid.dy
        dist = np.sqrt(sum(np.meshgrid(*([ax**2] * n), indexing="ij")))
        acc = np.zeros(grid.spatial_shape)
        for i in g.time_support():
            ker = (t[i] / (dist + t[i])) ** (n * lam)
            conv = fftconvolve(sq[i], ker, mode="same")
            acc += t[i] ** (-n) * np.clip(conv, 0.0, None)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SpatialField(grid, np.sqrt(acc * grid.w_y * grid.w_t))


def carleson_functional(g: GridFunction, alpha: float, ball: Ball) -> float:
    """``((alpha^n / |B|) * mass of |g|^2 dy dt/t over T_alpha B)^(1/2)``."""
    _check_aperture(alpha)
    grid = g.grid
    if ball.dim != grid.dim:
        raise ValueError("ball dimension does not match the grid")
    pts = grid.spatial_points()
    tt = grid.t.reshape((-1,) + (1,) * grid.dim)
    yy = pts[None, ...]
    inside = tent_contains(Tent(ball, alpha), tt, yy)
    mass = float((np.square(g.values) * inside).sum() * grid.w_y * grid.w_t)
    return math.sqrt(alpha**grid.dim / ball.volume * mass)


def candidate_heights(grid: HalfSpaceGrid) -> np.ndarray:
    """Exponents k >= 1 of the candidate tent heights ``t_min * ratio**k``.

    Heights run up to the diameter of the spatial box; the ball radius for
    aperture alpha is ``alpha * height``.
    """
    diam = (grid.y_hi - grid.y_lo) * math.sqrt(grid.dim)
    k_max = int(math.floor(math.log2(diam / grid.t_min) / grid.log2_ratio + 1e-9))
    return np.arange(1, max(k_max, 1) + 1)


def carleson_scan(g: GridFunction, alpha: float):
    """Carleson functional for every ball of the candidate family.

    Returns ``(heights_k, values)`` where ``values[j]`` is the spatial field of
    the functional for balls of radius ``alpha * t_min * ratio**k_j``
    centered at every node.
    """
    _check_aperture(alpha)
    grid = g.grid
    n = grid.dim
    ks = candidate_heights(grid)
    sq = np.square(g.values)
    support = g.time_support()
    t = grid.t
    omega = unit_ball_volume(n)
    out = np.zeros((ks.size,) + grid.spatial_shape)
    for j, k in enumerate(ks):
        h = float(grid.t_at(k))
        acc = np.zeros(grid.spatial_shape)
        for i in support[support < k]:
            ms = _max_offset_sq(alpha * (h - t[i]), grid.dy)
            acc += ball_sum(sq[i], ms)
        r = alpha * h
        out[j] = alpha**n / (omega * r**n) * acc * grid.w_y * grid.w_t
    return ks, np.sqrt(out)


def carleson_norm(g: GridFunction, alpha: float) -> float:
    """Supremum of the Carleson functional over the candidate ball family.

    Balls are centered at spatial nodes with radii ``alpha * t_min * ratio**k``
    (k >= 1, heights up to the box diameter), so tent tops align with time
    levels.  The value is a lower bound for the continuum norm.
    """
    if not g.time_support().size:
        return 0.0
    _, vals = carleson_scan(g, alpha)
    return float(vals.max())


def carleson_norm_bruteforce(g: GridFunction, alpha: float) -> float:
    """Same family as :func:`carleson_norm`, evaluated ball by ball with the tent predicate."""
    grid = g.grid
    best = 0.0
    centers = grid.spatial_points().reshape(-1, grid.dim)
    for k in candidate_heights(grid):
        r = alpha * float(grid.t_at(k))
        for c in centers:
            best = max(best, carleson_functional(g, alpha, Ball(tuple(c), r)))
    return best


def dyadic_cone_bound(g: GridFunction, lam: float, k_max: int) -> np.ndarray:
    """``sum_{k=0}^{k_max} 2^(-k n lam / 2) A^(2^(k+1)) g`` at every node."""
    n = g.grid.dim
    total = np.zeros(g.grid.spatial_shape)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for k in range(k_max + 1):
            total += 2.0 ** (-k * n * lam / 2) * cone_square_function(g, 2.0 ** (k + 1)).values
    return total


__all__ = [
    "SpatialField",
    "TruncationWarning",
    "ball_kernel",
    "ball_sum",
    "candidate_heights",
    "carleson_functional",
    "carleson_norm",
    "carleson_norm_bruteforce",
    "carleson_scan",
    "cone_reach_ok",
    "cone_square_function",
    "dyadic_cone_bound",
    "grand_square_function",
    "vertical_square_function",
]
