"""Test inputs: the two saturating examples and generic ensembles.

``make_a1`` is the indicator of the unit tent cut to scales ``1/2 <= t <= 1``.
Its area functional of aperture alpha is spread over a ball of radius about
alpha, so its T^p norm grows like alpha^(n/p).  ``make_a2`` compresses it in
scale by alpha, which concentrates the area functional of aperture 1 on the
unit ball while the aperture-alpha norm grows like alpha^(n/2).
"""

from __future__ import annotations

import numpy as np

from .geometry import Ball, Tent, tent_contains
from .grid import GridError, GridFunction, HalfSpaceGrid

UNIT_BALL_TOL = 1e-12


def _unit_tent_mask(grid: HalfSpaceGrid) -> np.ndarray:
    tt = grid.t.reshape((-1,) + (1,) * grid.dim)
    return tent_contains(Tent(Ball((0.0,) * grid.dim, 1.0), 1.0), tt, grid.spatial_points()[None])


def make_a1(grid: HalfSpaceGrid) -> GridFunction:
    """``1_{T_1 B(0,1)}(t, y) * 1_{[1/2, 1]}(t)`` sampled on the grid nodes."""
    t = grid.t
    band = (t >= 0.5 * (1 - UNIT_BALL_TOL)) & (t <= 1 + UNIT_BALL_TOL)
    if not band.any():
        raise GridError("grid has no time node in [1/2, 1]")
    vals = _unit_tent_mask(grid) & band.reshape((-1,) + (1,) * grid.dim)
    if grid.y_lo > -1 or grid.y_hi < 1:
        raise GridError("grid does not cover the unit ball")
    return GridFunction(grid, vals.astype(float))


def make_a2(grid: HalfSpaceGrid, alpha: float) -> GridFunction:
    """``a1(alpha * t, y)``: a1 moved down the time grid by ``log_ratio(alpha)`` steps."""
    k = grid.ratio_power(alpha)
    return make_a1(grid).shift(-k)


def _bump(u):
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1
    out[inside] = (1 - u[inside] ** 2) ** 4
    return out


def make_smooth_bump(grid: HalfSpaceGrid, center=None, scale=1.0, t_center=1.0, octaves=1.0):
    """Product bump ``phi(log2(t / t_center) / octaves) * prod_k phi((y_k - c_k) / scale)``.

    ``phi(u) = (1 - u^2)^4`` on ``|u| < 1``, a C^3 profile with compact
    support.  ``scale`` must resolve at least four spatial cells.
    """
    if scale < 4 * grid.dy:
        raise GridError(f"bump scale {scale} is below the grid resolution (dy={grid.dy})")
    c = np.zeros(grid.dim) if center is None else np.atleast_1d(np.asarray(center, float))

    def f(t, *axes):
        out = _bump(np.log2(t / t_center) / octaves)
        for a, ck in zip(axes, c):
            out = out * _bump((a - ck) / scale)
        return out

    return GridFunction.from_callable(grid, f)


def make_random_ensemble(
    grid: HalfSpaceGrid,
    seed: int,
    count: int,
    t_range=(0.25, 1.0),
    y_halfwidth: float = 1.0,
    min_cells: int = 2,
    kind: str = "cells",
) -> list[GridFunction]:
    """Seeded random grid functions on random boxes.

    ``kind="cells"``: each member is supported on a box of time indices
    inside ``t_range`` and spatial indices inside
    ``[-y_halfwidth, y_halfwidth]^n``, with independent values uniform in
    ``[-1, 1]`` per cell (signed; only |g|^2 enters).

    ``kind="boxes"``: each member is a sum of one to three indicator boxes
    drawn in continuous coordinates with amplitudes in ``[-1, 1]``.  The
    underlying function does not depend on the grid, which is what
    refinement studies need.
    """
    rng = np.random.default_rng(seed)
    if kind == "boxes":
        return [_random_boxes(grid, rng, t_range, y_halfwidth) for _ in range(count)]
    if kind != "cells":
        raise ValueError(f"unknown ensemble kind {kind!r}")
    t = grid.t
    ti = np.flatnonzero((t >= t_range[0] * (1 - 1e-12)) & (t <= t_range[1] * (1 + 1e-12)))
    ti = ti[(ti > 0) & (ti < grid.n_t - 1)]
    yi = np.flatnonzero(np.abs(grid.y) <= y_halfwidth + 1e-12)
    yi = yi[(yi > 0) & (yi < grid.n_y - 1)]
    if ti.size < min_cells or yi.size < min_cells:
        raise GridError("ensemble region is too small for this grid")
    members = []
    for _ in range(count):
        a, b = np.sort(rng.choice(ti.size, size=2, replace=False))
        slices = [slice(ti[a], ti[b] + 1)]
        for _ax in range(grid.dim):
            lo, hi = np.sort(rng.choice(yi.size, size=2, replace=False))
            if hi - lo + 1 < min_cells:
                hi = min(lo + min_cells - 1, yi.size - 1)
            slices.append(slice(yi[lo], yi[hi] + 1))
        vals = np.zeros(grid.shape)
        box = vals[tuple(slices)]
        vals[tuple(slices)] = rng.uniform(-1.0, 1.0, size=box.shape)
        members.append(GridFunction(grid, vals))
    return members


def _random_boxes(grid, rng, t_range, y_halfwidth) -> GridFunction:
    lt0, lt1 = np.log2(t_range[0]), np.log2(t_range[1])
    t = grid.t.reshape((-1,) + (1,) * grid.dim)
    pts = grid.spatial_points()
    vals = np.zeros(grid.shape)
    for _ in range(rng.integers(1, 4)):
        a, b = np.sort(rng.uniform(lt0, lt1, size=2))
        b = max(b, a + 0.25 * (lt1 - lt0))
        inside = (t >= 2.0**a) & (t <= 2.0 ** min(b, lt1))
        for ax in range(grid.dim):
            lo, hi = np.sort(rng.uniform(-y_halfwidth, y_halfwidth, size=2))
            hi = max(hi, min(lo + 0.25 * y_halfwidth, y_halfwidth))
            inside = inside & (pts[..., ax] >= lo)[None] & (pts[..., ax] <= hi)[None]
        vals += rng.uniform(-1.0, 1.0) * inside
    return GridFunction(grid, vals)
