"""Discretization of the upper half-space (0, inf) x R^n.

The scale variable t lives on a log-uniform grid, so the measure dt/t has
the same weight ``ln(ratio)`` in every cell and a dilation ``t -> t / alpha``
with ``alpha = ratio**k`` is an exact index shift.  The spatial variable y
lives on a uniform tensor grid with the same step on every axis.

Serialized layout (JSON)::

    {
      "format": "tentspace.GridFunction",
      "version": 1,
      "grid": {"dim", "t_min", "t_max", "n_t", "y_lo", "y_hi", "n_y"},
      "shape": [n_t, n_y, ..., n_y],
      "values": [...]          # row-major (C order), t index slowest
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_TAG = "tentspace.GridFunction"
FORMAT_VERSION = 1


class GridError(ValueError):
    """Raised for invalid grid parameters or grid functions."""


class SupportMarginError(GridError):
    """Raised when a grid function is nonzero on the grid boundary."""


@dataclass(frozen=True)
class HalfSpaceGrid:
    dim: int
    t_min: float
    t_max: float
    n_t: int
    y_lo: float
    y_hi: float
    n_y: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (self.t_min > 0 and math.isfinite(self.t_min)):
            raise GridError(f"t_min must be positive, got {self.t_min}")
        if not self.t_max > self.t_min:
            raise GridError("t_max must exceed t_min")
        if self.n_t < 2:
            raise GridError(f"n_t must be >= 2, got {self.n_t}")
        if self.n_y < 2:
            raise GridError(f"n_y must be >= 2, got {self.n_y}")
        if not self.y_lo < self.y_hi:
            raise GridError("y_lo must be smaller than y_hi")

    @property
    def ratio(self) -> float:
        return (self.t_max / self.t_min) ** (1.0 / (self.n_t - 1))

    @property
    def log_ratio(self) -> float:
        return math.log(self.t_max / self.t_min) / (self.n_t - 1)

    @property
    def log2_ratio(self) -> float:
        return math.log2(self.t_max / self.t_min) / (self.n_t - 1)

    @property
    def dy(self) -> float:
        return (self.y_hi - self.y_lo) / (self.n_y - 1)

    @property
    def w_t(self) -> float:
        """Weight of one cell for the measure dt/t."""
        return self.log_ratio

    @property
    def w_y(self) -> float:
        """Weight of one cell for the spatial measure dy."""
        return self.dy**self.dim

    @property
    def t(self) -> np.ndarray:
        return self.t_at(np.arange(self.n_t))

    def t_at(self, k):
        """``t_min * ratio**k``; exact powers of two land exactly on nodes."""
        return self.t_min * np.exp2(self.log2_ratio * np.asarray(k, dtype=float))

    @property
    def y(self) -> np.ndarray:
        """One-dimensional node coordinates shared by every spatial axis."""
        return self.y_lo + self.dy * np.arange(self.n_y)

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.n_y,) * self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_t,) + self.spatial_shape

    def spatial_points(self) -> np.ndarray:
        """Coordinates of all spatial nodes, shape ``spatial_shape + (dim,)``."""
        axes = np.meshgrid(*([self.y] * self.dim), indexing="ij")
        return np.stack(axes, axis=-1)

    def spatial_radius_grid(self, center=None) -> np.ndarray:
        """Euclidean distance of every spatial node to ``center`` (default 0)."""
        pts = self.spatial_points()
        c = np.zeros(self.dim) if center is None else np.asarray(center, float)
        return np.sqrt(((pts - c) ** 2).sum(axis=-1))

    def t_index(self, t: float, tol: float = 1e-9) -> int:
        """Index of the node equal to ``t`` (relative tolerance ``tol``)."""
        k = math.log(t / self.t_min) / self.log_ratio
        i = round(k)
        if abs(k - i) > tol * max(1.0, abs(k)) or not 0 <= i < self.n_t:
            raise GridError(f"t={t} is not a node of the time grid")
        return int(i)

    def ratio_power(self, alpha: float, tol: float = 1e-9) -> int:
        """Return k with ``alpha == ratio**k``; raise if no such integer."""
        if not alpha > 0:
            raise GridError(f"alpha must be positive, got {alpha}")
        k = math.log(alpha) / self.log_ratio
        i = round(k)
        if abs(k - i) > tol * max(1.0, abs(k)):
            raise GridError(f"alpha={alpha} is not an integer power of the grid ratio {self.ratio}")
        return int(i)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "n_t": self.n_t,
            "y_lo": self.y_lo,
            "y_hi": self.y_hi,
            "n_y": self.n_y,
        }


def make_grid(dim, t_min, t_max, n_t, y_lo, y_hi, n_y) -> HalfSpaceGrid:
    """Build a half-space grid.

    ``t_i = t_min * ratio**i`` for ``0 <= i < n_t`` with
    ``ratio = (t_max / t_min) ** (1 / (n_t - 1))``; ``n_y`` equispaced nodes
    on ``[y_lo, y_hi]`` along every one of the ``dim`` spatial axes.
    """
    return HalfSpaceGrid(
        dim=int(dim),
        t_min=float(t_min),
        t_max=float(t_max),
        n_t=int(n_t),
        y_lo=float(y_lo),
        y_hi=float(y_hi),
        n_y=int(n_y),
    )


def dyadic_grid(dim, octaves_below, octaves_above, steps_per_octave, half_width, cells_per_unit):
    """Grid with ratio ``2**(1/steps_per_octave)`` and ``t = 1`` on a node.

    The spatial grid is symmetric around 0 with 0 on a node and
    ``dy = 1 / cells_per_unit``.
    """
    m = int(steps_per_octave)
    n_half = int(math.ceil(half_width * cells_per_unit))
    return make_grid(
        dim,
        2.0**-octaves_below,
        2.0**octaves_above,
        m * (octaves_below + octaves_above) + 1,
        -n_half / cells_per_unit,
        n_half / cells_per_unit,
        2 * n_half + 1,
    )


def _margin_violations(values: np.ndarray) -> list[str]:
    problems = []
    if np.any(values[0] != 0) or np.any(values[-1] != 0):
        problems.append("nonzero on the first or last time slice")
    for ax in range(1, values.ndim):
        lo = np.take(values, 0, axis=ax)
        hi = np.take(values, -1, axis=ax)
        if np.any(lo != 0) or np.any(hi != 0):
            problems.append(f"nonzero on the outer layer of spatial axis {ax - 1}")
    return problems


@dataclass(frozen=True)
class GridFunction:
    """Real samples ``g(t_i, y_j)`` on a :class:`HalfSpaceGrid`.

    Values must vanish on the first and last time slices and on the outer
    spatial layer, so that cones and tents cut at the grid edge never lose
    mass.  Pass ``allow_truncated=True`` for deliberately clipped inputs.
    """

    grid: HalfSpaceGrid
    values: np.ndarray
    allow_truncated: bool = field(default=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise GridError(f"values have shape {vals.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("grid function values must be finite")
        if not self.allow_truncated:
            problems = _margin_violations(vals)
            if problems:
                raise SupportMarginError("; ".join(problems))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: HalfSpaceGrid) -> GridFunction:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_callable(cls, grid: HalfSpaceGrid, func, **kwargs) -> GridFunction:
        """Sample ``func(t, *y_axes)`` on broadcast node arrays."""
        t = grid.t.reshape((-1,) + (1,) * grid.dim)
        axes = [
            grid.y.reshape((1,) + tuple(-1 if a == b else 1 for b in range(grid.dim)))
            for a in range(grid.dim)
        ]
        vals = np.broadcast_to(np.asarray(func(t, *axes), dtype=float), grid.shape)
        return cls(grid, np.array(vals), **kwargs)

    def __mul__(self, c) -> GridFunction:
        return GridFunction(self.grid, self.values * float(c), self.allow_truncated)

    __rmul__ = __mul__

    def __add__(self, other: GridFunction) -> GridFunction:
        if other.grid != self.grid:
            raise GridError("cannot add grid functions on different grids")
        return GridFunction(
            self.grid, self.values + other.values, self.allow_truncated or other.allow_truncated
        )

    def support_mask(self) -> np.ndarray:
        return self.values != 0

    def time_support(self) -> np.ndarray:
        """Indices of time slices carrying a nonzero value."""
        axes = tuple(range(1, self.values.ndim))
        return np.flatnonzero(np.any(self.values != 0, axis=axes))

    def shift(self, di_t: int = 0, di_y=None) -> GridFunction:
        """Translate by whole cells: ``di_t`` time steps, ``di_y`` per spatial axis.

        Raises :class:`GridError` if nonzero values would leave the grid.
        """
        shifts = [int(di_t)] + list(di_y if di_y is not None else [0] * self.grid.dim)
        if len(shifts) != self.values.ndim:
            raise GridError("one spatial shift per axis is required")
        mask = self.support_mask()
        if mask.any():
            idx = np.nonzero(mask)
            for ax, s in enumerate(shifts):
                lo, hi = idx[ax].min() + s, idx[ax].max() + s
                if lo < 0 or hi >= self.values.shape[ax]:
                    raise GridError("shifted support leaves the grid")
        out = np.zeros_like(self.values)
        src = tuple(
            slice(max(0, -s), self.values.shape[ax] - max(0, s)) for ax, s in enumerate(shifts)
        )
        dst = tuple(
            slice(max(0, s), self.values.shape[ax] - max(0, -s)) for ax, s in enumerate(shifts)
        )
        out[dst] = self.values[src]
        return GridFunction(self.grid, out, self.allow_truncated)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "version": FORMAT_VERSION,
            "grid": self.grid.to_dict(),
            "shape": list(self.values.shape),
            "values": self.values.ravel(order="C").tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, allow_truncated: bool = False) -> GridFunction:
        if data.get("format") != FORMAT_TAG:
            raise GridError(f"not a serialized grid function: format={data.get('format')!r}")
        if data.get("version") != FORMAT_VERSION:
            raise GridError(f"unsupported version {data.get('version')!r}")
        grid = make_grid(**data["grid"])
        vals = np.asarray(data["values"], dtype=float)
        if list(grid.shape) != list(data["shape"]) or vals.size != math.prod(grid.shape):
            raise GridError("serialized shape does not match the grid")
        return cls(grid, vals.reshape(grid.shape), allow_truncated=allow_truncated)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path, allow_truncated: bool = False) -> GridFunction:
        return cls.from_dict(json.loads(Path(path).read_text()), allow_truncated)


def integrate_halfspace(f) -> float:
    """Sum ``f(t_i, y_j) * w_y * w_t`` over all cells (quadrature of dy dt/t)."""
    if isinstance(f, GridFunction):
        grid, vals = f.grid, f.values
    else:
        grid, vals = f
        vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise GridError("integrand has non-finite values")
    return float(vals.sum() * grid.w_y * grid.w_t)
