"""scikit-learn compatible wrappers.

Samples are grid functions flattened row-major to ``n_features =
prod(grid.shape)``; the grid itself is a constructor parameter.  This lets
the functionals sit in a :class:`sklearn.pipeline.Pipeline` and be cloned
or grid-searched like any other transformer.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .functionals import cone_square_function, grand_square_function, vertical_square_function
from .grid import GridError, GridFunction, HalfSpaceGrid
from .norms import TentSpaceParams, lp_quasinorm, tent_norm
from .experiments import fit_power_law


def check_grid(grid) -> HalfSpaceGrid:
    if not isinstance(grid, HalfSpaceGrid):
        raise TypeError(f"grid must be a HalfSpaceGrid, got {type(grid).__name__}")
    return grid


def check_aperture(alpha) -> float:
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ValueError(f"aperture must be positive and finite, got {alpha}")
    return alpha


def check_exponent(p) -> float:
    return TentSpaceParams(p).p


def check_grid_functions(X, grid: HalfSpaceGrid, allow_truncated: bool = False) -> list[GridFunction]:
    """Validate a 2-D sample array and turn each row into a :class:`GridFunction`."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=True)
    size = math.prod(grid.shape)
    if X.shape[1] != size:
        raise ValueError(f"expected {size} features for grid of shape {grid.shape}, got {X.shape[1]}")
    return [GridFunction(grid, row.reshape(grid.shape), allow_truncated) for row in X]


def flatten(functions) -> np.ndarray:
    """Stack grid functions into the ``(n_samples, n_features)`` layout."""
    return np.stack([g.values.ravel() for g in functions])


class _GridTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        grid = check_grid(self.grid)
        check_grid_functions(X, grid, self.allow_truncated)
        self.grid_ = grid
        self.n_features_in_ = math.prod(grid.shape)
        return self

    def _functions(self, X):
        check_is_fitted(self, "grid_")
        return check_grid_functions(X, self.grid_, self.allow_truncated)


class ConeSquareFunction(_GridTransformer):
    """Area functional of a fixed aperture; output row = field at every spatial node."""

    def __init__(self, grid=None, aperture=1.0, method="fast", allow_truncated=False):
        self.grid = grid
        self.aperture = aperture
        self.method = method
        self.allow_truncated = allow_truncated

    def transform(self, X):
        alpha = check_aperture(self.aperture)
        return np.stack(
            [cone_square_function(g, alpha, self.method).values.ravel() for g in self._functions(X)]
        )


class VerticalSquareFunction(_GridTransformer):
    def __init__(self, grid=None, allow_truncated=False):
        self.grid = grid
        self.allow_truncated = allow_truncated

    def transform(self, X):
        return np.stack([vertical_square_function(g).values.ravel() for g in self._functions(X)])


class GrandSquareFunction(_GridTransformer):
    def __init__(self, grid=None, lam=2.0, allow_truncated=False):
        self.grid = grid
        self.lam = lam
        self.allow_truncated = allow_truncated

    def transform(self, X):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        return np.stack([grand_square_function(g, self.lam).values.ravel() for g in self._functions(X)])


class TentNorm(_GridTransformer):
    """``||g||_{T^{p,2}_alpha}`` for every sample; output shape ``(n_samples, 1)``."""

    def __init__(self, grid=None, p=2.0, aperture=1.0, allow_truncated=False):
        self.grid = grid
        self.p = p
        self.aperture = aperture
        self.allow_truncated = allow_truncated

    def transform(self, X):
        params = TentSpaceParams(check_exponent(self.p), check_aperture(self.aperture), self.grid_.dim)
        return np.array([[tent_norm(g, params)] for g in self._functions(X)])


class LpQuasiNorm(TransformerMixin, BaseEstimator):
    """L^p quasi-norm of spatial fields given as rows; ``cell_volume`` is the node weight."""

    def __init__(self, p=2.0, cell_volume=1.0):
        self.p = p
        self.cell_volume = cell_volume

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        p = check_exponent(self.p)
        return np.array([[lp_quasinorm((row, self.cell_volume), p)] for row in X])


class PowerLawFit(RegressorMixin, BaseEstimator):
    """``norm ~ exp(intercept_) * alpha ** slope_`` by least squares in log-log coordinates."""

    def __init__(self, exclude_unit=False):
        self.exclude_unit = exclude_unit

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError("PowerLawFit expects a single feature: the aperture")
        a = X[:, 0]
        y = np.asarray(y, dtype=float)
        if self.exclude_unit:
            keep = ~np.isclose(a, 1.0)
            a, y = a[keep], y[keep]
        fit = fit_power_law(a, y)
        self.slope_ = fit.slope
        self.intercept_ = fit.intercept
        self.max_residual_ = fit.max_residual
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        X = check_array(X, dtype=np.float64)
        return np.exp(self.intercept_) * X[:, 0] ** self.slope_


__all__ = [
    "ConeSquareFunction",
    "GrandSquareFunction",
    "GridError",
    "LpQuasiNorm",
    "PowerLawFit",
    "TentNorm",
    "VerticalSquareFunction",
    "check_aperture",
    "check_exponent",
    "check_grid",
    "check_grid_functions",
    "flatten",
]
