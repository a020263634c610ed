"""Aperture sweeps, power-law fits and the consistency checks built on them."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .functionals import (
    TruncationWarning,
    cone_square_function,
    dyadic_cone_bound,
    grand_square_function,
    vertical_square_function,
)
from .geometry import unit_ball_volume
from .grid import GridFunction
from .norms import TentSpaceParams, h_lower, h_upper, tent_norm

# G_lam <= C * sum_k 2^(-k n lam/2) A^(2^(k+1)): split the half-space into
# S_0 = {|x-y| < 2t} (weight <= 1) and S_k = {2^k t <= |x-y| < 2^(k+1) t}
# (weight <= (1 + 2^k)^(-n lam) <= 2^(-k n lam)), S_k inside the cone of
# aperture 2^(k+1); then sqrt(sum_k b_k^2) <= sum_k b_k gives C = 1.
DYADIC_CONSTANT = 1.0


def parallel_map(func, items, jobs: int = 1):
    """Order-preserving map; ``jobs > 1`` uses worker processes."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(func, items))


@dataclass(frozen=True)
class SweepResult:
    descriptor: str
    p: float
    alphas: np.ndarray
    norms: np.ndarray
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float)
        v = np.asarray(self.norms, dtype=float)
        if a.shape != v.shape:
            raise ValueError("alphas and norms must have the same length")
        if np.any(np.diff(a) <= 0):
            raise ValueError("alphas must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("norms must be nonnegative")
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "norms", v)

    def ratios(self) -> np.ndarray:
        """Norms divided by the norm at the smallest aperture."""
        return self.norms / self.norms[0]


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    max_residual: float
    alpha_range: tuple


class _SweepTask:
    def __init__(self, g, p):
        self.g, self.p = g, p

    def __call__(self, alpha):
        return tent_norm(self.g, TentSpaceParams(self.p, alpha, self.g.grid.dim))


def aperture_sweep(g: GridFunction, p, alphas, descriptor: str = "", jobs: int = 1) -> SweepResult:
    alphas = sorted(float(a) for a in alphas)
    p = TentSpaceParams(p, 1.0, g.grid.dim).p
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        norms = parallel_map(_SweepTask(g, p), alphas, jobs)
    return SweepResult(descriptor, p, np.array(alphas), np.array(norms), g.grid.to_dict())


def fit_power_law(alphas, norms) -> ExponentFit:
    """Least-squares line through ``(ln alpha, ln norm)``."""
    x = np.log(np.asarray(alphas, dtype=float))
    v = np.asarray(norms, dtype=float)
    if x.size < 3:
        raise ValueError("need at least three points for an exponent fit")
    if np.any(v <= 0):
        raise ValueError("cannot fit a power law through a zero norm")
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(
        float(slope),
        float(intercept),
        float(np.abs(resid).max()),
        (float(np.exp(x.min())), float(np.exp(x.max()))),
    )


def fit_exponent(sweep: SweepResult, exclude_unit: bool = True) -> ExponentFit:
    """Slope of ``ln(norm)`` against ``ln(alpha)``; the alpha = 1 row is dropped by default."""
    keep = ~np.isclose(sweep.alphas, 1.0) if exclude_unit else np.ones(sweep.alphas.size, bool)
    return fit_power_law(sweep.alphas[keep], sweep.norms[keep])


@dataclass(frozen=True)
class SandwichReport:
    p: float
    alpha: float
    ratio: float
    over_lower: float
    over_upper: float


def sandwich_check(g: GridFunction, p, alpha: float) -> SandwichReport:
    """``R = ||g||_(p,1) / ||g||_(p,alpha)`` normalized by both sharp rates."""
    n = g.grid.dim
    num = tent_norm(g, TentSpaceParams(p, 1.0, n))
    den = tent_norm(g, TentSpaceParams(p, alpha, n))
    if den == 0:
        raise ZeroDivisionError("aperture-alpha norm vanishes")
    r = num / den
    pp = TentSpaceParams(p, alpha, n).p
    return SandwichReport(pp, alpha, r, r / h_lower(pp, alpha, n), r / h_upper(pp, alpha, n))


@dataclass(frozen=True)
class VerticalLimitReport:
    alphas: list
    errors: list
    relative_errors: list
    resolved: list

    @property
    def decreasing(self) -> bool:
        errs = [e for e, ok in zip(self.errors, self.resolved) if ok]
        return all(b < a for a, b in zip(errs, errs[1:]))


def vertical_limit_study(g: GridFunction, alphas, min_cells: float = 4.0) -> VerticalLimitReport:
    """Compare ``alpha^(-n/2) A^(alpha) g`` with ``omega_n^(1/2) V g`` as alpha decreases.

    An aperture counts as resolved when the narrowest cone over supp g still
    spans ``min_cells`` spatial cells; unresolved apertures are reported but
    not part of :attr:`VerticalLimitReport.decreasing`.
    """
    grid = g.grid
    n = grid.dim
    target = math.sqrt(unit_ball_volume(n)) * vertical_square_function(g).values
    scale = float(target.max())
    ts = g.time_support()
    t_lo = grid.t[ts].min() if ts.size else grid.t_max
    alphas = sorted((float(a) for a in alphas), reverse=True)
    errs, rel, resolved = [], [], []
    for a in alphas:
        field_ = a ** (-n / 2) * cone_square_function(g, a).values
        e = float(np.abs(field_ - target).max())
        errs.append(e)
        rel.append(e / scale if scale > 0 else 0.0)
        resolved.append(a * t_lo >= min_cells * grid.dy)
    return VerticalLimitReport(alphas, errs, rel, resolved)


@dataclass(frozen=True)
class DominationReport:
    lam: float
    k_max: int
    constant: float
    worst_ratio: float
    holds: bool


def default_k_max(grid) -> int:
    """Smallest k with ``2^(k+1) t_min`` at least the spatial diameter."""
    diam = (grid.y_hi - grid.y_lo) * math.sqrt(grid.dim)
    return max(0, math.ceil(math.log2(diam / grid.t_min)) - 1)


def dyadic_domination_check(g: GridFunction, lam: float, k_max: int | None = None) -> DominationReport:
    """Pointwise ``G_lam g <= C sum_k 2^(-k n lam/2) A^(2^(k+1)) g`` with ``C = DYADIC_CONSTANT``."""
    if k_max is None:
        k_max = default_k_max(g.grid)
    lhs = grand_square_function(g, lam).values
    rhs = DYADIC_CONSTANT * dyadic_cone_bound(g, lam, k_max)
    pos = lhs > 0
    worst = float((lhs[pos] / rhs[pos]).max()) if pos.any() else 0.0
    holds = bool(np.all(lhs <= rhs * (1 + 1e-12)))
    return DominationReport(lam, k_max, DYADIC_CONSTANT, worst, holds)
