"""Named experiments with pass/fail verdicts, as run by the command line.

Each experiment takes a :class:`RunConfig` and returns an
:class:`Outcome` holding result rows.  Every number in a row can be
reproduced by calling the library functions with the same grid and inputs.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import atoms as atoms_mod
from .experiments import (
    aperture_sweep,
    dyadic_domination_check,
    fit_exponent,
    fit_power_law,
    parallel_map,
    sandwich_check,
    vertical_limit_study,
)
from .extremals import make_a1, make_a2, make_random_ensemble, make_smooth_bump
from .functionals import carleson_norm, cone_square_function, grand_square_function
from .geometry import Ball, tent_inclusion_witness
from .grid import dyadic_grid, make_grid
from .norms import TentSpaceParams, h_lower, h_upper, lp_quasinorm, rescale_isometry, tent_norm

COLUMNS = ["experiment", "label", "p", "n", "alpha", "norm", "slope", "residual", "tolerance", "passed"]


@dataclass(frozen=True)
class GridPreset:
    name: str
    steps_per_octave: int
    resolution: float


PRESETS = {
    "fast": GridPreset("fast", 4, 0.5),
    "standard": GridPreset("standard", 8, 1.0),
    "slow": GridPreset("slow", 16, 2.0),
}


@dataclass
class RunConfig:
    experiment: str = "a1-sweep"
    n: int = 1
    p: list | None = None
    alphas: list | None = None
    lam: list | None = None
    grid_preset: str = "standard"
    seed: int = 0
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"n must be 1, 2 or 3, got {self.n}")
        if self.grid_preset not in PRESETS:
            raise ValueError(f"unknown grid preset {self.grid_preset!r}")
        if self.p is not None:
            self.p = [TentSpaceParams(q, 1.0, self.n).p for q in self.p]
        if self.alphas is not None:
            if not self.alphas or any(not a > 0 for a in self.alphas):
                raise ValueError("apertures must be positive")
            self.alphas = sorted(float(a) for a in self.alphas)
        if self.lam is not None and any(not v > 0 for v in self.lam):
            raise ValueError("lambda must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def preset(self) -> GridPreset:
        return PRESETS[self.grid_preset]

    def exponent_tolerance(self) -> float:
        return 0.05 if self.grid_preset == "slow" else 0.1


@dataclass
class Outcome:
    experiment: str
    rows: list
    passed: bool
    summary: dict

    def to_json(self) -> dict:
        return {"experiment": self.experiment, "passed": self.passed, "summary": self.summary}


def _row(cfg, label="", p=None, alpha=None, norm=None, slope=None, residual=None, tolerance=None, passed=None):
    return {
        "experiment": cfg.experiment,
        "label": label,
        "p": p,
        "n": cfg.n,
        "alpha": alpha,
        "norm": norm,
        "slope": slope,
        "residual": residual,
        "tolerance": tolerance,
        "passed": passed,
    }


def _cells(cfg, per_unit_1d: float) -> float:
    """Spatial cells per unit length; coarser in higher dimension to bound node counts."""
    return per_unit_1d * cfg.preset.resolution / 2 ** (2 * (cfg.n - 1))


# ---------------------------------------------------------------- grids


def sweep_grid(cfg, alpha_max: float):
    return dyadic_grid(cfg.n, 2, 2, cfg.preset.steps_per_octave, alpha_max + 2, _cells(cfg, 16))


def a2_grid(cfg, alpha_max: float):
    below = int(math.ceil(math.log2(alpha_max))) + 2
    return dyadic_grid(cfg.n, below, 1, cfg.preset.steps_per_octave, 2.5, _cells(cfg, 128))


def fubini_grid(cfg, refine: int = 1):
    n_y = int(512 * cfg.preset.resolution / 2 ** (2 * (cfg.n - 1))) * refine + 1
    m = cfg.preset.steps_per_octave
    return make_grid(cfg.n, 2.0**-4, 2.0**3, 7 * m + 1, -10, 10, n_y)


def ensemble_grid(cfg, half_width: float):
    return dyadic_grid(cfg.n, 4, 2, cfg.preset.steps_per_octave, half_width, _cells(cfg, 16))


def _default_alphas(cfg):
    return cfg.alphas or ([2.0, 4.0, 8.0, 16.0, 32.0] if cfg.n == 1 else [2.0, 4.0, 8.0])


# ---------------------------------------------------------------- experiments


def run_a1_sweep(cfg: RunConfig) -> Outcome:
    alphas = _default_alphas(cfg)
    ps = cfg.p or [0.5, 1.0, 2.0, 4.0, math.inf]
    grid = sweep_grid(cfg, max(alphas))
    g = make_a1(grid)
    tol = cfg.exponent_tolerance()
    rows, fits = [], {}
    for p in ps:
        sweep = aperture_sweep(g, p, alphas, "a1", cfg.jobs)
        fit = fit_exponent(sweep)
        expected = cfg.n / p
        ok = abs(fit.slope - expected) <= tol
        fits[str(p)] = {"slope": fit.slope, "expected": expected, "passed": ok}
        for a, v in zip(sweep.alphas, sweep.norms):
            rows.append(_row(cfg, "a1", p, a, v))
        rows.append(_row(cfg, "fit", p, None, None, fit.slope, fit.max_residual, tol, ok))
    return Outcome(cfg.experiment, rows, all(f["passed"] for f in fits.values()), fits)


def run_a2_sweep(cfg: RunConfig) -> Outcome:
    alphas = _default_alphas(cfg)
    ps = cfg.p or [1.0, 2.0, 4.0]
    grid = a2_grid(cfg, max(alphas))
    tol = cfg.exponent_tolerance()
    a2s = [make_a2(grid, a) for a in alphas]
    rows, summary = [], {}
    for p in ps:
        wide = parallel_map(_NormTask(p, None), list(zip(a2s, alphas)), cfg.jobs)
        unit = parallel_map(_NormTask(p, 1.0), list(zip(a2s, alphas)), cfg.jobs)
        fit = fit_power_law(alphas, wide)
        spread = max(unit) / min(unit)
        ok = abs(fit.slope - cfg.n / 2) <= tol and spread < 2
        summary[str(p)] = {"slope": fit.slope, "expected": cfg.n / 2, "unit_spread": spread, "passed": ok}
        for a, w, u in zip(alphas, wide, unit):
            rows.append(_row(cfg, "a2 aperture alpha", p, a, w))
            rows.append(_row(cfg, "a2 aperture 1", p, a, u))
        rows.append(_row(cfg, "fit", p, None, None, fit.slope, fit.max_residual, tol, ok))
    return Outcome(cfg.experiment, rows, all(s["passed"] for s in summary.values()), summary)


class _NormTask:
    def __init__(self, p, alpha):
        self.p, self.alpha = p, alpha

    def __call__(self, item):
        g, a = item
        alpha = a if self.alpha is None else self.alpha
        return tent_norm(g, TentSpaceParams(self.p, alpha, g.grid.dim))


def fubini_errors(grid, seed: int, alphas, count: int = 5):
    """Relative deviations of ``||g||_(2,alpha) / ||g||_(2,1)`` from ``alpha^(n/2)``."""
    ens = make_random_ensemble(grid, seed, count, t_range=(0.25, 1.0), y_halfwidth=1.0, kind="boxes")
    out = []
    for g in ens:
        base = tent_norm(g, TentSpaceParams(2, 1.0, grid.dim))
        for a in alphas:
            r = tent_norm(g, TentSpaceParams(2, a, grid.dim)) / base
            out.append((a, r, abs(r - a ** (grid.dim / 2)) / a ** (grid.dim / 2)))
    return out


def run_l2_fubini(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [2.0, 4.0, 8.0]
    tol = 0.03
    coarse = fubini_errors(fubini_grid(cfg), cfg.seed, alphas)
    fine = fubini_errors(fubini_grid(cfg, 2), cfg.seed, alphas)
    worst, worst_fine = max(e for *_, e in coarse), max(e for *_, e in fine)
    ok = worst < tol and worst_fine < worst
    rows = [_row(cfg, f"member {i // len(alphas)}", 2.0, a, r, None, e, tol, e < tol) for i, (a, r, e) in enumerate(coarse)]
    rows.append(_row(cfg, "max error, doubled n_y", 2.0, None, None, None, worst_fine, worst, worst_fine < worst))
    return Outcome(cfg.experiment, rows, ok, {"max_error": worst, "max_error_doubled": worst_fine})


def run_isometry(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [2.0, 4.0]
    ps = cfg.p or [0.5, 1.0, 2.0, 4.0, math.inf]
    grid = dyadic_grid(cfg.n, 4, 4, cfg.preset.steps_per_octave, max(alphas) * 2 + 3, _cells(cfg, 8))
    ens = make_random_ensemble(grid, cfg.seed, 3, t_range=(0.25, 2.0), y_halfwidth=1.0)
    tol = 1e-10
    rows, worst = [], 0.0
    for a in alphas:
        for j, g in enumerate(ens):
            h = rescale_isometry(g, a)
            for p in ps:
                lhs = tent_norm(h, TentSpaceParams(p, 1.0, cfg.n))
                rhs = tent_norm(g, TentSpaceParams(p, a, cfg.n))
                err = abs(lhs - rhs) / rhs
                worst = max(worst, err)
                rows.append(_row(cfg, f"member {j}", p, a, lhs, None, err, tol, err <= tol))
    return Outcome(cfg.experiment, rows, worst <= tol, {"max_relative_error": worst})


def run_sandwich(cfg: RunConfig) -> Outcome:
    alphas = _default_alphas(cfg)
    ps = cfg.p or [0.5, 1.0, 4.0]
    grid = ensemble_grid(cfg, max(alphas) + 2)
    ens = make_random_ensemble(grid, cfg.seed, 10, t_range=(0.25, 1.0), y_halfwidth=1.0)
    lo_c, hi_c = 0.1, 10.0
    rows, summary = [], {}
    for p in ps:
        reports = [sandwich_check(g, p, a) for g in ens for a in alphas]
        lo = min(r.over_lower for r in reports)
        hi = max(r.over_upper for r in reports)
        band = all(lo_c <= v <= hi_c for r in reports for v in (r.over_lower, r.over_upper))
        ok = lo >= lo_c and hi <= hi_c
        summary[str(p)] = {
            "min_ratio_over_h_lower": lo,
            "max_ratio_over_h_upper": hi,
            "max_ratio_over_h_lower": max(r.over_lower for r in reports),
            "min_ratio_over_h_upper": min(r.over_upper for r in reports),
            "passed": ok,
            "both_in_band": band,
        }
        for r in reports:
            rows.append(_row(cfg, "R/h_lower", p, r.alpha, r.over_lower, None, None, lo_c, r.over_lower >= lo_c))
            rows.append(_row(cfg, "R/h_upper", p, r.alpha, r.over_upper, None, None, hi_c, r.over_upper <= hi_c))
    return Outcome(cfg.experiment, rows, all(s["passed"] for s in summary.values()), summary)


def run_carleson_sweep(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [2.0, 4.0, 8.0]
    grid = ensemble_grid(cfg, 4)
    ens = make_random_ensemble(grid, cfg.seed, 5, t_range=(0.25, 1.0), y_halfwidth=1.0)
    slack = 0.05
    rows, ok = [], True
    for j, g in enumerate(ens):
        c1 = carleson_norm(g, 1.0)
        rows.append(_row(cfg, f"member {j}", math.inf, 1.0, c1))
        for a in alphas:
            ca = carleson_norm(g, a)
            good = c1 <= ca * (1 + 1e-12) and ca <= (1 + slack) * a ** (cfg.n / 2) * c1
            ok &= good
            rows.append(_row(cfg, f"member {j}", math.inf, a, ca, None, ca / c1, a ** (cfg.n / 2), good))
    return Outcome(cfg.experiment, rows, ok, {"passed": ok})


def atom_transport_trial(grid, p, alpha, rng, saturation=1.0):
    """One random aperture-1 and one aperture-alpha atom pushed through both maps."""
    n = grid.dim
    center = rng.uniform(-0.5, 0.5, size=n)
    ball = Ball(tuple(center), rng.uniform(0.5, 1.5))
    a1 = atoms_mod.random_atom(grid, ball, 1.0, p, rng, saturation)
    wide = atoms_mod.atom_to_wider_aperture(a1, alpha)
    aa = atoms_mod.random_atom(grid, ball, alpha, p, rng, saturation)
    narrow = atoms_mod.atom_to_narrower_aperture(aa)
    return a1, wide, aa, narrow


def run_atom_transport(cfg: RunConfig) -> Outcome:
    ps = cfg.p or [0.5, 1.0]
    alphas = cfg.alphas or [2.0, 4.0, 16.0]
    below = int(math.ceil(math.log2(max(alphas)))) + 3
    grid = dyadic_grid(cfg.n, below, 1, cfg.preset.steps_per_octave, 2.5, _cells(cfg, 32))
    rng = np.random.default_rng(cfg.seed)
    trials = 100
    rows, ok = [], True
    for p in ps:
        for a in alphas:
            worst, invalid = 0.0, 0
            for _ in range(trials):
                try:
                    a1, wide, aa, narrow = atom_transport_trial(grid, p, a, rng)
                except atoms_mod.InvalidAtomError:
                    invalid += 1
                    continue
                # both maps scale mass and bound by the same factor
                worst = max(
                    worst,
                    abs(wide.report().saturation - a1.report().saturation),
                    abs(narrow.report().saturation - aa.report().saturation),
                )
            good = invalid == 0 and worst <= 1e-9
            ok &= good
            rows.append(_row(cfg, f"{trials} atoms, {invalid} invalid", p, a, None, None, worst, 1e-9, good))
    return Outcome(cfg.experiment, rows, ok, {"passed": ok})


def run_vertical_limit(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [0.5, 0.25, 0.125]
    grid = dyadic_grid(cfg.n, 3, 3, cfg.preset.steps_per_octave, 3.0, _cells(cfg, 128))
    g = make_smooth_bump(grid, None, 1.5, 1.0, 1.0)
    rep = vertical_limit_study(g, alphas)
    tol = 0.05
    ok = rep.decreasing and rep.relative_errors[-1] < tol
    rows = [
        _row(cfg, "max |a^(-n/2) A g - w^(1/2) V g| / max w^(1/2) V g", None, a, None, None, e, tol, r)
        for a, e, r in zip(rep.alphas, rep.relative_errors, rep.resolved)
    ]
    return Outcome(cfg.experiment, rows, ok, {"relative_errors": rep.relative_errors, "decreasing": rep.decreasing})


def run_grand_square(cfg: RunConfig) -> Outcome:
    lams = cfg.lam or [1.5, 2.5]
    ps = cfg.p or [1.0, 2.0]
    grid = ensemble_grid(cfg, 10)
    ens = make_random_ensemble(grid, cfg.seed, 10, t_range=(0.25, 1.0), y_halfwidth=1.0) + [make_a1(grid)]
    K = 10.0
    rows, summary, ok = [], {}, True
    for lam in lams:
        worst = 0.0
        ratios = {p: [] for p in ps}
        for g in ens:
            rep = dyadic_domination_check(g, lam)
            ok &= rep.holds
            worst = max(worst, rep.worst_ratio)
            G = grand_square_function(g, lam)
            A1 = cone_square_function(g, 1.0)
            for p in ps:
                ratios[p].append(lp_quasinorm(G, p) / lp_quasinorm(A1, p))
        rows.append(_row(cfg, f"pointwise G/dyadic sum, lambda={lam}", None, None, worst, None, None, 1.0, worst <= 1.0))
        for p in ps:
            top = max(ratios[p])
            ok &= top <= K
            rows.append(_row(cfg, f"||G||_p/||A1||_p, lambda={lam}", p, None, top, None, None, K, top <= K))
        summary[str(lam)] = {"worst_pointwise_ratio": worst, **{f"max_norm_ratio_p{p}": max(ratios[p]) for p in ps}}
    return Outcome(cfg.experiment, rows, ok, summary)


def run_geometry_props(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [1.0, 2.0, 4.0, 8.0]
    rng = np.random.default_rng(cfg.seed)
    rows, ok = [], True
    for a in alphas:
        ball = Ball(tuple(rng.uniform(-5, 5, size=cfg.n)), rng.uniform(0.1, 3.0))
        w = tent_inclusion_witness(ball, a, 100_000, seed=int(rng.integers(2**32)))
        good = w is None
        ok &= good
        rows.append(_row(cfg, "violations", None, a, 0.0 if good else 1.0, None, None, 0.0, good))
    return Outcome(cfg.experiment, rows, ok, {"passed": ok})


EXPERIMENTS = {
    "a1-sweep": run_a1_sweep,
    "a2-sweep": run_a2_sweep,
    "l2-fubini": run_l2_fubini,
    "isometry": run_isometry,
    "sandwich": run_sandwich,
    "carleson-sweep": run_carleson_sweep,
    "atom-transport": run_atom_transport,
    "vertical-limit": run_vertical_limit,
    "grand-square": run_grand_square,
    "geometry-props": run_geometry_props,
}


def run(cfg: RunConfig) -> Outcome:
    try:
        func = EXPERIMENTS[cfg.experiment]
    except KeyError:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; choose from {sorted(EXPERIMENTS)}") from None
    return func(cfg)


def config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["p"] = None if cfg.p is None else [("inf" if math.isinf(q) else q) for q in cfg.p]
    return d


__all__ = ["COLUMNS", "EXPERIMENTS", "PRESETS", "Outcome", "RunConfig", "run", "h_lower", "h_upper"]
