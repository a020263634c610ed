"""Tent-space atoms for 0 < p <= 1 and the two aperture transports.

A T^p atom of aperture alpha over a ball B is supported in the tent
``T_alpha B`` and satisfies::

    sum over T_alpha B of |a|^2 w_y w_t  <=  alpha^-n |B|^-(2/p - 1)

``|B|`` is the analytic volume of the ball, not a cell count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Ball, Tent, dilate_ball, tent_contains
from .grid import GridFunction

SIZE_RTOL = 1e-9


class InvalidAtomError(ValueError):
    pass


def atom_bound(ball: Ball, alpha: float, p: float) -> float:
    return alpha ** (-ball.dim) * ball.volume ** (-(2.0 / p - 1.0))


def tent_mask(grid, ball: Ball, alpha: float) -> np.ndarray:
    tt = grid.t.reshape((-1,) + (1,) * grid.dim)
    return tent_contains(Tent(ball, alpha), tt, grid.spatial_points()[None])


def atom_mass(a: GridFunction, ball: Ball, alpha: float) -> float:
    """``sum |a|^2 w_y w_t`` over the cells of ``T_alpha B``."""
    grid = a.grid
    inside = tent_mask(grid, ball, alpha)
    return float((np.square(a.values) * inside).sum() * grid.w_y * grid.w_t)


@dataclass(frozen=True)
class AtomReport:
    valid: bool
    mass: float
    bound: float
    cells_outside: int
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.valid

    @property
    def saturation(self) -> float:
        return self.mass / self.bound


def validate_atom(a: GridFunction, ball: Ball, alpha: float, p: float) -> AtomReport:
    if not 0 < p <= 1:
        raise ValueError(f"atoms are defined for 0 < p <= 1, got {p}")
    if not alpha > 0:
        raise ValueError("aperture must be positive")
    inside = tent_mask(a.grid, ball, alpha)
    outside = int(np.count_nonzero(a.support_mask() & ~inside))
    mass = atom_mass(a, ball, alpha)
    bound = atom_bound(ball, alpha, p)
    reasons = []
    if outside:
        reasons.append(f"{outside} nonzero cells outside the tent")
    if mass > bound * (1 + SIZE_RTOL):
        reasons.append(f"mass {mass:.6g} exceeds bound {bound:.6g}")
    return AtomReport(not reasons, mass, bound, outside, reasons)


@dataclass(frozen=True)
class Atom:
    func: GridFunction
    ball: Ball
    aperture: float
    p: float

    def __post_init__(self):
        report = validate_atom(self.func, self.ball, self.aperture, self.p)
        if not report:
            raise InvalidAtomError("; ".join(report.reasons))

    def report(self) -> AtomReport:
        return validate_atom(self.func, self.ball, self.aperture, self.p)


def atom_to_wider_aperture(atom: Atom, alpha: float) -> Atom:
    """Aperture-1 atom over B  ->  ``alpha^(-n/p) a``, aperture-alpha atom over ``alpha B``."""
    if atom.aperture != 1:
        raise InvalidAtomError("input atom must have aperture 1")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    n = atom.func.grid.dim
    return Atom(atom.func * alpha ** (-n / atom.p), dilate_ball(atom.ball, alpha), alpha, atom.p)


def atom_to_narrower_aperture(atom: Atom) -> Atom:
    """Aperture-alpha atom over B  ->  ``alpha^(n/2) a``, aperture-1 atom over the same B."""
    alpha = atom.aperture
    if alpha < 1:
        raise ValueError("aperture must be >= 1")
    n = atom.func.grid.dim
    return Atom(atom.func * alpha ** (n / 2), atom.ball, 1.0, atom.p)


def random_atom(grid, ball: Ball, alpha: float, p: float, rng, saturation: float = 1.0) -> Atom:
    """Random atom: random subset of the tent's cells, random values, mass = saturation * bound."""
    inside = tent_mask(grid, ball, alpha)
    # keep off the grid's boundary layers
    inside[0] = inside[-1] = False
    for ax in range(1, inside.ndim):
        idx = [slice(None)] * inside.ndim
        idx[ax] = 0
        inside[tuple(idx)] = False
        idx[ax] = -1
        inside[tuple(idx)] = False
    if not inside.any():
        raise ValueError("tent contains no interior grid cell")
    keep = inside & (rng.random(inside.shape) < rng.uniform(0.2, 1.0))
    if not keep.any():
        keep = inside
    vals = np.where(keep, rng.uniform(-1.0, 1.0, size=inside.shape), 0.0)
    if not np.any(vals):
        vals = keep.astype(float)
    g = GridFunction(grid, vals)
    scale = np.sqrt(saturation * atom_bound(ball, alpha, p) / atom_mass(g, ball, alpha))
    return Atom(g * scale, ball, alpha, p)
