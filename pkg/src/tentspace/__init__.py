"""Discrete tent spaces T^{p,2}_alpha on the upper half-space R^{1+n}_+."""

from .atoms import Atom, InvalidAtomError, atom_to_narrower_aperture, atom_to_wider_aperture, validate_atom
from .extremals import make_a1, make_a2, make_random_ensemble, make_smooth_bump
from .functionals import (
    SpatialField,
    TruncationWarning,
    carleson_functional,
    carleson_norm,
    cone_square_function,
    grand_square_function,
    vertical_square_function,
)
from .geometry import Ball, Tent, cone_contains, tent_contains, tent_inclusion_witness, unit_ball_volume
from .grid import GridError, GridFunction, HalfSpaceGrid, SupportMarginError, dyadic_grid, integrate_halfspace, make_grid
from .norms import TentSpaceParams, h_lower, h_upper, lp_quasinorm, rescale_isometry, tent_norm

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Ball",
    "GridError",
    "GridFunction",
    "HalfSpaceGrid",
    "InvalidAtomError",
    "SpatialField",
    "SupportMarginError",
    "Tent",
    "TentSpaceParams",
    "TruncationWarning",
    "atom_to_narrower_aperture",
    "atom_to_wider_aperture",
    "carleson_functional",
    "carleson_norm",
    "cone_contains",
    "cone_square_function",
    "dyadic_grid",
    "grand_square_function",
    "h_lower",
    "h_upper",
    "integrate_halfspace",
    "lp_quasinorm",
    "make_a1",
    "make_a2",
    "make_grid",
    "make_random_ensemble",
    "make_smooth_bump",
    "rescale_isometry",
    "tent_contains",
    "tent_inclusion_witness",
    "tent_norm",
    "unit_ball_volume",
    "validate_atom",
    "vertical_square_function",
]
