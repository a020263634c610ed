import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tentspace.atoms import (
    Atom,
    InvalidAtomError,
    atom_bound,
    atom_mass,
    atom_to_narrower_aperture,
    atom_to_wider_aperture,
    random_atom,
    validate_atom,
)
from tentspace.geometry import Ball
from tentspace.grid import GridFunction, dyadic_grid


@pytest.fixture(scope="module")
def grid():
    return dyadic_grid(1, 6, 1, 4, 5, 16)


def test_bound_examples():
    b = Ball(0.0, 1.0)  # |B| = 2
    assert atom_bound(b, 1.0, 1.0) == pytest.approx(0.5)
    assert atom_bound(b, 4.0, 1.0) == pytest.approx(0.125)
    assert atom_bound(b, 1.0, 2 / 3) == pytest.approx(0.25)
    assert atom_bound(b, 2.0, 0.5) == pytest.approx(0.5 / 8)
    assert atom_bound(Ball((0.0, 0.0), 1.0), 1.0, 1.0) == pytest.approx(1 / math.pi)


def test_zero_is_an_atom(grid):
    assert validate_atom(GridFunction.zeros(grid), Ball(0.0, 1.0), 1.0, 1.0)


def test_support_outside_tent_rejected(grid):
    v = np.zeros(grid.shape)
    v[grid.t_index(1.0), np.argmin(np.abs(grid.y - 0.5))] = 1e-6
    rep = validate_atom(GridFunction(grid, v), Ball(0.0, 1.0), 1.0, 1.0)
    assert not rep and rep.cells_outside == 1
    with pytest.raises(InvalidAtomError):
        Atom(GridFunction(grid, v), Ball(0.0, 1.0), 1.0, 1.0)


def test_oversized_atom_rejected(grid):
    a = random_atom(grid, Ball(0.0, 1.0), 1.0, 1.0, np.random.default_rng(0))
    assert a.report().saturation == pytest.approx(1.0)
    rep = validate_atom(a.func * 1.01, a.ball, 1.0, 1.0)
    assert not rep and "exceeds" in rep.reasons[0]


def test_validation_rejects_p_above_one(grid):
    with pytest.raises(ValueError):
        validate_atom(GridFunction.zeros(grid), Ball(0.0, 1.0), 1.0, 1.5)


@pytest.mark.parametrize("p", [0.5, 2 / 3, 1.0])
@pytest.mark.parametrize("alpha", [2.0, 4.0, 8.0])
def test_transports_preserve_saturation(grid, p, alpha):
    rng = np.random.default_rng(17)
    for _ in range(4):
        a = random_atom(grid, Ball(rng.uniform(-1, 1), rng.uniform(0.25, 0.6)), 1.0, p, rng, saturation=0.9)
        wide = atom_to_wider_aperture(a, alpha)
        assert wide.ball.radius == pytest.approx(alpha * a.ball.radius)
        assert wide.report().saturation == pytest.approx(0.9, rel=1e-10)
        b = random_atom(grid, Ball(0.0, 2.0), alpha, p, rng, saturation=0.7)
        narrow = atom_to_narrower_aperture(b)
        assert narrow.aperture == 1.0
        assert narrow.report().saturation == pytest.approx(0.7, rel=1e-10)


def test_wider_transport_requires_unit_aperture(grid):
    a = random_atom(grid, Ball(0.0, 2.0), 2.0, 1.0, np.random.default_rng(1))
    with pytest.raises(InvalidAtomError):
        atom_to_wider_aperture(a, 2.0)


def test_p_two_thirds_bound_is_attained(grid):
    ball = Ball(0.25, 0.5)
    a = random_atom(grid, ball, 1.0, 2 / 3, np.random.default_rng(5))
    assert atom_mass(a.func, ball, 1.0) == pytest.approx(ball.volume**-2, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-1.5, 1.5),
    st.floats(0.3, 1.0),
    st.sampled_from([0.5, 0.75, 1.0]),
    st.sampled_from([2.0, 4.0]),
    st.integers(0, 2**31),
)
def test_wider_transport_always_valid(c, r, p, alpha, seed):
    grid = dyadic_grid(1, 5, 3, 2, 10, 8)
    a = random_atom(grid, Ball(c, r), 1.0, p, np.random.default_rng(seed))
    w = atom_to_wider_aperture(a, alpha)
    assert w.report().cells_outside == 0
    assert w.report().saturation <= 1 + 1e-9
