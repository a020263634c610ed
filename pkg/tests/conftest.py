import numpy as np
import pytest

from tentspace.grid import GridFunction, dyadic_grid


def single_cell(grid, i_t, i_y, value=1.0):
    v = np.zeros(grid.shape)
    v[(i_t,) + tuple(np.atleast_1d(i_y))] = value
    return GridFunction(grid, v)


@pytest.fixture
def grid1d():
    return dyadic_grid(1, 3, 2, 4, 6, 8)


@pytest.fixture
def grid2d():
    return dyadic_grid(2, 2, 1, 2, 2.5, 4)
