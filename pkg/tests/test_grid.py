import math

import numpy as np
import pytest

from tentspace.grid import (
    GridError,
    GridFunction,
    SupportMarginError,
    dyadic_grid,
    integrate_halfspace,
    make_grid,
)


def test_make_grid_1d_example():
    grid = make_grid(1, 2**-6, 2**6, 13, -4, 4, 129)
    assert grid.ratio == pytest.approx(2.0, rel=1e-15)
    assert grid.w_t == pytest.approx(math.log(2), rel=1e-15)
    assert grid.dy == 1 / 16
    np.testing.assert_allclose(grid.t, 2.0 ** np.arange(-6, 7), rtol=1e-15)
    assert grid.t[-1] <= grid.t_max * (1 + 1e-12)


def test_make_grid_2d_example():
    grid = make_grid(2, 2**-4, 2**4, 9, -2, 2, 65)
    assert grid.ratio == pytest.approx(2.0)
    assert grid.w_y == (1 / 16) ** 2
    assert grid.shape == (9, 65, 65)


@pytest.mark.parametrize(
    "args",
    [
        (1, 1, 1, 1, -1, 1, 5),  # n_t < 2
        (1, 0.0, 1, 4, -1, 1, 5),  # t_min <= 0
        (1, -1.0, 1, 4, -1, 1, 5),
        (1, 1, 2, 4, 1, 1, 5),  # y_lo == y_hi
        (1, 1, 2, 4, 2, 1, 5),
        (1, 1, 2, 4, -1, 1, 1),  # n_y < 2
        (4, 1, 2, 4, -1, 1, 5),  # unsupported dim
    ],
)
def test_make_grid_rejects(args):
    with pytest.raises(GridError):
        make_grid(*args)


def test_dyadic_nodes_are_exact_powers_of_two():
    grid = dyadic_grid(1, 6, 5, 8, 2, 16)
    for k in range(-6, 6):
        assert grid.t[grid.t_index(2.0**k)] == 2.0**k


def test_integrate_zero_and_single_cell():
    grid = make_grid(2, 2**-3, 2**3, 7, -1, 1, 9)
    assert integrate_halfspace(GridFunction.zeros(grid)) == 0.0
    v = np.zeros(grid.shape)
    v[3, 4, 4] = 1.0
    assert integrate_halfspace(GridFunction(grid, v)) == pytest.approx(grid.w_y * grid.w_t, rel=1e-15)


def test_integrate_rejects_nonfinite():
    grid = make_grid(1, 0.5, 2, 3, -1, 1, 5)
    v = np.zeros(grid.shape)
    v[1, 2] = np.nan
    with pytest.raises(GridError):
        integrate_halfspace((grid, v))


def _box_integral(n_t_per_octave, n_y_per_unit):
    """Quadrature of 1_[1,2](t) 1_[0,1](y) dy dt/t on a cell-centred grid."""
    m = n_t_per_octave
    # nodes at cell centres in log t and in y, so the box is tiled by whole cells
    t_min = 2.0 ** (-3 + 0.5 / m)
    grid = make_grid(1, t_min, t_min * 2.0 ** (6 - 1 / m), 6 * m, -2 + 0.5 / n_y_per_unit,
                     2 - 0.5 / n_y_per_unit, 4 * n_y_per_unit)
    t = grid.t[:, None]
    y = grid.y[None, :]
    f = ((t > 1) & (t < 2) & (y > 0) & (y < 1)).astype(float)
    return integrate_halfspace((grid, f))


def test_cell_centred_box_integral_is_log2_at_every_resolution():
    errs = [abs(_box_integral(m, k) - math.log(2)) for m, k in [(2, 4), (4, 8), (8, 16)]]
    assert max(errs) < 1e-12


def _node_box_integral(m, k):
    grid = dyadic_grid(1, 3, 3, m, 2, k)
    t = grid.t[:, None]
    y = grid.y[None, :]
    f = ((t >= 1) & (t <= 2) & (y >= 0) & (y <= 1)).astype(float)
    return integrate_halfspace((grid, f))


def test_integral_node_sampled_box_refines_toward_log2():
    # closed-box sampling overcounts one row and one column of cells
    errs = [abs(_node_box_integral(m, k) - math.log(2)) for m, k in [(2, 4), (4, 8), (8, 16), (16, 32)]]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.1


def test_dilation_by_ratio_power_preserves_integral():
    grid = dyadic_grid(1, 4, 4, 4, 2, 8)
    rng = np.random.default_rng(1)
    v = np.zeros(grid.shape)
    v[6:12, 3:20] = rng.normal(size=(6, 17))
    g = GridFunction(grid, v)
    for k in (-3, 1, 5):
        assert integrate_halfspace(g.shift(k)) == pytest.approx(integrate_halfspace(g), rel=1e-14)


def test_support_margin_enforced():
    grid = make_grid(1, 0.5, 4, 4, -1, 1, 5)
    v = np.zeros(grid.shape)
    v[0, 2] = 1.0
    with pytest.raises(SupportMarginError):
        GridFunction(grid, v)
    v = np.zeros(grid.shape)
    v[1, 0] = 1.0
    with pytest.raises(SupportMarginError):
        GridFunction(grid, v)
    g = GridFunction(grid, v, allow_truncated=True)
    assert g.allow_truncated


def test_grid_function_rejects_nonfinite_and_bad_shape():
    grid = make_grid(1, 0.5, 4, 4, -1, 1, 5)
    v = np.zeros(grid.shape)
    v[1, 1] = np.inf
    with pytest.raises(GridError):
        GridFunction(grid, v)
    with pytest.raises(GridError):
        GridFunction(grid, np.zeros((3, 5)))


def test_values_are_read_only():
    grid = make_grid(1, 0.5, 4, 4, -1, 1, 5)
    g = GridFunction.zeros(grid)
    with pytest.raises(ValueError):
        g.values[1, 1] = 2.0


def test_shift_out_of_grid_raises():
    grid = make_grid(1, 0.5, 4, 4, -1, 1, 5)
    v = np.zeros(grid.shape)
    v[2, 2] = 1.0
    g = GridFunction(grid, v)
    with pytest.raises(GridError):
        g.shift(2)
    assert g.shift(-1).values[1, 2] == 1.0


def test_ratio_power():
    grid = dyadic_grid(1, 2, 2, 4, 1, 4)
    assert grid.ratio_power(4.0) == 8
    assert grid.ratio_power(0.5) == -4
    with pytest.raises(GridError):
        grid.ratio_power(3.0)


def test_json_roundtrip(tmp_path):
    grid = make_grid(2, 0.25, 4, 5, -1, 1, 5)
    v = np.zeros(grid.shape)
    v[2, 1:4, 2] = [1.5, -2.0, 0.25]
    g = GridFunction(grid, v)
    path = tmp_path / "g.json"
    g.save(path)
    back = GridFunction.load(path)
    assert back.grid == grid
    np.testing.assert_array_equal(back.values, v)
    data = g.to_dict()
    assert data["shape"] == [5, 5, 5]
    # row-major: flat index of (2, 1, 2)
    assert data["values"][2 * 25 + 1 * 5 + 2] == 1.5


def test_json_rejects_foreign_format():
    with pytest.raises(GridError):
        GridFunction.from_dict({"format": "other"})
