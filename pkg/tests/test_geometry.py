import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tentspace.geometry import (
    Ball,
    Tent,
    cone_contains,
    dilate_ball,
    tent_contains,
    tent_inclusion_witness,
    unit_ball_volume,
)

coords = st.floats(-5, 5, allow_nan=False)
positive = st.floats(0.01, 5, allow_nan=False)


@pytest.mark.parametrize(
    "x, alpha, t, y, expected",
    [
        (0.0, 1.0, 1.0, 0.0, True),
        (0.0, 1.0, 1.0, 1.0, False),
        (0.0, 2.0, 0.5, 0.9, True),
    ],
)
def test_cone_contains_examples(x, alpha, t, y, expected):
    assert bool(cone_contains(x, alpha, t, y)) is expected


@pytest.mark.parametrize(
    "alpha, t, y, expected",
    [
        (1.0, 0.5, 0.25, True),
        (2.0, 0.6, 0.0, False),
        (1.0, 0.5, 0.5, False),
        (2.0, 0.4, 0.1, True),
    ],
)
def test_tent_contains_examples(alpha, t, y, expected):
    assert tent_contains(Tent(Ball(0.0, 1.0), alpha), t, y) is expected


def test_tent_example_inclusion_point():
    b = Ball(0.0, 1.0)
    assert tent_contains(Tent(b, 2.0), 0.4, 0.1)
    assert tent_contains(Tent(b, 1.0), 0.4, 0.1)


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_dilate_ball():
    assert dilate_ball(Ball(0.0, 1.0), 2.0) == Ball(0.0, 2.0)
    b = Ball((1.0, -2.0), 0.7)
    assert dilate_ball(b, 1.0) == b
    for n in (1, 2, 3):
        a = 3.0
        unit = Ball((0.0,) * n, 1.0)
        assert dilate_ball(unit, a).volume / a**n == pytest.approx(unit.volume)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        Ball(0.0, 0.0)
    with pytest.raises(ValueError):
        Tent(Ball(0.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        dilate_ball(Ball(0.0, 1.0), -1.0)
    with pytest.raises(ValueError):
        tent_inclusion_witness(Ball(0.0, 1.0), 0.5)


def test_inclusion_identity_at_unit_aperture():
    b = Ball(0.3, 1.2)
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 1.5, 1000)
    y = rng.uniform(-1.5, 2.0, (1000, 1))
    assert np.array_equal(tent_contains(Tent(b, 1.0), t, y), tent_contains(Tent(dilate_ball(b, 1.0), 1.0), t, y))
    assert tent_inclusion_witness(b, 1.0, 10_000) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inclusions_alpha_4(n):
    assert tent_inclusion_witness(Ball((0.0,) * n, 1.0), 4.0, 100_000, seed=n) is None


@settings(max_examples=60, deadline=None)
@given(x=coords, r=positive, a1=st.floats(0.1, 8), a2=st.floats(0.1, 8), t=positive, y=coords)
def test_tent_nesting_in_aperture(x, r, a1, a2, t, y):
    lo, hi = sorted((a1, a2))
    b = Ball(x, r)
    if tent_contains(Tent(b, hi), t, [y]):
        assert tent_contains(Tent(b, lo), t, [y])


@settings(max_examples=60, deadline=None)
@given(x=coords, r=positive, a=st.floats(0.1, 8), t=positive, y=coords)
def test_tent_height_and_base(x, r, a, t, y):
    b = Ball(x, r)
    inside = tent_contains(Tent(b, a), t, [y])
    if t >= r / a:
        assert not inside
    if inside:
        assert b.contains([y])


@settings(max_examples=60, deadline=None)
@given(x=coords, a1=st.floats(0.1, 8), a2=st.floats(0.1, 8), t=positive, y=coords)
def test_cone_monotone_in_aperture(x, a1, a2, t, y):
    lo, hi = sorted((a1, a2))
    if cone_contains(x, lo, t, [y]):
        assert cone_contains(x, hi, t, [y])


@settings(max_examples=25, deadline=None)
@given(cx=coords, cy=coords, r=positive, a=st.sampled_from([1.0, 2.0, 4.0, 8.0]), seed=st.integers(0, 2**31))
def test_inclusions_random_balls_2d(cx, cy, r, a, seed):
    assert tent_inclusion_witness(Ball((cx, cy), r), a, 5_000, seed=seed) is None


def test_witness_reports_counterexample_for_wrong_inclusion():
    # T_1 B is not inside T_alpha B for alpha > 1: the sampler must be able to see that
    b = Ball(0.0, 1.0)
    rng = np.random.default_rng(3)
    t = rng.uniform(0, 1, 10_000)
    y = rng.uniform(-1, 1, (10_000, 1))
    assert np.any(tent_contains(Tent(b, 1.0), t, y) & ~tent_contains(Tent(b, 4.0), t, y))
