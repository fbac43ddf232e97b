"""The shifted-helicoid leaf family: continuity, coverage, disjointness."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zmcsurf import foliation, zmc
from zmcsurf.errors import EmptyGrid
from zmcsurf.foliation import (
    ExcludedPoint,
    LeafSurface,
    band_index,
    foliation_check,
    leaf_height,
    leaf_of_point,
    leaf_point,
)
from zmcsurf.meshio import GridSpec

PI = math.pi


def test_first_band_is_the_principal_arctangent():
    assert leaf_height(1.0, 1.0) == pytest.approx(PI / 4)


def test_boundary_value_agrees_from_both_bands():
    # At x = pi the band-0 formula gives atan(1/pi) and the band-1 formula
    # gives (-1) * atan(1/(pi - 2pi)); they coincide.
    assert leaf_height(PI, 1.0) == pytest.approx(math.atan(1 / PI), abs=1e-12)


def test_zero_height_off_the_excluded_set():
    assert leaf_height(2 * PI + 0.5, 0.0) == 0.0


def test_leaf_shift_of_a_known_point():
    assert leaf_of_point(1.0, 1.0, PI / 4) == pytest.approx(0.0, abs=1e-15)


def test_excluded_points_raise():
    with pytest.raises(ExcludedPoint):
        leaf_height(0.0, 0.0)
    with pytest.raises(ExcludedPoint):
        leaf_height(2 * PI, 0.0)
    with pytest.raises(ExcludedPoint):
        leaf_of_point(2 * PI, 0.0, 5.0)


def test_band_assignment_window():
    rng = random.Random(2)
    for _ in range(500):
        x = rng.uniform(-40, 40)
        k = band_index(x)
        assert (2 * k - 1) * PI <= x <= (2 * k + 1) * PI


def test_band_boundary_formulas_agree_exactly():
    # Reduced identity: (-1)^k atan(y/pi) == (-1)^(k+1) atan(-y/pi), which is
    # what the two adjacent band formulas evaluate to at x = (2k+1)*pi.
    rng = random.Random(3)
    for k in range(-5, 6):
        for _ in range(1000):
            y = rng.uniform(-10, 10)
            if y == 0.0:
                continue
            from_left = (-1.0) ** k * math.atan(y / PI)
            from_right = (-1.0) ** (k + 1) * math.atan(-y / PI)
            assert from_left == from_right


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-20, 20, allow_nan=False), y=st.floats(-5, 5, allow_nan=False),
       t=st.floats(-10, 10, allow_nan=False))
def test_leaf_round_trip_recovers_the_shift(x, y, t):
    try:
        px, py, pz = leaf_point(x, y, t)
    except ExcludedPoint:
        return
    assert abs(leaf_of_point(px, py, pz) - t) <= 1e-12


def test_leaves_partition_random_points():
    rng = random.Random(17)
    for _ in range(2000):
        x = rng.uniform(-15, 15)
        y = rng.uniform(-4, 4)
        z = rng.uniform(-6, 6)
        if math.hypot(x - 2 * PI * band_index(x), y) < 1e-9:
            continue
        t = leaf_of_point(x, y, z)
        assert leaf_point(x, y, t) == (x, y, z) or abs(leaf_point(x, y, t)[2] - z) < 1e-12


def test_leaf_is_a_minimal_graph_on_the_band_interior():
    leaf = LeafSurface(0.0)
    rng = random.Random(23)
    for _ in range(50):
        x = rng.uniform(0.2, 2.8) * rng.choice([-1, 1])
        y = rng.uniform(-2.5, 2.5)
        if math.hypot(x, y) < 0.2:
            continue
        jet = leaf.exact_jet(x, y)
        assert abs(zmc.graph_residual("minimal", jet)) < 1e-10


def test_shifted_leaf_heights():
    leaf = LeafSurface(2.5)
    assert leaf.height_at(1.0, 1.0) == pytest.approx(PI / 4 + 2.5)


def test_leaf_domain_margin_excludes_axis_neighborhood():
    leaf = LeafSurface(0.0)
    assert not leaf.domain_ok(2 * PI + 0.01, 0.0, 0.05)
    assert leaf.domain_ok(2 * PI + 0.2, 0.0, 0.05)


def test_foliation_check_report():
    grid = GridSpec(-3 * PI, 3 * PI, -3.0, 3.0, 41, 41)
    report = foliation_check(grid, [-1.0, 0.0, 2.5])
    assert report.passed
    assert report.parameters["boundary_max"] < 1e-6
    assert report.parameters["roundtrip_max"] <= 1e-12
    assert report.parameters["boundary_pairs"] > 0


def test_foliation_check_needs_leaf_shifts():
    with pytest.raises(EmptyGrid):
        foliation_check(GridSpec(-3, 3, -3, 3, 11, 11), [])
