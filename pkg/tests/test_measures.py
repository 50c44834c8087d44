import math
import warnings

import numpy as np
import pytest

from smoothlab.engine1d import IntervalSet
from smoothlab.measures import Ball, Box, DataMeasure, intersection_volume, region_mass
from smoothlab.noise import MonteCarloFallbackWarning


def test_ball_mass_in_unit_square():
    px = DataMeasure.uniform_box([0, 0], [1, 1])
    assert region_mass(px, Ball([0.5, 0.5], 0.1)) == pytest.approx(math.pi * 0.01)
    assert region_mass(px, Box([0, 0], [1, 1])) == pytest.approx(1.0)
    assert region_mass(px, Ball([3.0, 3.0], 0.5)) == 0.0


def test_one_dimensional_masses():
    px = DataMeasure.uniform_box([-0.25], [0.25])
    assert region_mass(px, IntervalSet.from_pairs([(-0.25, -0.02), (0.02, 0.25)])) == pytest.approx(0.92)
    assert region_mass(px, Ball([0.25], 0.25)) == pytest.approx(0.5)


def test_default_weights_follow_volume():
    px = DataMeasure.uniform_on_regions([Box([0, 0], [1, 1]), Box([2, 0], [4, 2])])
    assert px.weights.tolist() == pytest.approx([0.2, 0.8])


def test_lens_mass_between_two_regions():
    # weight 0.5 on each unit disc; a disc of radius 1 centred on the first covers it fully
    # and meets the second in a lens
    a, b = Ball([0, 0], 1.0), Ball([3, 0], 1.0)
    px = DataMeasure.uniform_on_regions([a, b], [0.5, 0.5])
    probe = Ball([1.5, 0], 2.0)
    lens = intersection_volume(probe, b) / b.volume
    assert region_mass(px, probe) == pytest.approx(0.5 * (intersection_volume(probe, a) / a.volume) + 0.5 * lens)
    assert 0 < lens < 1


def test_overlapping_regions_rejected():
    with pytest.raises(ValueError):
        DataMeasure.uniform_on_regions([Ball([0, 0], 1.0), Ball([1, 0], 1.0)])


def test_invalid_weights():
    with pytest.raises(ValueError):
        DataMeasure.mixture([Box([0], [1])], [0.5])


def test_monte_carlo_fallback_is_flagged():
    px = DataMeasure.uniform_box([0, 0], [1, 1])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        m = px.mass(Ball([1.0, 0.5], 0.3), seed=1)
    assert any(issubclass(w.category, MonteCarloFallbackWarning) for w in rec)
    # half a disc of radius 0.3 lies in the square
    assert m == pytest.approx(0.5 * math.pi * 0.09, abs=5 * math.sqrt(0.14 / 1e6))


def test_sampling_is_seeded_and_inside():
    px = DataMeasure.uniform_on_regions([Ball([0, 0], 1.0), Box([2, 2], [3, 3])])
    a, b = px.sample(3, 500), px.sample(3, 500)
    assert np.array_equal(a, b)
    inside = (np.linalg.norm(a, axis=1) <= 1 + 1e-12) | np.all((a >= 2) & (a <= 3), axis=1)
    assert inside.all()


def test_sphere_intersection_volume_in_3d():
    v = intersection_volume(Ball([0, 0, 0], 1.0), Ball([1, 0, 0], 1.0))
    assert v == pytest.approx(5 * math.pi / 12)
