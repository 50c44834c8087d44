import numpy as np
import pytest

from smoothlab.bounds import (
    PartitionSummary,
    best_upper_bound,
    eta_shrinkage_radii,
    general_g_bound,
    inexact_risk_bounds,
    main_upper_bound,
    smoothed_perturbed,
)
from smoothlab.classifiers import BallUnionConditional, ThresholdClassifier, soft_convolve
from smoothlab.measures import DataMeasure
from smoothlab.noise import NoiseModel
from smoothlab.risk import closed_form_excess
from smoothlab.smoothing import SmoothingConfig, two_stage

LINE = BallUnionConditional(np.array([[2.0], [6.0]]), np.array([1.0, 1.0]), 0.1)
LINE_PX = DataMeasure.uniform_box([0.0], [10.0])


def test_eta_radii_by_hand():
    # 0.6 * (1.2 - t) / 0.4 equals 0.55 at t = 5/6 and 0.45 at t = 0.9
    r = eta_shrinkage_radii(LINE, NoiseModel.uniform(0.2, 1), 0.05)
    assert r.plus == pytest.approx([5 / 6, 5 / 6], abs=1e-9)
    assert r.minus == pytest.approx([0.9, 0.9], abs=1e-9)
    assert not r.vanished_plus.any()


def test_eta_radii_vanish_when_level_unreachable():
    r = eta_shrinkage_radii(LINE, NoiseModel.uniform(0.2, 1), 0.2)
    assert r.vanished_plus.all() and not r.vanished_minus.any()
    with pytest.raises(ValueError):
        eta_shrinkage_radii(LINE, None, 0.5)


def test_zero_eta_sandwich_collapses_to_closed_form():
    a, b = NoiseModel.uniform(0.2, 1), NoiseModel.uniform(0.1, 1)
    sb = inexact_risk_bounds(LINE, LINE_PX, a, b, 0.0)
    exact = closed_form_excess(LINE, LINE_PX, a, b)
    assert sb.lower == pytest.approx(exact, abs=1e-12)
    assert sb.upper == pytest.approx(exact, abs=1e-12)
    assert list(sb.case) == ["A", "A"]


def test_sandwich_widens_with_eta():
    a, b = NoiseModel.uniform(0.2, 1), NoiseModel.uniform(0.1, 1)
    widths = [inexact_risk_bounds(LINE, LINE_PX, a, b, e) for e in (0.0, 0.02, 0.05)]
    for lo, hi in zip(widths, widths[1:]):
        assert hi.lower <= lo.lower + 1e-12 and hi.upper >= lo.upper - 1e-12


def test_main_bound_dominates_exact_excess():
    h = BallUnionConditional(np.array([[25.0, 25.0], [70.0, 70.0]]), np.array([10.0, 8.0]), 0.15)
    px = DataMeasure.uniform_box([0, 0], [100, 100])
    a, b = NoiseModel.uniform(2.0, 2), NoiseModel.uniform(1.5, 2)
    rep = best_upper_bound(h, px, a, b)
    assert rep.bound_value >= closed_form_excess(h, px, a, b)
    assert rep.bound_value <= 1.0


def test_tiling_without_noise_gives_zero_bound():
    # one positive and one negative ball cover the whole segment
    h = BallUnionConditional(np.array([[2.5]]), np.array([2.5]), 0.2)
    px = DataMeasure.uniform_box([0.0], [10.0])
    rep = main_upper_bound(PartitionSummary.from_ball_union(h, negatives=[([7.5], 2.5)]), px, None, None)
    assert rep.bound_value == pytest.approx(0.0, abs=1e-12)
    assert closed_form_excess(h, px, None, None) == pytest.approx(0.0, abs=1e-12)


def test_negative_balls_tighten_the_bound():
    h = BallUnionConditional(np.array([[2.0]]), np.array([2.0]), 0.2)
    px = DataMeasure.uniform_box([0.0], [10.0])
    alone = main_upper_bound(PartitionSummary.from_ball_union(h), px, None, None)
    both = main_upper_bound(PartitionSummary.from_ball_union(h, negatives=[([7.0], 3.0)]), px, None, None)
    assert alone.bound_value == pytest.approx(0.6)
    assert both.bound_value == pytest.approx(0.0, abs=1e-12)


def test_margin_above_ball_value_empties_the_partition():
    summary = PartitionSummary.from_ball_union(LINE, tau=0.25)
    assert all(p.inradius == 0.0 for p in summary.parts)
    with pytest.raises(ValueError):
        PartitionSummary.from_ball_union(LINE, tau=0.5)


def test_general_g_bound_trivial_cases():
    a = NoiseModel.uniform(0.2, 1)
    conv = soft_convolve(LINE, a)
    same = general_g_bound(LINE, conv, LINE_PX, a, 0.01, mc_samples=2000, seed=1)
    assert same.value == pytest.approx(0.01) and same.disagreement == 0.0
    shifted = general_g_bound(LINE, lambda x: conv(x) + 0.1, LINE_PX, a, 0.01, mc_samples=2000, seed=1)
    assert shifted.value == pytest.approx(1.01) and shifted.disagreement == 1.0


def test_smoothed_perturbed_matches_two_stage_for_the_exact_convolution():
    h = BallUnionConditional(np.array([[20.0, 20.0], [50.0, 50.0]]), np.array([8.0, 6.0]), 0.2)
    cfg = SmoothingConfig(2.0, 1.0, "uniform", mode="mc", mc_samples=2048, seed=3)
    g = soft_convolve(h, cfg.alpha_model(2))
    f = smoothed_perturbed(h, g, 0.0, cfg)
    ref = two_stage(h, cfg)
    pts = np.random.default_rng(0).uniform(0, 70, size=(300, 2))
    pts[:4] = [[20.0, 20.0], [20.0, 26.5], [50.0, 55.0], [0.0, 0.0]]
    assert np.array_equal(f(pts), ref(pts))


def test_smoothed_perturbed_without_beta_thresholds_g():
    g = soft_convolve(LINE, NoiseModel.uniform(0.2, 1))
    f = smoothed_perturbed(LINE, g, 0.05, SmoothingConfig(0.2, 0.0, "uniform"))
    assert isinstance(f, ThresholdClassifier)
    assert f(np.array([[2.0], [3.5]])).tolist() == [1, 0]
