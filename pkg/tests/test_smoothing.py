import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from smoothlab.classifiers import (
    BallUnionClassifier,
    BallUnionConditional,
    ConstantClassifier,
    IntervalClassifier,
    Piecewise1DConditional,
    ThresholdClassifier,
)
from smoothlab.engine1d import IntervalSet
from smoothlab.noise import Family, NoiseModel
from smoothlab.smoothing import (
    ApproximateRegimeWarning,
    ExactModeUnavailable,
    SmoothedSetClassifier,
    SmoothingConfig,
    UnsupportedOperation,
    alpha_shrinkage,
    certified_radius,
    in_shrinkage_regime,
    noise_bank,
    shrinkage,
    smooth_hard,
    two_stage,
)

H_BAR = Piecewise1DConditional(np.array([-0.25, -0.02, 0.02, 0.25]), np.array([1.0, 0.0, 1.0]))


def test_shrinkage_radii_1d_by_hand():
    # interval of radius 1 at level 0.6 under uniform noise of radius 0.2:
    # 0.6 * (1.2 - t) / 0.4 = 0.5  =>  t = 1.2 - 1/3
    h = BallUnionConditional(np.array([[0.0]]), np.array([1.0]), 0.1)
    rep = shrinkage(h, NoiseModel.uniform(0.2, 1), None)
    assert rep.alpha_radii[0] == pytest.approx(1.2 - 1 / 3, abs=1e-9)
    assert rep.final_radii[0] == pytest.approx(1.2 - 1 / 3, abs=1e-9)


def test_shrinkage_radius_in_the_plane():
    # a disc of radius 1/3 sits inside the uniform noise disc of radius 1 when centred
    h = BallUnionConditional(np.array([[0.0, 0.0]]), np.array([1.0]), 0.1)
    a = NoiseModel.uniform(1.0, 2)
    rep = alpha_shrinkage(h, a)
    assert float(a.shifted_cdf(1.0, [rep.alpha_radii[0], 0.0])) == pytest.approx(0.5 / 0.6, abs=1e-9)


def test_small_ball_vanishes():
    h = BallUnionConditional(np.array([[0.0, 0.0]]), np.array([0.3]), 0.05)
    rep = shrinkage(h, NoiseModel.uniform(1.0, 2), NoiseModel.uniform(1.0, 2))
    assert rep.vanished.all()
    f = two_stage(h, SmoothingConfig(1.0, 1.0, "uniform"))
    assert f([0.0, 0.0]) == 0


def test_regime_warning_for_close_balls():
    h = BallUnionConditional(np.array([[0.0, 0.0], [2.5, 0.0]]), np.array([1.0, 1.0]), 0.1)
    with pytest.warns(ApproximateRegimeWarning):
        shrinkage(h, NoiseModel.uniform(1.0, 2), None)


def test_construction_pipelines_exact():
    # widths 0.1 and 0.93 correspond to noise radii 0.05 and 0.465
    plain = two_stage(H_BAR, SmoothingConfig(0.0, 0.465, "uniform"))
    aug = two_stage(H_BAR, SmoothingConfig(0.05, 0.465, "uniform"))
    assert isinstance(plain, IntervalClassifier) and plain.intervals.measure == 0
    assert list(aug.intervals) == [pytest.approx((-0.25, 0.25), abs=1e-9)]


def test_no_noise_returns_base():
    h = BallUnionConditional(np.array([[0.0, 0.0]]), np.array([1.0]), 0.1)
    f = two_stage(h, SmoothingConfig())
    assert isinstance(f, BallUnionClassifier)
    assert f([0.9, 0.0]) == 1


def test_regime_selection():
    far = BallUnionConditional(np.array([[0.0, 0.0], [30.0, 0.0]]), np.array([5.0, 5.0]), 0.1)
    near = BallUnionConditional(np.array([[0.0, 0.0], [10.5, 0.0]]), np.array([5.0, 5.0]), 0.1)
    u = NoiseModel.uniform(1.0, 2)
    g = NoiseModel.gaussian(1.0, 2)
    assert in_shrinkage_regime(far, u, u)
    assert not in_shrinkage_regime(near, u, u)
    assert not in_shrinkage_regime(far, g, g)  # 20 < 2 * (support of two Gaussians)
    assert isinstance(two_stage(far, SmoothingConfig(1.0, 1.0, "uniform")), BallUnionClassifier)
    assert isinstance(two_stage(near, SmoothingConfig(1.0, 1.0, "uniform", mode="mc")), SmoothedSetClassifier)
    with pytest.raises(ExactModeUnavailable):
        f = two_stage(near, SmoothingConfig(1.0, 1.0, "uniform", mode="exact"))
        f(np.array([[5.25, 0.0]]))


def test_smoothed_set_matches_direct_sampling():
    # two nearby discs: the gap between them fills in after augmentation
    h = BallUnionConditional(np.array([[0.0, 0.0], [2.3, 0.0]]), np.array([1.0, 1.0]), 0.3)
    cfg = SmoothingConfig(0.6, 0.8, "gaussian", mode="mc", mc_samples=4096, seed=5)
    f = two_stage(h, cfg)
    a, b = cfg.alpha_model(2), cfg.beta_model(2)
    pts = np.array([[1.15, 0.0], [1.15, 0.8], [-0.9, 0.0], [3.4, 0.0], [1.15, 1.6]])
    prob, _ = f.vote(pts)
    za, zb = a.sample(1, 2000), b.sample(2, 4000)
    stage1 = lambda y: np.array([np.mean(h(q + za)) >= 0.5 for q in y])  # noqa: E731
    for p, s in zip(pts, prob):
        ref = np.mean(stage1(p + zb))
        assert abs(s - ref) < 0.06


def test_votes_settled_by_bounds_are_flagged_exact():
    h = BallUnionConditional(np.array([[0.0, 0.0], [7.0, 0.0]]), np.array([3.0, 3.0]), 0.3)
    f = two_stage(h, SmoothingConfig(0.6, 0.8, "gaussian", mode="mc"))
    assert isinstance(f, SmoothedSetClassifier)
    prob, exact = f.vote(np.array([[0.0, 0.0], [20.0, 20.0]]))
    assert exact.all()
    assert prob[1] == 0.0 and prob[0] > 0.5


def test_noise_bank_is_antithetic():
    bank = noise_bank(NoiseModel.gaussian(1.0, 2), SmoothingConfig(mc_samples=64, seed=3))
    assert bank.shape == (64, 2)
    assert np.allclose(bank[0::2], -bank[1::2])
    assert np.allclose(bank[:32].mean(axis=0), 0.0)


def test_smooth_hard_exact_and_mc_agree():
    f = IntervalClassifier(IntervalSet.from_pairs([(-1.0, 1.0)]))
    noise = NoiseModel.gaussian(0.5, 1)
    x = np.array([0.0, 0.8, 1.3])
    exact = smooth_hard(f, noise, x, SmoothingConfig(mode="exact"))
    mc = smooth_hard(f, noise, x, SmoothingConfig(mode="mc", mc_samples=20_000, seed=2))
    expect = stats.norm.cdf((1 - x) / 0.5) - stats.norm.cdf((-1 - x) / 0.5)
    assert np.allclose(exact.prob, expect, atol=1e-12)
    assert np.all((mc.ci_low <= expect) & (expect <= mc.ci_high))


def test_smooth_hard_constant_and_unsupported():
    v = smooth_hard(ConstantClassifier(1, 2), NoiseModel.uniform(1.0, 2), np.zeros((3, 2)), SmoothingConfig())
    assert np.all(v.label == 1)
    f = ThresholdClassifier(lambda p: p[:, 0], 2)
    with pytest.raises(ExactModeUnavailable):
        smooth_hard(f, NoiseModel.uniform(1.0, 2), np.zeros((1, 2)), SmoothingConfig(mode="exact"))


def test_generic_conditional_exact_mode_raises():
    h = lambda x: np.full(len(x), 0.7)  # noqa: E731
    with pytest.raises(ExactModeUnavailable):
        two_stage(h, SmoothingConfig(0.5, 0.5, mode="exact"))


def test_certified_radius():
    assert certified_radius(0.5, 2.0).radius == 0.0
    assert certified_radius(0.5, 2.0).abstain
    c = certified_radius(0.9, 0.5)
    assert c.radius == pytest.approx(0.5 * 1.2815515655446004)
    assert certified_radius(1.0, 1.0).infinite
    with pytest.raises(UnsupportedOperation):
        certified_radius(0.9, 1.0, Family.UNIFORM)
    with pytest.raises(ValueError):
        certified_radius(1.2, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5001, 0.999), st.floats(0.01, 5.0))
def test_certified_radius_scales_with_beta(s, beta):
    assert certified_radius(s, beta).radius == pytest.approx(beta * stats.norm.ppf(s), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.2), st.floats(0.0, 0.5))
def test_more_augmentation_never_grows_the_single_ball(a, b):
    # alpha-monotonicity of the final radius for an isolated ball
    h = BallUnionConditional(np.array([[0.0, 0.0]]), np.array([1.0]), 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApproximateRegimeWarning)
        small = shrinkage(h, NoiseModel.uniform(a, 2) if a else None, NoiseModel.uniform(b, 2) if b else None)
        large = shrinkage(h, NoiseModel.uniform(a + 0.1, 2), NoiseModel.uniform(b, 2) if b else None)
    assert large.final_radii[0] <= small.final_radii[0] + 1e-9
