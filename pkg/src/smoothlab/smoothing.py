"""Randomized smoothing of hard classifiers and the two-stage pipeline Smooth_beta(psi(h * p_alpha)).

The two-stage classifier for a ball union is built from three ingredients:

* the shrunk balls B(c_j, r_{j,alpha}), which always lie inside the stage-one positive set
  (the other balls only add mass);
* outer balls B(c_j, R_j) that always contain it (a union bound over all balls);
* the exact stage-one membership test.

The smoothed vote at x is bracketed by the beta-mass of the inner and outer balls. Most
points are settled by that bracket alone; the rest get a Monte-Carlo vote over one
shared bank of noise draws, so the classifier stays a deterministic function of x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy import special
from scipy.spatial import distance

from .classifiers import (
    BallUnionClassifier,
    BallUnionConditional,
    ConstantClassifier,
    HardClassifier,
    IntervalClassifier,
    Piecewise1DConditional,
    ThresholdClassifier,
    _threshold,
    ball_union_convolution,
    soft_convolve,
)
from .engine1d import TIE_TOL
from .noise import NEGLIGIBLE_TAIL, TAIL_EPS, Family, NoiseModel, PartitionVanished, _squeeze, as_points, make_noise
from .stats import clopper_pearson

_CHUNK = 2_000_000
# Confidence at which a sequential vote may stop before using the whole noise bank.
SEQUENTIAL_CONFIDENCE = 1 - 1e-6


class Mode(str, Enum):
    EXACT = "exact"
    MC = "mc"


class ExactModeUnavailable(ValueError):
    """Exact evaluation was requested for an input without a closed form."""


class UnsupportedOperation(NotImplementedError):
    pass


class ApproximateRegimeWarning(RuntimeWarning):
    """Inputs fall outside the separation regime in which a formula is exact."""


@dataclass(frozen=True)
class SmoothingConfig:
    alpha: float = 0.0
    beta: float = 0.0
    family: Family = Family.UNIFORM
    mode: Mode = Mode.EXACT
    mc_samples: int = 2000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")

    def alpha_model(self, dim) -> NoiseModel | None:
        return make_noise(self.family, self.alpha, dim)

    def beta_model(self, dim) -> NoiseModel | None:
        return make_noise(self.family, self.beta, dim)


# ---------------------------------------------------------------------------
# shrinkage radii


@dataclass(frozen=True)
class ShrinkageReport:
    radii: np.ndarray
    alpha_radii: np.ndarray
    vanished_alpha: np.ndarray
    alpha_beta_radii: np.ndarray | None = None
    vanished_beta: np.ndarray | None = None
    approximate: bool = False

    @property
    def final_radii(self):
        return self.alpha_radii if self.alpha_beta_radii is None else self.alpha_beta_radii

    @property
    def vanished(self):
        return self.vanished_alpha if self.vanished_beta is None else self.vanished_beta


def _inverse_or_vanish(model, radii, level, skip=None):
    out = np.zeros(len(radii))
    gone = np.zeros(len(radii), dtype=bool)
    for j, r in enumerate(radii):
        if skip is not None and skip[j]:
            gone[j] = True
            continue
        try:
            out[j] = model.norm_inverse(r, level)
        except PartitionVanished:
            gone[j] = True
    return out, gone


def _check_regime(c: BallUnionConditional, *models):
    scales = [m.scale for m in models if m is not None]
    if c.n_balls < 2 or not scales:
        return False
    if float(np.min(c.pairwise_gaps())) <= max(scales):
        warnings.warn("balls are closer than the noise scale; shrinkage radii are approximate",
                      ApproximateRegimeWarning, stacklevel=3)
        return True
    return False


def alpha_shrinkage(c: BallUnionConditional, alpha_model: NoiseModel | None) -> ShrinkageReport:
    """Radii of the balls that survive thresholding h * p_alpha at one half."""
    if alpha_model is None:
        return ShrinkageReport(c.radii.copy(), c.radii.copy(), np.zeros(c.n_balls, dtype=bool))
    approx = _check_regime(c, alpha_model)
    r_a, gone = _inverse_or_vanish(alpha_model, c.radii, 0.5 / c.level)
    return ShrinkageReport(c.radii.copy(), r_a, gone, approximate=approx)


def beta_shrinkage(report: ShrinkageReport, beta_model: NoiseModel | None,
                   conditional: BallUnionConditional | None = None) -> ShrinkageReport:
    """Radii after smoothing the stage-one indicator with p_beta and thresholding at one half."""
    if beta_model is None:
        return replace(report, alpha_beta_radii=report.alpha_radii.copy(),
                       vanished_beta=report.vanished_alpha.copy())
    approx = report.approximate
    if conditional is not None:
        approx = _check_regime(conditional, beta_model) or approx
    r_ab, gone = _inverse_or_vanish(beta_model, report.alpha_radii, 0.5, skip=report.vanished_alpha)
    return replace(report, alpha_beta_radii=r_ab, vanished_beta=gone, approximate=approx)


def shrinkage(c: BallUnionConditional, alpha_model, beta_model) -> ShrinkageReport:
    return beta_shrinkage(alpha_shrinkage(c, alpha_model), beta_model, c)


# ---------------------------------------------------------------------------
# smoothing a hard classifier


@dataclass(frozen=True)
class Vote:
    """Smoothed vote P[f(x + V) = 1] with its label and interval (zero width when exact)."""

    prob: np.ndarray | float
    label: np.ndarray | int
    ci_low: np.ndarray | float
    ci_high: np.ndarray | float
    n: int
    exact: bool


def _interval_mass(noise: NoiseModel, intervals, x):
    th = noise.scale
    out = np.zeros(len(x))
    for a, b in intervals:
        if noise.family is Family.UNIFORM:
            out += np.clip(np.minimum(b - x, th) - np.maximum(a - x, -th), 0.0, None) / (2 * th)
        else:
            out += special.ndtr((b - x) / th) - special.ndtr((a - x) / th)
    return np.clip(out, 0.0, 1.0)


def _ball_mass(noise: NoiseModel, centers, radii, pts):
    """Sum of beta-masses of disjoint balls seen from each point."""
    out = np.zeros(len(pts))
    reach = noise.support_radius(NEGLIGIBLE_TAIL)
    for c, r in zip(centers, radii):
        d = np.linalg.norm(pts - c, axis=1)
        near = d <= r + reach
        if np.any(near):
            out[near] += noise.radial_profile(r)(d[near])
    return out


def exact_vote(f: HardClassifier, noise: NoiseModel, pts):
    """Exact P[f(x + V) = 1] for structured hard classifiers; ``None`` when unsupported."""
    if isinstance(f, ConstantClassifier):
        return np.full(len(pts), float(f.label))
    if isinstance(f, BallUnionClassifier):
        if f.dim == 1:
            return _interval_mass(noise, f.to_intervals(), pts[:, 0])
        a = f.active
        return np.clip(_ball_mass(noise, f.centers[a], f.radii[a], pts), 0.0, 1.0)
    if isinstance(f, IntervalClassifier):
        return _interval_mass(noise, f.intervals, pts[:, 0])
    return None


def noise_bank(noise: NoiseModel, cfg: SmoothingConfig):
    """Shared draws in antithetic pairs (v, -v), so every even prefix is symmetric about 0.

    A plain sample has a non-zero mean, which shifts every vote boundary the same way;
    pairing removes that first-order bias for symmetric noise.
    """
    half = noise.sample(cfg.seed, (cfg.mc_samples + 1) // 2)
    return np.stack([half, -half], axis=1).reshape(-1, noise.dim)


def mc_vote_counts(member, pts, bank):
    """Number of bank draws v with member(x + v) true, per point."""
    counts = np.zeros(len(pts), dtype=np.int64)
    step = max(1, _CHUNK // len(bank))
    for s in range(0, len(pts), step):
        block = pts[s:s + step]
        y = (block[:, None, :] + bank[None, :, :]).reshape(-1, pts.shape[1])
        counts[s:s + step] = np.asarray(member(y), dtype=bool).reshape(len(block), len(bank)).sum(axis=1)
    return counts


def sequential_vote(member, pts, bank, first=64, confidence=SEQUENTIAL_CONFIDENCE):
    """Vote fractions over prefixes of the bank, stopping once the side of one half is settled.

    Draws are consumed in doubling prefixes of the fixed bank; a point stops as soon as an
    exact binomial interval at ``confidence`` excludes 0.5, otherwise it uses the full bank.
    Returns (fraction, number of draws used).
    """
    n_total = len(bank)
    k = np.zeros(len(pts), dtype=np.int64)
    used = np.zeros(len(pts), dtype=np.int64)
    active = np.arange(len(pts))
    lo_n = 0
    hi_n = min(first, n_total)
    while len(active):
        k[active] += mc_vote_counts(member, pts[active], bank[lo_n:hi_n])
        used[active] = hi_n
        if hi_n == n_total:
            break
        ci_lo, ci_hi = clopper_pearson(k[active], hi_n, confidence)
        active = active[(ci_lo <= 0.5) & (ci_hi >= 0.5)]
        lo_n, hi_n = hi_n, min(2 * hi_n, n_total)
    return k / used, used


def smooth_hard(f: HardClassifier, noise: NoiseModel | None, x, cfg: SmoothingConfig) -> Vote:
    """Vote probability s = P[f(x + V) = 1] and the label psi(s)."""
    pts, single = as_points(x, f.dim)
    if noise is None:
        lab = f.predict(pts).astype(float)
        return Vote(_squeeze(lab, single), _squeeze(lab.astype(int), single),
                    _squeeze(lab, single), _squeeze(lab, single), 0, True)
    if noise.dim != f.dim:
        raise ValueError("noise and classifier dimensions differ")
    s = exact_vote(f, noise, pts) if cfg.mode is Mode.EXACT else None
    if s is not None:
        lab = _threshold(s)
        return Vote(_squeeze(s, single), _squeeze(lab, single), _squeeze(s, single),
                    _squeeze(s, single), 0, True)
    if cfg.mode is Mode.EXACT:
        raise ExactModeUnavailable(f"no exact smoothing rule for {type(f).__name__}")
    bank = noise_bank(noise, cfg)
    k = mc_vote_counts(lambda y: f.predict(y) == 1, pts, bank)
    n = len(bank)
    s = k / n
    lo, hi = clopper_pearson(k, n)
    return Vote(_squeeze(s, single), _squeeze(_threshold(s), single), _squeeze(lo, single),
                _squeeze(hi, single), n, False)


# ---------------------------------------------------------------------------
# the two-stage classifier


class SmoothedSetClassifier(HardClassifier):
    """Smooth_beta applied to the indicator of a set S given by ``member``.

    ``inner`` and ``outer`` are ``(centers, radii)`` pairs of balls with
    union(inner) subset of S subset of union(outer); the inner balls must be disjoint.
    ``outer=None`` means no outer bound is known. ``isolated[j]`` asserts that inside outer
    ball j the set S coincides with the union of inner balls, so a point whose beta-reach
    meets no other outer ball gets its exact vote from the inner balls.
    """

    def __init__(self, member, dim, beta_model: NoiseModel, bank, inner=None, outer=None,
                 isolated=None, exact_only=False):
        self.member = member
        self.dim = dim
        self.beta_model = beta_model
        self.bank = bank
        empty = (np.zeros((0, dim)), np.zeros(0))
        self.inner = empty if inner is None else (np.asarray(inner[0], float), np.asarray(inner[1], float))
        self.outer = None if outer is None else (np.asarray(outer[0], float), np.asarray(outer[1], float))
        n_outer = 0 if self.outer is None else len(self.outer[1])
        self.isolated = np.zeros(n_outer, bool) if isolated is None else np.asarray(isolated, bool)
        self.exact_only = exact_only
        self.reach = beta_model.support_radius()

    def _member(self, y):
        inside = np.zeros(len(y), dtype=bool)
        if len(self.inner[1]):
            inside = np.any(distance.cdist(y, self.inner[0], "sqeuclidean") <= self.inner[1] ** 2, axis=1)
        undecided = ~inside
        if self.outer is not None:
            undecided &= np.any(distance.cdist(y, self.outer[0], "sqeuclidean") <= self.outer[1] ** 2, axis=1)
        if np.any(undecided):
            inside[undecided] = np.asarray(self.member(y[undecided]), dtype=bool)
        return inside

    def vote(self, pts):
        """Return (probability, exact mask, Monte-Carlo count) for each point."""
        pts = np.asarray(pts, dtype=float)
        lower = _ball_mass(self.beta_model, *self.inner, pts)
        if self.outer is None:
            upper = np.ones(len(pts))
        else:
            upper = np.minimum(1.0, _ball_mass(self.beta_model, *self.outer, pts))
        prob = lower.copy()
        exact = (lower >= 0.5 - TIE_TOL) | (upper < 0.5 - TIE_TOL)
        if np.any(self.isolated) and self.outer is not None:
            ci, ri = self.inner
            co, ro = self.outer
            seen = np.zeros((len(pts), len(ro)), dtype=bool)
            for j, (c, r) in enumerate(zip(co, ro)):
                seen[:, j] = np.linalg.norm(pts - c, axis=1) <= r + self.reach
            single = (seen.sum(axis=1) <= 1) & np.all(~seen | self.isolated, axis=1)
            exact |= single
        todo = ~exact
        if np.any(todo):
            if self.exact_only:
                raise ExactModeUnavailable(
                    f"{int(todo.sum())} points need a Monte-Carlo vote; use mode='mc'")
            prob[todo], _ = sequential_vote(self._member, pts[todo], self.bank)
        return prob, exact

    def predict(self, pts):
        prob, _ = self.vote(pts)
        return _threshold(prob)


def _outer_radii(c: BallUnionConditional, alpha_model: NoiseModel, level):
    """Radii R_j with {x : (h * p_alpha)(x) >= level} inside the union of B(c_j, R_j)."""
    per_ball = level / (c.level * c.n_balls)
    return np.array([alpha_model.norm_inverse(r, per_ball) for r in c.radii])


def _isolation(c: BallUnionConditional, outer_radii, alpha_model):
    """Balls whose outer region never feels another ball's augmentation noise."""
    if c.n_balls == 1:
        return np.ones(1, dtype=bool)
    reach = alpha_model.support_radius()
    d = np.linalg.norm(c.centers[:, None, :] - c.centers[None, :, :], axis=2)
    clear = d > outer_radii[:, None] + c.radii[None, :] + reach
    np.fill_diagonal(clear, True)
    return np.all(clear, axis=1)


def in_shrinkage_regime(c: BallUnionConditional, alpha_model, beta_model):
    """Whether the two-stage positive set is exactly the union of shrunk balls."""
    models = [m for m in (alpha_model, beta_model) if m is not None]
    if c.n_balls == 1 or not models:
        return True
    zeta = float(np.min(c.pairwise_gaps()))
    family = models[0].family
    if family is Family.UNIFORM and zeta > max(m.scale for m in models):
        return True
    return zeta > 2 * sum(m.support_radius(TAIL_EPS) for m in models)


def two_stage(h, cfg: SmoothingConfig, domain=None) -> HardClassifier:
    """The classifier Smooth_beta(psi(h * p_alpha)).

    ``domain`` optionally pads 1D inputs so that the exact engine covers a wider range.
    """
    dim = getattr(h, "dim", 1)
    a_model, b_model = cfg.alpha_model(dim), cfg.beta_model(dim)
    exact_only = cfg.mode is Mode.EXACT

    if isinstance(h, BallUnionConditional) and dim == 1:
        h = h.to_piecewise()
    if isinstance(h, Piecewise1DConditional):
        step = h.step
        stage1 = step.superlevel(0.5) if a_model is None else step.smoothed_superlevel(a_model, 0.5)
        if b_model is None:
            return IntervalClassifier(stage1)
        return IntervalClassifier(stage1.to_step().smoothed_superlevel(b_model, 0.5))

    if isinstance(h, BallUnionConditional):
        if a_model is None and b_model is None:
            return BallUnionClassifier(h.centers, h.radii)
        if in_shrinkage_regime(h, a_model, b_model):
            rep = shrinkage(h, a_model, b_model)
            return BallUnionClassifier(h.centers, rep.final_radii, rep.vanished)
        conv = ball_union_convolution(h, a_model) if a_model is not None else None
        if b_model is None:
            return ThresholdClassifier(lambda pts: conv(as_points(pts, dim)[0]), dim)
        if a_model is None:
            balls = (h.centers, h.radii)
            return SmoothedSetClassifier(h.contains, dim, b_model, None, inner=balls, outer=balls,
                                         isolated=np.ones(h.n_balls, bool), exact_only=exact_only)
        # r_{j,alpha} balls stay inside the stage-one set whatever the separation.
        inner_r, gone = _inverse_or_vanish(a_model, h.radii, 0.5 / h.level)
        keep = ~gone
        outer = _outer_radii(h, a_model, 0.5)
        member = lambda y: conv(y) >= 0.5 - TIE_TOL  # noqa: E731
        bank = None if exact_only else noise_bank(b_model, cfg)
        return SmoothedSetClassifier(member, dim, b_model, bank,
                                     inner=(h.centers[keep], inner_r[keep]),
                                     outer=(h.centers, outer),
                                     isolated=_isolation(h, outer, a_model), exact_only=exact_only)

    # Generic conditional: Monte-Carlo in both stages.
    if exact_only and (a_model is not None or b_model is not None):
        raise ExactModeUnavailable(f"no exact pipeline for {type(h).__name__}")
    stage1 = soft_convolve(h, a_model, cfg.mc_samples, cfg.seed)
    base = ThresholdClassifier(stage1, dim)
    if b_model is None:
        return base
    return SmoothedSetClassifier(lambda y: base.predict(y) == 1, dim, b_model, noise_bank(b_model, cfg))


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    radius: float
    abstain: bool
    infinite: bool


def certified_radius(s, beta, family=Family.GAUSSIAN) -> Certificate:
    """l2 radius beta * Phi^{-1}(s) certified by Gaussian smoothing with vote ``s``."""
    if Family(family) is not Family.GAUSSIAN:
        raise UnsupportedOperation("certified radii are only defined for Gaussian smoothing")
    if not beta > 0:
        raise ValueError("beta must be positive")
    if not 0 <= s <= 1:
        raise ValueError("vote probability must lie in [0, 1]")
    if s <= 0.5:
        return Certificate(0.0, True, False)
    if s == 1:
        return Certificate(math.inf, False, True)
    return Certificate(float(beta * special.ndtri(s)), False, False)
