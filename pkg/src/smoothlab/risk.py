"""Benign risk, excess risk and its closed form for ball-union conditionals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import (
    BallUnionClassifier,
    BallUnionConditional,
    ConstantClassifier,
    HardClassifier,
    IntervalClassifier,
    Piecewise1DConditional,
    hard,
)
from .engine1d import StepFunction
from .measures import Ball, DataMeasure, region_mass
from .smoothing import (
    ExactModeUnavailable,
    Mode,
    SmoothingConfig,
    shrinkage,
    two_stage,
)
from .stats import mean_ci

DEFAULT_RISK_SAMPLES = 20_000

__all__ = [
    "RiskReport", "risk", "excess_risk", "closed_form_excess", "bayes_risk", "empirical_delta",
    "loss_terms", "sample_labeled", "region_mass", "DEFAULT_RISK_SAMPLES",
]


@dataclass(frozen=True)
class RiskReport:
    value: float
    mode: Mode
    ci_low: float
    ci_high: float
    n: int
    seed: int | None
    se: float = 0.0

    @classmethod
    def exact(cls, value):
        v = float(value)
        return cls(v, Mode.EXACT, v, v, 0, None)

    @classmethod
    def from_samples(cls, values, seed):
        mean, se, lo, hi = mean_ci(values)
        return cls(mean, Mode.MC, lo, hi, len(values), seed, se)


def loss_terms(f: HardClassifier, h, pts):
    """Conditional error probability f(1 - h) + (1 - f) h at each point."""
    lab = f.predict(pts).astype(float)
    hv = np.asarray(h(pts[:, 0] if getattr(h, "dim", 1) == 1 else pts), dtype=float)
    return lab * (1.0 - hv) + (1.0 - lab) * hv


def _indicator_step(f, lo, hi):
    if isinstance(f, ConstantClassifier):
        return StepFunction(np.array([lo, hi]), np.array([float(f.label)]))
    iv = f.intervals if isinstance(f, IntervalClassifier) else f.to_intervals()
    return iv.to_step()


def _exact_risk_1d(f, h, px: DataMeasure):
    if px.dim != 1 or not isinstance(f, (ConstantClassifier, IntervalClassifier, BallUnionClassifier)):
        return None
    if isinstance(h, BallUnionConditional):
        h = h.to_piecewise()
    if not isinstance(h, Piecewise1DConditional):
        return None
    dens = px.density_step()
    lo, hi = dens.support
    F = _indicator_step(f, lo, hi)
    H = h.step
    bps = np.unique(np.concatenate([dens.breakpoints, F.breakpoints, H.breakpoints]))
    mids = 0.5 * (bps[:-1] + bps[1:])
    fv, hv, pv = F(mids), H(mids), dens(mids)
    loss = fv * (1 - hv) + (1 - fv) * hv
    return float(np.sum(pv * loss * np.diff(bps)))


def _exact_risk_balls(f, h, px: DataMeasure):
    if not isinstance(h, BallUnionConditional) or not isinstance(f, (ConstantClassifier, BallUnionClassifier)):
        return None
    w = h.level
    balls_i = [Ball(c, r) for c, r in zip(h.centers, h.radii)]
    p_i = px.exact_mass(balls_i)
    if p_i is None:
        return None
    if isinstance(f, ConstantClassifier):
        return w * p_i if f.label == 0 else 1.0 - w * p_i
    a = f.active
    balls_f = [Ball(c, r) for c, r in zip(f.centers[a], f.radii[a])]
    p_f = px.exact_mass(balls_f)
    if p_f is None:
        return None
    # p(F intersect I), where each F ball is either inside one I ball or disjoint from all.
    p_fi = 0.0
    for bf in balls_f:
        d = np.linalg.norm(h.centers - bf.center, axis=1)
        inside = d + bf.radius <= h.radii + 1e-12
        apart = d >= h.radii + bf.radius
        if np.any(inside):
            p_fi += px.exact_mass(bf)
        elif not np.all(apart):
            return None
    return p_f + w * p_i - 2 * w * p_fi


def exact_risk(f: HardClassifier, h, px: DataMeasure):
    """Closed-form R(f) when the decision regions allow it, else ``None``."""
    v = _exact_risk_1d(f, h, px)
    if v is None:
        v = _exact_risk_balls(f, h, px)
    return None if v is None else float(min(max(v, 0.0), 1.0))


def risk(f: HardClassifier, h, px: DataMeasure, mode=None, mc_samples=DEFAULT_RISK_SAMPLES, seed=0):
    """Benign risk E[f(X)(1 - h(X)) + (1 - f(X)) h(X)].

    ``mode=None`` uses the closed form when one exists and Monte-Carlo otherwise.
    """
    mode = None if mode is None else Mode(mode)
    if mode is not Mode.MC:
        v = exact_risk(f, h, px)
        if v is not None:
            return RiskReport.exact(v)
        if mode is Mode.EXACT:
            raise ExactModeUnavailable("no closed-form risk for these regions")
    pts = px.sample(seed, mc_samples)
    return RiskReport.from_samples(loss_terms(f, h, pts), seed)


def bayes_risk(h, px: DataMeasure, mode=None, mc_samples=DEFAULT_RISK_SAMPLES, seed=0):
    return risk(hard(h), h, px, mode, mc_samples, seed)


def excess_risk(h, px: DataMeasure, cfg: SmoothingConfig, mc_samples=DEFAULT_RISK_SAMPLES, seed=None):
    """Delta_{alpha,beta}(h) = R(Smooth_beta(psi(h * p_alpha))) - R(psi(h)).

    Exact when both risks have closed forms, unless ``cfg.mode`` asks for sampling;
    otherwise both classifiers are scored on the same sample of X and the interval
    comes from the paired differences.
    """
    seed = cfg.seed if seed is None else seed
    f = two_stage(h, cfg)
    base = hard(h)
    if cfg.mode is not Mode.MC:
        r_f, r_b = exact_risk(f, h, px), exact_risk(base, h, px)
        if r_f is not None and r_b is not None:
            return RiskReport.exact(r_f - r_b)
    if cfg.mode is Mode.EXACT:
        raise ExactModeUnavailable("no closed-form excess risk; use mode='mc'")
    pts = px.sample(seed, mc_samples)
    diff = loss_terms(f, h, pts) - loss_terms(base, h, pts)
    return RiskReport.from_samples(diff, seed)


def closed_form_excess(c: BallUnionConditional, px: DataMeasure, alpha_model, beta_model):
    """2 tau (p_X(I) - p_X(I_{alpha,beta})) from the shrinkage radii."""
    rep = shrinkage(c, alpha_model, beta_model)
    p_i = region_mass(px, [Ball(cc, r) for cc, r in zip(c.centers, c.radii)])
    keep = ~rep.vanished
    p_ab = region_mass(px, [Ball(cc, r) for cc, r in zip(c.centers[keep], rep.final_radii[keep])])
    return c.level * p_i - 2 * c.tau * p_ab - (0.5 - c.tau) * p_i


def empirical_delta(pipeline: HardClassifier, points, labels):
    """Fraction of labelled points the classifier gets wrong."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("empty test set")
    pred = pipeline(np.asarray(points, dtype=float).reshape(len(labels), -1))
    return float(np.mean(np.asarray(pred) != labels))


def sample_labeled(h, px: DataMeasure, n, seed):
    """Draw (X, Y) with X ~ p_X and Y | X ~ Bernoulli(h(X))."""
    rng = np.random.default_rng(seed)
    pts = px.sample(rng, n)
    hv = np.asarray(h(pts[:, 0] if getattr(h, "dim", 1) == 1 else pts), dtype=float)
    return pts, (rng.random(n) < hv).astype(int)
