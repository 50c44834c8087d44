"""Upper bounds on the excess risk and sandwich bounds for inexactly learned classifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifiers import BallUnionConditional, ThresholdClassifier, soft_convolve
from .measures import Ball, DataMeasure, region_mass
from .engine1d import TIE_TOL
from .noise import NoiseModel, PartitionVanished
from .smoothing import SmoothedSetClassifier, SmoothingConfig, _outer_radii, noise_bank
from .stats import mean_ci

TAU_GRID = (0.0, 0.05, 0.1, 0.25, 0.45)
VALUE_TOL = 1e-12


@dataclass(frozen=True)
class Partition:
    """An inradius ball B(center, inradius) inside one partition of psi(h)."""

    center: np.ndarray
    inradius: float
    positive: bool


@dataclass(frozen=True)
class PartitionSummary:
    parts: tuple
    tau: float
    dim: int

    def __post_init__(self):
        if not 0 <= self.tau < 0.5:
            raise ValueError("tau must lie in [0, 0.5)")

    @classmethod
    def from_ball_union(cls, c: BallUnionConditional, tau=None, negatives=()):
        """Use each ball as its own inradius ball.

        Inside a ball |h - 0.5| equals ``c.tau``, so for a margin ``tau`` above that the
        confident part of the ball is empty. ``negatives`` are optional (center, radius)
        pairs for balls inside the zero region, at most one per connected component.
        """
        tau = c.tau if tau is None else tau
        keep = tau <= c.tau + VALUE_TOL
        parts = [Partition(np.asarray(cc, float), float(r) if keep else 0.0, True)
                 for cc, r in zip(c.centers, c.radii)]
        parts += [Partition(np.atleast_1d(np.asarray(cc, float)), float(r), False) for cc, r in negatives]
        return cls(tuple(parts), float(tau), c.dim)


@dataclass(frozen=True)
class BoundReport:
    bound_value: float
    r_alpha: np.ndarray
    r_alpha_beta: np.ndarray
    clipped: np.ndarray
    tau: float


def _root_sqnorm_inv(model: NoiseModel | None, level):
    """sqrt(Psi^{-1}(level)); zero without noise, infinite when the level is unreachable."""
    if model is None:
        return 0.0
    if level > 1 + VALUE_TOL:
        return math.inf
    return float(np.sqrt(model.sqnorm_cdf_inv(min(level, 1.0))))


def main_upper_bound(parts: PartitionSummary, px: DataMeasure, alpha_model, beta_model) -> BoundReport:
    """1 - sum_k p_X(B(x_k, (omega_k - r_{alpha,beta}^k)_+))."""
    tau = parts.tau
    r_beta = _root_sqnorm_inv(beta_model, 0.5)
    r_a = np.empty(len(parts.parts))
    for k, p in enumerate(parts.parts):
        level = 0.5 / (0.5 + tau) if p.positive else (0.5 / (0.5 - tau))
        r_a[k] = _root_sqnorm_inv(alpha_model, level)
    r_ab = r_a + r_beta
    shrunk = np.array([p.inradius for p in parts.parts]) - r_ab
    clipped = ~(shrunk > 0)
    balls = [Ball(p.center, s) for p, s, cl in zip(parts.parts, shrunk, clipped) if not cl]
    covered = region_mass(px, balls) if balls else 0.0
    return BoundReport(float(min(1.0, max(0.0, 1.0 - covered))), r_a, r_ab, clipped, tau)


def best_upper_bound(c: BallUnionConditional, px: DataMeasure, alpha_model, beta_model,
                     tau_grid=TAU_GRID, negatives=()) -> BoundReport:
    """Smallest bound over a grid of margins tau, using the balls as inradius balls."""
    reports = [main_upper_bound(PartitionSummary.from_ball_union(c, t, negatives), px, alpha_model, beta_model)
               for t in tau_grid]
    return min(reports, key=lambda r: r.bound_value)


# ---------------------------------------------------------------------------
# inexactly learned classifiers


@dataclass(frozen=True)
class EtaRadii:
    plus: np.ndarray
    minus: np.ndarray
    vanished_plus: np.ndarray
    vanished_minus: np.ndarray


def _inverse(model, r, level):
    if model is None:
        return r, False
    if level > 1:
        return 0.0, True
    try:
        return model.norm_inverse(r, level), False
    except PartitionVanished:
        return 0.0, True


def eta_shrinkage_radii(c: BallUnionConditional, alpha_model, eta) -> EtaRadii:
    """Radii of {h * p_alpha >= 0.5 + eta} and {h * p_alpha >= 0.5 - eta} around each ball."""
    if not 0 <= eta < 0.5:
        raise ValueError("eta must lie in [0, 0.5)")
    plus = [_inverse(alpha_model, r, (0.5 + eta) / c.level) for r in c.radii]
    minus = [_inverse(alpha_model, r, (0.5 - eta) / c.level) for r in c.radii]
    return EtaRadii(np.array([p[0] for p in plus]), np.array([m[0] for m in minus]),
                    np.array([p[1] for p in plus]), np.array([m[1] for m in minus]))


@dataclass(frozen=True)
class InexactBounds:
    lower: float
    upper: float
    case: np.ndarray  # per ball, "A" or "B"
    inner_radii: np.ndarray
    outer_radii: np.ndarray


def inexact_risk_bounds(c: BallUnionConditional, px: DataMeasure, alpha_model, beta_model, eta) -> InexactBounds:
    """Bounds on R(Smooth_beta(psi(g))) - R(psi(h)) for every g within eta of h * p_alpha."""
    radii = eta_shrinkage_radii(c, alpha_model, eta)
    stage2 = lambda r, gone: (0.0, True) if gone else _inverse(beta_model, r, 0.5)  # noqa: E731
    inner_pairs = [stage2(r, v) for r, v in zip(radii.plus, radii.vanished_plus)]
    outer_pairs = [stage2(r, v) for r, v in zip(radii.minus, radii.vanished_minus)]
    inner = np.array([p[0] for p in inner_pairs])
    inner_gone = np.array([p[1] for p in inner_pairs])
    outer = np.array([p[0] for p in outer_pairs])
    w, tau = c.level, c.tau
    lower = upper = 0.0
    cases = []
    for j, (cc, r) in enumerate(zip(c.centers, c.radii)):
        m = lambda rad: region_mass(px, Ball(cc, rad)) if rad > 0 else 0.0  # noqa: E731
        p_i = m(r)
        p_in = 0.0 if inner_gone[j] else m(min(inner[j], r))
        if outer[j] <= r:
            cases.append("A")
            lower += w * p_i - 2 * tau * m(outer[j]) - (0.5 - tau) * p_i
            upper += w * p_i - 2 * tau * p_in - (0.5 - tau) * p_i
        else:
            cases.append("B")
            lower += (0.5 - tau) * p_i - (0.5 - tau) * p_i
            upper += w * p_i - 2 * tau * p_in + (m(outer[j]) - p_i) - (0.5 - tau) * p_i
    return InexactBounds(float(lower), float(upper), np.array(cases), inner, outer)


def smoothed_perturbed(c: BallUnionConditional, g, eta, cfg: SmoothingConfig):
    """Smooth_beta(psi(g)) for a g within ``eta`` of h * p_alpha.

    The balls B(c_j, r^{+eta}) lie inside {g >= 0.5} and the union bound on
    {h * p_alpha >= 0.5 - eta} contains it, so most votes need no sampling.
    """
    dim = c.dim
    a_model, b_model = cfg.alpha_model(dim), cfg.beta_model(dim)

    def member(y):
        return np.asarray(g(y[:, 0] if dim == 1 else y), dtype=float) >= 0.5 - TIE_TOL

    if b_model is None:
        return ThresholdClassifier(g, dim)
    inner = outer = None
    if a_model is not None:
        radii = eta_shrinkage_radii(c, a_model, eta)
        keep = ~radii.vanished_plus
        inner = (c.centers[keep], radii.plus[keep])
        outer = (c.centers, _outer_radii(c, a_model, 0.5 - eta))
    return SmoothedSetClassifier(member, dim, b_model, noise_bank(b_model, cfg), inner=inner, outer=outer)


@dataclass(frozen=True)
class GBound:
    value: float
    disagreement: float
    se: float


def general_g_bound(h, g, px: DataMeasure, alpha_model, delta_h, mc_samples=20_000, seed=0) -> GBound:
    """delta_h plus the p_X-mass of {x : (h * p_alpha)(x) != g(x)} (values equal within 1e-12)."""
    conv = soft_convolve(h, alpha_model)
    pts = px.sample(seed, mc_samples)
    arg = pts[:, 0] if px.dim == 1 else pts
    differ = np.abs(np.asarray(conv(pts)) - np.asarray(g(arg))) > VALUE_TOL
    mass, se, _, _ = mean_ci(differ.astype(float))
    return GBound(float(delta_h + mass), mass, se)
