"""Large-scale checks of the excess-risk bounds against Monte-Carlo estimates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import distance

from ..bounds import best_upper_bound, general_g_bound, inexact_risk_bounds, smoothed_perturbed
from ..classifiers import BallUnionConditional, PerturbedClassifier, hard, soft_convolve
from ..measures import DataMeasure
from ..noise import Family
from ..risk import closed_form_excess, excess_risk, loss_terms
from ..smoothing import Mode, SmoothingConfig
from ..stats import mix_seed
from .parallel import run_jobs
from .scenario import Scenario, ScenarioKind
from .spheres import sample_sphere_config

ZETA_CHOICES = (0.0, 2.0, 5.0, 10.0, 20.0, 30.0)
TAU_CHOICES = (0.05, 0.1, 0.2, 0.3, 0.4)
SIGMA_MAIN = 4.0
SIGMA_SANDWICH = 3.0
# Slack for exact (zero-variance) comparisons.
EXACT_SLACK = 1e-9

BOUND_COLUMNS = ["scenario", "dim", "n_balls", "zeta", "family", "alpha", "beta", "tau", "delta", "delta_se",
                 "bound", "margin", "violation", "seed", "mode", "mc_samples"]
INEXACT_COLUMNS = ["scenario", "dim", "n_balls", "zeta", "alpha", "beta", "tau", "eta", "delta", "delta_se",
                   "lower", "upper", "cases", "g_bound", "g_bound_se", "sandwich_violation", "g_violation",
                   "violation", "seed", "mode", "mc_samples"]


@dataclass
class ValidationResult:
    kind: ScenarioKind
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def violations(self):
        return sum(bool(r["violation"]) for r in self.rows)

    @property
    def columns(self):
        return INEXACT_COLUMNS if self.kind is ScenarioKind.INEXACT_LEARNING else BOUND_COLUMNS


def largest_negative_balls(c: BallUnionConditional, lo, hi, grid=101):
    """Empty balls inside the box, one per connected component of the zero region.

    In 1D every gap between intervals (and each end of the box) is its own component; in
    higher dimensions the complement of disjoint balls is connected, so a single ball is
    found by a grid search over centres.
    """
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    if c.dim == 1:
        iv = sorted((cc - r, cc + r) for cc, r in zip(c.centers[:, 0], c.radii))
        edges = [lo[0]] + [e for pair in iv for e in pair] + [hi[0]]
        out = []
        for a, b in zip(edges[::2], edges[1::2]):
            a, b = max(a, lo[0]), min(b, hi[0])
            if b - a > 1e-9:
                out.append((np.array([(a + b) / 2]), (b - a) / 2 * (1 - 1e-9)))
        return out
    axes = [np.linspace(l, h, grid) for l, h in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, c.dim)
    room = np.min(distance.cdist(pts, c.centers) - c.radii[None, :], axis=1)
    room = np.minimum(room, np.min(np.minimum(pts - lo, hi - pts), axis=1))
    k = int(np.argmax(room))
    if room[k] <= 0:
        return []
    return [(pts[k], float(room[k]) * (1 - 1e-9))]


def _domain(sc: Scenario, dim):
    lo, hi = sc.box
    if dim == len(lo):
        return lo, hi
    return np.full(dim, lo[0]), np.full(dim, hi[0])


def _random_setting(sc: Scenario, k, tag):
    rng = np.random.default_rng(mix_seed(sc.seed, tag, k))
    dim = 1 + k % 2
    zeta = float(rng.choice(ZETA_CHOICES))
    tau = float(rng.choice(TAU_CHOICES))
    return rng, dim, zeta, tau


def bound_case(args):
    """One random scenario of the main upper-bound check."""
    sc, k = args
    rng, dim, zeta, tau = _random_setting(sc, k, 4)
    family = Family(rng.choice([f.value for f in Family]))
    alpha = float(rng.choice(sc.alpha_grid))
    beta = float(rng.choice(sc.beta_grid))
    lo, hi = _domain(sc, dim)
    h = sample_sphere_config((lo, hi), zeta, sc.radius, sc.attempts, mix_seed(sc.seed, 5, k), tau)
    px = DataMeasure.uniform_box(lo, hi)
    seed = mix_seed(sc.seed, 6, k)
    cfg = SmoothingConfig(alpha, beta, family, Mode.MC, sc.vote_samples, seed)
    delta = excess_risk(h, px, cfg, sc.mc_samples, seed)
    rep = best_upper_bound(h, px, cfg.alpha_model(dim), cfg.beta_model(dim),
                           negatives=largest_negative_balls(h, lo, hi))
    margin = rep.bound_value - delta.value
    gaps = h.pairwise_gaps() if h.n_balls > 1 else np.array([np.inf])
    return {
        "scenario": k, "dim": dim, "n_balls": h.n_balls, "zeta": float(np.min(gaps)), "family": family,
        "alpha": alpha, "beta": beta, "tau": tau, "delta": delta.value, "delta_se": delta.se,
        "bound": rep.bound_value, "margin": margin,
        "violation": bool(margin < -SIGMA_MAIN * delta.se - EXACT_SLACK),
        "seed": seed, "mode": delta.mode, "mc_samples": delta.n,
    }


def inexact_case(args):
    """One eta-perturbed classifier in the well-separated uniform-noise regime."""
    sc, k = args
    rng, dim, _, tau = _random_setting(sc, k, 7)
    positive = [v for v in sc.alpha_grid if v > 0] or [1.0]
    alpha = float(rng.choice(positive))
    beta = float(rng.choice([v for v in sc.beta_grid if v > 0] or [1.0]))
    eta = float(sc.eta_list[k % len(sc.eta_list)])
    zeta = 2 * max(alpha, beta) + float(rng.uniform(0.5, 10.0))
    lo, hi = _domain(sc, dim)
    h = sample_sphere_config((lo, hi), zeta, sc.radius, sc.attempts, mix_seed(sc.seed, 8, k), tau)
    px = DataMeasure.uniform_box(lo, hi)
    seed = mix_seed(sc.seed, 9, k)
    cfg = SmoothingConfig(alpha, beta, Family.UNIFORM, Mode.MC, sc.vote_samples, seed)
    a_model, b_model = cfg.alpha_model(dim), cfg.beta_model(dim)
    conv = soft_convolve(h, a_model)
    g = PerturbedClassifier(conv, eta, mix_seed(sc.seed, 10, k), (lo, hi), dim)
    f = smoothed_perturbed(h, g, eta, cfg)
    pts = px.sample(seed, sc.mc_samples)
    diff = loss_terms(f, h, pts) - loss_terms(hard(h), h, pts)
    delta, se = float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(len(diff)))
    sandwich = inexact_risk_bounds(h, px, a_model, b_model, eta)
    delta_h = closed_form_excess(h, px, a_model, b_model)
    gb = general_g_bound(h, g, px, a_model, delta_h, sc.mc_samples, mix_seed(sc.seed, 11, k))
    bad_sandwich = not (sandwich.lower - SIGMA_SANDWICH * se - EXACT_SLACK <= delta
                        <= sandwich.upper + SIGMA_SANDWICH * se + EXACT_SLACK)
    bad_g = delta > gb.value + SIGMA_SANDWICH * np.hypot(se, gb.se) + EXACT_SLACK
    return {
        "scenario": k, "dim": dim, "n_balls": h.n_balls,
        "zeta": float(np.min(h.pairwise_gaps())) if h.n_balls > 1 else float("inf"),
        "alpha": alpha, "beta": beta, "tau": tau, "eta": eta, "delta": delta, "delta_se": se,
        "lower": sandwich.lower, "upper": sandwich.upper, "cases": "".join(sandwich.case),
        "g_bound": gb.value, "g_bound_se": gb.se, "sandwich_violation": bad_sandwich, "g_violation": bool(bad_g),
        "violation": bool(bad_sandwich or bad_g), "seed": seed, "mode": Mode.MC, "mc_samples": len(diff),
    }


def run_bound_validation(sc: Scenario, jobs=1) -> ValidationResult:
    """Evaluate ``sc.n_scenarios`` random scenarios; rows come back in scenario order."""
    if sc.kind not in (ScenarioKind.BOUND_VALIDATION, ScenarioKind.INEXACT_LEARNING):
        raise ValueError("run_bound_validation needs a bound_validation or inexact_learning scenario")
    fn = inexact_case if sc.kind is ScenarioKind.INEXACT_LEARNING else bound_case
    result = ValidationResult(sc.kind)
    for (_, k), out in run_jobs(fn, [(sc, k) for k in range(sc.n_scenarios)], jobs):
        if isinstance(out, Exception):
            result.failures.append({"scenario": k, "error": f"{type(out).__name__}: {out}"})
        else:
            result.rows.append(out)
    return result
