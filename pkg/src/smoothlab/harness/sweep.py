"""Excess-risk differences over an (alpha, beta) grid for random ball configurations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..classifiers import hard
from ..measures import DataMeasure
from ..risk import exact_risk, loss_terms
from ..smoothing import Mode, SmoothingConfig, two_stage
from ..stats import mix_seed, normal_ci
from .parallel import run_jobs
from .scenario import Scenario, ScenarioKind
from .spheres import sample_sphere_config

CELL_COLUMNS = ["zeta", "alpha", "beta", "delta", "delta_se", "diff", "diff_se", "diff_ci_low", "diff_ci_high",
                "n_configs", "seed", "mode", "mc_samples"]
FLAG_COLUMNS = ["zeta", "beta", "flag", "min_diff", "min_diff_ci_high", "argmin_alpha", "n_configs", "seed",
                "mode", "mc_samples"]
# Exact differences count as negative only below this.
EXACT_NEGATIVE = -1e-12


@dataclass
class SweepResult:
    cells: dict = field(default_factory=dict)   # (zeta, alpha, beta) -> row
    flags: dict = field(default_factory=dict)   # (zeta, beta) -> row
    failures: list = field(default_factory=list)

    def cell_rows(self):
        return [self.cells[k] for k in sorted(self.cells)]

    def flag_rows(self):
        return [self.flags[k] for k in sorted(self.flags)]

    def flag(self, zeta, beta):
        return self.flags[(zeta, beta)]["flag"]


def _config(sc: Scenario, zi, k):
    zeta = float(sc.zeta_list[zi])
    return sample_sphere_config(sc.box, zeta, sc.radius, sc.attempts, mix_seed(sc.seed, 1, zi, k), sc.tau)


def sweep_job(args):
    """Delta_{alpha,beta} for every alpha at one (zeta, config, beta), paired on one sample of X.

    Returns, per alpha, (delta, se, diff, diff_se, exact).
    """
    sc, zi, k, bi = args
    beta = float(sc.beta_grid[bi])
    h = _config(sc, zi, k)
    lo, hi = sc.box
    px = DataMeasure.uniform_box(lo, hi)
    mode = None if sc.mode is None else Mode(sc.mode)
    base = hard(h)
    classifiers = []
    for ai, alpha in enumerate(sc.alpha_grid):
        cfg = SmoothingConfig(float(alpha), beta, sc.family, mode or Mode.MC, sc.vote_samples,
                              mix_seed(sc.seed, 3, zi, k, ai, bi))
        classifiers.append(two_stage(h, cfg))

    if mode is not Mode.MC:
        r0 = exact_risk(base, h, px)
        exact = [exact_risk(f, h, px) for f in classifiers]
        if r0 is not None and all(v is not None for v in exact):
            deltas = [v - r0 for v in exact]
            return [(d, 0.0, d - deltas[0], 0.0, True) for d in deltas]
    pts = px.sample(mix_seed(sc.seed, 2, zi, k), sc.mc_samples)
    l_base = loss_terms(base, h, pts)
    losses = [loss_terms(f, h, pts) - l_base for f in classifiers]
    out = []
    n = len(pts)
    for d in losses:
        diff = d - losses[0]
        out.append((float(d.mean()), float(d.std(ddof=1) / np.sqrt(n)),
                    float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(n)), False))
    return out


def _aggregate(sc: Scenario, per_config):
    """Average over configurations; standard errors add in quadrature."""
    k = len(per_config)
    arr = np.array([[c[:4] for c in cfg] for cfg in per_config], dtype=float)  # (k, n_alpha, 4)
    exact = all(c[4] for cfg in per_config for c in cfg)
    mean = arr.mean(axis=0)
    se = np.sqrt(np.sum(arr[:, :, [1, 3]] ** 2, axis=0)) / k
    return mean[:, 0], se[:, 0], mean[:, 2], se[:, 1], exact


def run_sweep(sc: Scenario, jobs=1) -> SweepResult:
    """Evaluate the whole grid; results do not depend on ``jobs`` or on evaluation order."""
    if sc.kind is not ScenarioKind.SPHERE_SWEEP:
        raise ValueError("run_sweep needs a sphere_sweep scenario")
    tasks = [(sc, zi, k, bi) for zi in range(len(sc.zeta_list)) for bi in range(len(sc.beta_grid))
             for k in range(sc.n_configs)]
    done = {}
    result = SweepResult()
    for (_, zi, k, bi), out in run_jobs(sweep_job, tasks, jobs):
        if isinstance(out, Exception):
            result.failures.append({"zeta": sc.zeta_list[zi], "beta": sc.beta_grid[bi], "config": k,
                                    "error": f"{type(out).__name__}: {out}"})
        else:
            done[(zi, bi, k)] = out

    for zi, zeta in enumerate(sc.zeta_list):
        for bi, beta in enumerate(sc.beta_grid):
            per_config = [done.get((zi, bi, k)) for k in range(sc.n_configs)]
            if any(p is None for p in per_config):
                continue
            delta, delta_se, diff, diff_se, exact = _aggregate(sc, per_config)
            mode = Mode.EXACT if exact else Mode.MC
            n = 0 if exact else sc.mc_samples
            best = None
            for ai, alpha in enumerate(sc.alpha_grid):
                lo, hi = normal_ci(diff[ai], diff_se[ai])
                row = {"zeta": float(zeta), "alpha": float(alpha), "beta": float(beta),
                       "delta": float(delta[ai]), "delta_se": float(delta_se[ai]),
                       "diff": float(diff[ai]), "diff_se": float(diff_se[ai]),
                       "diff_ci_low": float(lo), "diff_ci_high": float(hi),
                       "n_configs": sc.n_configs, "seed": sc.seed, "mode": mode, "mc_samples": n}
                result.cells[(float(zeta), float(alpha), float(beta))] = row
                if alpha > 0 and (best is None or hi < best[1]):
                    best = (float(diff[ai]), float(hi), float(alpha))
            if best is None:
                flag, best = "solid", (0.0, 0.0, float("nan"))
            else:
                negative = best[1] < (EXACT_NEGATIVE if exact else 0.0)
                flag = "dashed" if negative else "solid"
            result.flags[(float(zeta), float(beta))] = {
                "zeta": float(zeta), "beta": float(beta), "flag": flag, "min_diff": best[0],
                "min_diff_ci_high": best[1], "argmin_alpha": best[2], "n_configs": sc.n_configs,
                "seed": sc.seed, "mode": mode, "mc_samples": n}
    return result
