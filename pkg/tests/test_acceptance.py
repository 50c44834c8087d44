"""End-to-end acceptance runs, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (shown even without ``-s``)
and asserts the same condition, runtime limit included.
"""

import json
import time

import numpy as np
import pytest
from scipy import stats

import checks
from smoothlab.harness import cli
from smoothlab.harness.construction import verify_1d_construction
from smoothlab.harness.scenario import Scenario
from smoothlab.harness.spheres import sample_sphere_config
from smoothlab.harness.sweep import run_sweep
from smoothlab.harness.validation import run_bound_validation
from smoothlab.measures import DataMeasure
from smoothlab.noise import Family
from smoothlab.risk import closed_form_excess, excess_risk
from smoothlab.smoothing import SmoothingConfig, certified_radius


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s]")
    return emit


def test_criterion_1_augmentation_ordering(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    px = DataMeasure.uniform_box([0, 0], [100, 100])
    ordering_bad, worst_gap = 0, 0.0
    for k in range(20):
        zeta = float(rng.choice([10.0, 20.0, 30.0]))
        h = sample_sphere_config(zeta=zeta, seed=100 + k)
        top = min(zeta, 5.0)
        alpha, beta = (float(v) for v in rng.uniform(0.05 * top, top, size=2))
        cfg = SmoothingConfig(alpha, beta, "uniform", mode="exact")
        a, b = cfg.alpha_model(2), cfg.beta_model(2)
        with_aug = closed_form_excess(h, px, a, b)
        without = closed_form_excess(h, px, None, b)
        ordering_bad += not with_aug > without
        worst_gap = max(worst_gap, abs(excess_risk(h, px, cfg).value - with_aug))
    elapsed = time.perf_counter() - start
    ok = ordering_bad == 0 and worst_gap < 1e-9 and elapsed < 60
    report(1, ok, f"ordering violations={ordering_bad}, max |exact - closed form|={worst_gap:.2e}", elapsed)
    assert ok


def test_criterion_2_main_bound_holds(report):
    start = time.perf_counter()
    res = run_bound_validation(Scenario.from_dict({"kind": "bound_validation", "mc_samples": 20_000}))
    elapsed = time.perf_counter() - start
    all_mc = all(str(getattr(r["mode"], "value", r["mode"])) == "mc" for r in res.rows)
    ok = len(res.rows) == 50 and res.violations == 0 and not res.failures and all_mc and elapsed < 600
    min_margin = min(r["margin"] for r in res.rows)
    report(2, ok, f"scenarios={len(res.rows)}, violations={res.violations}, min margin={min_margin:.4f}", elapsed)
    assert ok


def test_criterion_3_one_dimensional_construction(report):
    start = time.perf_counter()
    v = verify_1d_construction(0.23, 0.1, 0.93)
    elapsed = time.perf_counter() - start
    explicit = v.checks[:5]  # the five explicit parameter constraints come first
    widened = [c for c in v.checks if c.name.startswith("widened")]
    ok = (v.passed and all(c.passed for c in explicit) and widened and all(c.passed for c in widened)
          and abs(v.risk_unaugmented - 0.92) < 1e-9 and abs(v.risk_augmented - 0.08) < 1e-9 and elapsed < 1)
    report(3, ok, f"risks {v.risk_unaugmented:.12f} vs {v.risk_augmented:.12f}, failed={v.failed}", elapsed)
    assert ok


def test_criterion_4_sweep_sign_pattern(report):
    start = time.perf_counter()
    sc = Scenario()
    res = run_sweep(sc)
    elapsed = time.perf_counter() - start
    largest = max(sc.zeta_list)
    upper_half = [b for b in sc.beta_grid if b >= np.median(sc.beta_grid)]
    solid = all(res.flag(largest, b) == "solid" for b in sc.beta_grid)
    dashed = [b for b in upper_half if res.flag(0.0, b) == "dashed"]
    ok = solid and bool(dashed) and not res.failures and elapsed < 900
    report(4, ok, f"zeta={largest:g} all solid={solid}, zeta=0 dashed at beta={dashed}", elapsed)
    assert ok


def test_criterion_5_cdf_machinery(report):
    start = time.perf_counter()
    mono = checks.check_monotonicity(1000)
    inv = checks.check_inverse_monotonicity(1000)
    sym = checks.check_symmetry(1000)
    rt_bad, rt_worst = checks.check_roundtrip(1000, tol=1e-8)
    mc_bad = {f.value: checks.check_exact_vs_mc(f, n_cases=100, sigmas=4.0) for f in Family}
    elapsed = time.perf_counter() - start
    ok = not (mono or inv or sym or rt_bad or any(mc_bad.values()))
    detail = (f"monotone={len(mono) + len(inv)} symmetric={len(sym)} roundtrip worst={rt_worst:.1e} "
              f"exact-vs-mc failures={ {k: len(v) for k, v in mc_bad.items()} }")
    report(5, ok, detail, elapsed)
    assert ok


def test_criterion_6_inexact_sandwich(report):
    start = time.perf_counter()
    res = run_bound_validation(Scenario.from_dict({"kind": "inexact_learning"}))
    elapsed = time.perf_counter() - start
    etas = sorted({r["eta"] for r in res.rows})
    ok = len(res.rows) == 50 and res.violations == 0 and not res.failures and elapsed < 600
    report(6, ok, f"scenarios={len(res.rows)}, violations={res.violations}, eta values={etas}", elapsed)
    assert ok


def test_criterion_7_certified_radius(report):
    start = time.perf_counter()
    at_half = [certified_radius(0.5, b).radius for b in (0.1, 1.0, 3.0)]
    s = np.random.default_rng(7).uniform(0.5, 0.999, size=100)
    err = max(abs(certified_radius(float(v), 1.0).radius - stats.norm.ppf(v)) for v in s)
    elapsed = time.perf_counter() - start
    ok = all(r == 0.0 for r in at_half) and err < 1e-8
    report(7, ok, f"radius at 0.5={at_half}, max quantile error={err:.1e}", elapsed)
    assert ok


DETERMINISM_SCENARIOS = {
    "sweep": {"kind": "sphere_sweep", "alpha_grid": [0.0, 1.0, 2.0], "beta_grid": [0.0, 3.0],
              "zeta_list": [0.0, 20.0], "n_configs": 2, "mc_samples": 4000, "vote_samples": 1024, "seed": 3},
    "validation": {"kind": "bound_validation", "n_scenarios": 8, "mc_samples": 4000, "seed": 3},
}


def test_criterion_8_determinism(tmp_path, report):
    start = time.perf_counter()
    mismatched = []
    for name, doc in DETERMINISM_SCENARIOS.items():
        cfg = tmp_path / f"{name}.json"
        cfg.write_text(json.dumps(doc))
        outs = []
        for run, jobs in (("a", 1), ("b", 8), ("c", 1)):
            out = tmp_path / f"{name}-{run}"
            assert cli.main(["run", "--config", str(cfg), "--out", str(out), "--jobs", str(jobs)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        if not (outs[0] == outs[1] == outs[2] and outs[0]):
            mismatched.append(name)
    elapsed = time.perf_counter() - start
    ok = not mismatched
    report(8, ok, f"scenarios compared={list(DETERMINISM_SCENARIOS)}, mismatched={mismatched}", elapsed)
    assert ok
