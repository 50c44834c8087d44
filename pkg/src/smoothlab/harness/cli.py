"""Command-line entry point: ``smoothlab run | verify-1d | sample-spheres``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from .construction import verify_1d_construction
from .plots import plot_sweep
from .results import write_csv, write_json
from .scenario import ConfigError, Scenario, ScenarioKind
from .spheres import config_to_json, sample_sphere_config
from .sweep import CELL_COLUMNS, FLAG_COLUMNS, run_sweep
from .validation import run_bound_validation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3
EXIT_PARTIAL = 4


def _manifest(sc, files, failures, status, elapsed, **extra):
    return {"scenario": sc.to_dict(), "status": status, "files": files, "failures": failures,
            "elapsed_seconds": round(elapsed, 3), **extra}


def _run_sweep(sc, out, jobs):
    res = run_sweep(sc, jobs)
    files = {
        "csv": write_csv(out / sc.output_name("csv", "sweep.csv"), res.cell_rows(), CELL_COLUMNS).name,
        "flags": write_csv(out / sc.output_name("flags", "flags.csv"), res.flag_rows(), FLAG_COLUMNS).name,
    }
    if res.cells:
        files["svg"] = plot_sweep(out / sc.output_name("svg", "sweep.svg"), res.cells,
                                  {k: v["flag"] for k, v in res.flags.items()}, sc.zeta_list, sc.beta_grid).name
    for row in res.flag_rows():
        print(f"zeta={row['zeta']:g} beta={row['beta']:g} {row['flag']}")
    return files, res.failures, EXIT_PARTIAL if res.failures else EXIT_OK, {}


def _run_validation(sc, out, jobs):
    res = run_bound_validation(sc, jobs)
    files = {"csv": write_csv(out / sc.output_name("csv", "validation.csv"), res.rows, res.columns).name}
    print(f"{len(res.rows)} scenarios, {res.violations} violations, {len(res.failures)} failures")
    if res.failures:
        code = EXIT_PARTIAL
    else:
        code = EXIT_VIOLATION if res.violations else EXIT_OK
    return files, res.failures, code, {"violations": res.violations}


def _run_construction(sc, out, jobs):
    verdict = verify_1d_construction(sc.omega, sc.alpha, sc.beta, sc.widened_gap)
    rows = [dataclasses.asdict(c) for c in verdict.checks]
    files = {"csv": write_csv(out / sc.output_name("csv", "construction.csv"), rows,
                              ["name", "passed", "detail"]).name}
    print("\n".join(verdict.lines()))
    extra = {"risk_unaugmented": verdict.risk_unaugmented, "risk_augmented": verdict.risk_augmented,
             "passed": verdict.passed}
    return files, [], EXIT_OK, extra


RUNNERS = {
    ScenarioKind.SPHERE_SWEEP: _run_sweep,
    ScenarioKind.BOUND_VALIDATION: _run_validation,
    ScenarioKind.INEXACT_LEARNING: _run_validation,
    ScenarioKind.ONE_DIM_CONSTRUCTION: _run_construction,
}


def cmd_run(args):
    try:
        sc = Scenario.load(args.config)
        overrides = {k: v for k, v in (("seed", args.seed), ("mode", args.mode), ("mc_samples", args.mc_samples))
                     if v is not None}
        if overrides:
            sc = Scenario.from_dict({**sc.to_dict(), **overrides})
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        files, failures, code, extra = RUNNERS[sc.kind](sc, out, args.jobs)
    except Exception as exc:  # noqa: BLE001 - recorded, then reported through the exit code
        write_json(out / sc.output_name("manifest", "manifest.json"),
                   _manifest(sc, {}, [{"error": f"{type(exc).__name__}: {exc}"}], "failed",
                             time.perf_counter() - start))
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    status = {EXIT_OK: "ok", EXIT_VIOLATION: "violation", EXIT_PARTIAL: "partial"}[code]
    write_json(out / sc.output_name("manifest", "manifest.json"),
               _manifest(sc, files, failures, status, time.perf_counter() - start, **extra))
    return code


def cmd_verify_1d(args):
    if not 0 < args.omega <= 0.25:
        print("omega must lie in (0, 0.25]", file=sys.stderr)
        return EXIT_CONFIG
    verdict = verify_1d_construction(args.omega, args.alpha, args.beta, args.widened_gap)
    print("\n".join(verdict.lines()))
    return EXIT_OK


def cmd_sample_spheres(args):
    try:
        c = sample_sphere_config(((args.lo,) * args.dim, (args.hi,) * args.dim), args.zeta, args.radius,
                                 args.attempts, args.seed, args.tau)
    except ValueError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = config_to_json(c, zeta=args.zeta, seed=args.seed)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{c.n_balls} balls written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="smoothlab", description="Smoothed-classifier risk experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--mode", choices=["exact", "mc"])
    r.add_argument("--mc-samples", type=int, dest="mc_samples")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify-1d", help="check the one-dimensional construction")
    v.add_argument("--omega", type=float, default=0.23)
    v.add_argument("--alpha", type=float, default=0.1)
    v.add_argument("--beta", type=float, default=0.93)
    v.add_argument("--widened-gap", type=float, dest="widened_gap")
    v.set_defaults(func=cmd_verify_1d)

    s = sub.add_parser("sample-spheres", help="sample a random ball configuration")
    s.add_argument("--zeta", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--radius", type=float, default=10.0)
    s.add_argument("--attempts", type=int, default=500)
    s.add_argument("--tau", type=float, default=0.1)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--lo", type=float, default=0.0)
    s.add_argument("--hi", type=float, default=100.0)
    s.set_defaults(func=cmd_sample_spheres)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("--jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
