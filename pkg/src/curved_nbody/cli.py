"""Command-line front end.

Subcommands::

    curved-nbody simulate SCENARIO.json [--out DIR] [integrator flags]
    curved-nbody solve EQUATION TARGET [--range LO HI] [--grid N]
    curved-nbody verify THEOREM [--seed S]
    curved-nbody scan EQUATION --targets T1 T2 ... | --target-range LO HI N
    curved-nbody batch SCENARIO.json ... [--out DIR] [--workers K]

Exit codes: 0 success, 1 failed check, 2 invalid input, 3 singularity event.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from curved_nbody import theorems
from curved_nbody.diagnostics import conservation_report
from curved_nbody.equilibria import EQUATION_IDS, solve_roots
from curved_nbody.errors import CurvedNBodyError, DomainError
from curved_nbody.integrate import SINGULARITY_EVENT, integrate
from curved_nbody.scenario import (
    Scenario,
    ScenarioError,
    atomic_write,
    diagnostics_csv,
    dumps,
    fmt,
    trajectory_csv,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_SINGULARITY = 3


def _integrator_overrides(args):
    return {"rel_tol": args.rel_tol, "abs_tol": args.abs_tol, "initial_dt": args.dt0,
            "singularity_event_threshold": args.event_threshold}


def run_scenario(scenario: Scenario, out_dir, overrides=None, samples=None):
    """Integrate a scenario and write its three output files.

    Returns ``(exit_code, summary_dict)``.
    """
    state = scenario.state()
    config = scenario.config(**(overrides or {}))
    n_samples = samples if samples is not None else scenario.output.get("samples")
    sample_times = None
    if n_samples:
        n_samples = int(n_samples)
        if n_samples < 1:
            raise ScenarioError("samples must be positive")
        sample_times = state.time + np.linspace(0.0, scenario.t_end, n_samples + 1)[1:]
    traj, stop = integrate(state, state.time + scenario.t_end, config,
                           sample_times=sample_times)
    report = conservation_report(traj)
    speeds = [float(np.max(np.linalg.norm(s.state.velocities, axis=1))) for s in traj]
    summary = {
        "name": scenario.name,
        "kappa": scenario.kappa,
        "n_bodies": state.n,
        "stop": stop.classification if stop.kind == SINGULARITY_EVENT else stop.kind,
        "stop_reason": {"kind": stop.kind, "time": stop.time,
                        "classification": stop.classification,
                        "pairs": [list(p) for p in stop.pairs], "message": stop.message},
        "final_time": traj[-1].time,
        "n_samples": len(traj),
        "energy_drift": report["energy_drift"],
        "angular_momentum_drift": report["angular_momentum_drift"],
        "constraint_residual": report["constraint_residual"],
        "min_pair_gap": report["min_pair_gap"],
        "I_drift": report["I_drift"],
        "max_speed": max(speeds),
    }
    if "J_drift" in report:
        summary["J_drift"] = report["J_drift"]
    if out_dir is not None:
        base = os.path.join(out_dir, scenario.name)
        if scenario.output.get("trajectory", True):
            atomic_write(base + "_trajectory.csv", trajectory_csv(traj))
        if scenario.output.get("diagnostics", True):
            atomic_write(base + "_diagnostics.csv", diagnostics_csv(traj))
        atomic_write(base + "_summary.json", dumps(summary) + "\n")
    code = EXIT_SINGULARITY if stop.kind == SINGULARITY_EVENT else EXIT_OK
    return code, summary


def cmd_simulate(args) -> int:
    try:
        scenario = Scenario.load(args.scenario)
        code, summary = run_scenario(scenario, args.out, _integrator_overrides(args),
                                     args.samples)
    except (ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(dumps(summary))
    return code


def _roots_json(scan):
    return {"equation": scan.equation, "target": scan.target, "count": len(scan.roots),
            "roots": [{"value": r.value, "residual": r.residual, "tangency": r.tangency}
                      for r in scan.roots]}


def cmd_solve(args) -> int:
    try:
        scan = solve_roots(args.equation, args.target, args.range, args.grid)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(_roots_json(scan)) + "\n"
    if args.out:
        atomic_write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.targets:
        targets = [float(t) for t in args.targets]
    elif args.target_range:
        lo, hi, num = args.target_range
        targets = list(np.linspace(float(lo), float(hi), int(num)))
    else:
        print("error: give --targets or --target-range", file=sys.stderr)
        return EXIT_INVALID
    rows = ["target,count,tangencies,roots"]
    try:
        for t in targets:
            scan = solve_roots(args.equation, t, args.range, args.grid)
            rows.append(",".join([fmt(t), str(len(scan.roots)),
                                  str(sum(r.tangency for r in scan.roots)),
                                  " ".join(fmt(r.value) for r in scan.roots)]))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = "\n".join(rows) + "\n"
    if args.out:
        atomic_write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        result = theorems.run(args.theorem, seed=args.seed)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(result.report())
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def cmd_batch(args) -> int:
    overrides = _integrator_overrides(args)

    def one(path):
        try:
            scenario = Scenario.load(path)
            code, summary = run_scenario(scenario, args.out, overrides, args.samples)
            return {"scenario": path, "exit_code": code, "stop": summary["stop"]}
        except (ScenarioError, CurvedNBodyError, ValueError) as exc:
            return {"scenario": path, "exit_code": EXIT_INVALID, "error": str(exc)}

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(one, args.scenarios))
    text = dumps({"results": results}) + "\n"
    if args.out:
        atomic_write(os.path.join(args.out, "batch_summary.json"), text)
    sys.stdout.write(text)
    codes = {r["exit_code"] for r in results}
    for code in (EXIT_INVALID, EXIT_SINGULARITY):
        if code in codes:
            return code
    return EXIT_OK


def _add_integrator_flags(p):
    p.add_argument("--rel-tol", type=float, default=None, help="relative error tolerance")
    p.add_argument("--abs-tol", type=float, default=None, help="absolute error tolerance")
    p.add_argument("--dt0", type=float, default=None, help="initial step size")
    p.add_argument("--event-threshold", type=float, default=None,
                   help="stop when a pair gap drops below this value")
    p.add_argument("--samples", type=int, default=None,
                   help="record this many evenly spaced samples (default: every step)")
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curved-nbody",
        description="n-body problem with the cotangent potential on the sphere and hyperboloid")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a scenario file")
    p.add_argument("scenario")
    _add_integrator_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("solve", help="roots of an omega^2 relation")
    p.add_argument("equation", help="one of: " + ", ".join(EQUATION_IDS))
    p.add_argument("target", type=float, help="target value of omega^2/m")
    p.add_argument("--range", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=4001)
    p.add_argument("--out", default=None, help="also write the JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scan", help="root counts over a grid of targets")
    p.add_argument("equation")
    p.add_argument("--targets", nargs="+", default=None)
    p.add_argument("--target-range", nargs=3, default=None, metavar=("LO", "HI", "N"))
    p.add_argument("--range", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    p.add_argument("--grid", type=int, default=4001)
    p.add_argument("--out", default=None, help="also write the CSV here")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run a bundled theorem check")
    p.add_argument("theorem", help="one of: " + ", ".join(theorems.THEOREM_IDS))
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("batch", help="simulate several scenarios in worker threads")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--workers", type=int, default=1)
    _add_integrator_flags(p)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
