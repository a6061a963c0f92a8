"""Command-line entry points: run, sweep, oracle, trace."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import placement
from .config import ExperimentConfig, load_config
from .errors import ParseError, UavMecError, ValidationError
from .experiment import SWEEPABLE, format_rows, run_cell, sweep, write_results
from .orchestrator import SCHEMES, run_scheme
from .oracles import joint_bruteforce
from .scenario import generate_scenario, repositioned_scenario


def _load(args) -> ExperimentConfig:
    if args.config:
        return load_config(args.config)
    return ExperimentConfig()


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="output path (default stdout)")


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    config = _load(args)
    rows = [run_cell(config, args.seed, scheme)
            for scheme in ([args.scheme] if args.scheme else SCHEMES)]
    text = format_rows(rows)
    _emit(text, args.out)
    return 1 if any(r.error for r in rows) else 0


def cmd_sweep(args) -> int:
    config = _load(args)
    values = [float(v) for v in args.values.split(",")]
    schemes = [args.scheme] if args.scheme else SCHEMES
    rows = sweep(config, args.param, values, schemes=schemes)
    if args.out:
        write_results(rows, args.out)
    else:
        sys.stdout.write(format_rows(rows))
    return 1 if any(r.error for r in rows) else 0


def cmd_oracle(args) -> int:
    config = _load(args)
    scenario = generate_scenario(config, args.seed)
    report = run_scheme(scenario, "proposed", tol=config.tol, r_max=config.r_max)
    reference = joint_bruteforce(
        scenario, extra_points=report.q_m.array[None, :])
    gap = report.objective_s - reference
    rel = gap / reference if reference > 0 else 0.0
    sys.stdout.write(
        f"solver_objective_s = {report.objective_s!r}\n"
        f"oracle_objective_s = {reference!r}\n"
        f"relative_gap = {rel!r}\n")
    return 0


def cmd_trace(args) -> int:
    config = _load(args)
    scenario = generate_scenario(config, args.seed)
    scheme = args.scheme or "proposed"
    report = run_scheme(scenario, scheme, tol=config.tol, r_max=config.r_max)
    lines = ["iteration,objective_s"]
    for i, value in enumerate(report.objective_trace):
        lines.append(f"{i},{value!r}")
    # Inner placement trace at the final decision, from the default start.
    placed = (scenario if scheme == "static_suavs"
              else repositioned_scenario(scenario, report.alpha))
    from .scenario import Association, feasible_association_mask
    assoc = Association(alpha=report.alpha,
                        feasible_mask=feasible_association_mask(scenario))
    _, sca_trace, _ = placement.sca_loop(placed, assoc, report.beta)
    lines.append("sca_iteration,surrogate_objective_s")
    for i, value in enumerate(sca_trace):
        lines.append(f"{i},{value!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uav-mec",
        description="Min-max latency planning for a multi-UAV maritime "
                    "surveillance edge-computing system.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one seeded scenario")
    _add_common(p_run)
    p_run.add_argument("--scheme", choices=SCHEMES)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="parameter sweep over seeds and schemes")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=SWEEPABLE)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated numeric values")
    p_sweep.add_argument("--scheme", choices=SCHEMES)
    p_sweep.set_defaults(func=cmd_sweep)

    p_oracle = sub.add_parser(
        "oracle", help="compare the solver against the small-instance brute force")
    _add_common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_trace = sub.add_parser("trace", help="emit outer and SCA iterate traces")
    _add_common(p_trace)
    p_trace.add_argument("--scheme", choices=SCHEMES)
    p_trace.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except UavMecError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
