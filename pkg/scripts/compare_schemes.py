#!/usr/bin/env python3
"""Run all four schemes on the reference scenarios and print a summary table.

For each seed, solves the proposed three-block scheme and the three baselines
(no offloading, offload up to the cap, no repositioning) and reports the
min-max latency objective, the per-S-UAV latency spread, and iteration counts.

Usage:
    python3 scripts/compare_schemes.py [--seeds 0-19] [--config cfg.txt]
"""

import argparse
import statistics
import sys
from dataclasses import replace

from uav_mec.config import ExperimentConfig, load_config
from uav_mec.orchestrator import SCHEMES, run_scheme
from uav_mec.scenario import generate_scenario


def parse_seeds(text):
    if "-" in text:
        lo, hi = text.split("-")
        return range(int(lo), int(hi) + 1)
    return [int(s) for s in text.split(",")]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", default="0-19")
    parser.add_argument("--config", default=None)
    args = parser.parse_args(argv)

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    seeds = list(parse_seeds(args.seeds))

    objectives = {scheme: [] for scheme in SCHEMES}
    print(f"{'seed':>4}  " + "  ".join(f"{s:>14}" for s in SCHEMES))
    for seed in seeds:
        scenario = generate_scenario(cfg, seed)
        row = []
        for scheme in SCHEMES:
            report = run_scheme(scenario, scheme)
            objectives[scheme].append(report.objective_s)
            row.append(f"{report.objective_s:14.4f}")
        print(f"{seed:>4}  " + "  ".join(row))

    print(f"{'mean':>4}  " + "  ".join(
        f"{statistics.mean(objectives[s]):14.4f}" for s in SCHEMES))
    if len(seeds) > 1:
        print(f"{'std':>4}  " + "  ".join(
            f"{statistics.stdev(objectives[s]):14.4f}" for s in SCHEMES))
    return 0


if __name__ == "__main__":
    sys.exit(main())
