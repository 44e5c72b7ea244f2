#!/usr/bin/env python3
"""Warehouse synthesis experiment.

Synthesizes the magnet, row and signal-light components repeatedly from
their full truth tables, validates every program exhaustively and prints
per-component mean synthesis times with the sample standard deviation.
"""

import argparse
import sys

from plcsynth.bench import SCENARIO_NAMES, bench_run, scenario
from plcsynth.engine import SynthConfig


def fmt(seconds: float) -> str:
    return f"{seconds * 1000:8.2f} ms" if seconds < 1.0 else f"{seconds:8.3f} s "


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", choices=list(SCENARIO_NAMES) + ["all"],
                        default="all")
    parser.add_argument("--repeat", type=int, default=10,
                        help="synthesis runs per component (default 10)")
    parser.add_argument("--light-repeat", type=int, default=None,
                        help="override the repeat count for signal-light "
                             "(it is far slower than the rest)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    names = list(SCENARIO_NAMES) if args.scenario == "all" else [args.scenario]
    print(f"{'component':<16} {'repeats':>7} {'mean':>12} {'stddev':>12}")
    for name in names:
        repeats = args.repeat
        if name == "signal-light" and args.light_repeat is not None:
            repeats = args.light_repeat
        report = bench_run(scenario(name), repeats, SynthConfig(seed=args.seed))
        print(f"{name:<16} {repeats:>7} {fmt(report.stats.mean):>12} "
              f"{fmt(report.stats.stddev):>12}")
        for comp, comp_stats in sorted(report.per_component.items()):
            if len(report.per_component) > 1:
                print(f"  {comp:<14} {repeats:>7} {fmt(comp_stats.mean):>12} "
                      f"{fmt(comp_stats.stddev):>12}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
