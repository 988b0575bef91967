#!/usr/bin/env python3
"""Run the Fighter/Cargo experiment for both classifiers and print latency tables.

Writes CLI-style result directories (summary.csv, latency.csv, meta.txt,
plot.gp) under OUT/c1 and OUT/c2.

    python scripts/reproduce_experiment.py --runs 1000 --seed 0 --out results
"""
import argparse
import math
import os
import sys

from evtrack.cli import main as cli_main
from evtrack.fusion import Rule
from evtrack.simulation import default_scenario, run_monte_carlo, switch_latency
from evtrack.tracker import classifier_c1, classifier_c2


def table(summary, scenario):
    stats = switch_latency(summary, scenario)
    labels = scenario.frame.labels
    print(f"{'switch':>6} {'scan':>4} {'to':>8} {'len':>4} | {'Dempster':>16} | {'PCR5':>16}")
    for n, sw in enumerate(scenario.switches()):
        cells = []
        for rule in (Rule.DEMPSTER, Rule.PCR5):
            s = stats[rule][n]
            mean = "   -" if math.isnan(s.mean) else f"{s.mean:4.1f}"
            cells.append(f"{mean} ({s.censor_rate:5.1%} cens)")
        print(f"{n + 1:>6} {sw.scan:>4} {labels[sw.new]:>8} {sw.length:>4} | {cells[0]:>16} | {cells[1]:>16}")


def run(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = p.parse_args(argv)

    scenario = default_scenario()
    for name, factory in (("c1", classifier_c1), ("c2", classifier_c2)):
        summary = run_monte_carlo(scenario, factory(scenario.frame), n_runs=args.runs,
                                  master_seed=args.seed, workers=args.workers)
        print(f"\nclassifier {name}, {args.runs} runs: mean latency in scans (uncensored runs)")
        table(summary, scenario)
        code = cli_main(["--classifier", name, "--runs", str(args.runs), "--seed", str(args.seed),
                         "--threads", str(args.workers), "--out", os.path.join(args.out, name)])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
