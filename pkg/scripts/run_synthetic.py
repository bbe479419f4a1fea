#!/usr/bin/env python3
"""Scaling experiment on synthetic variant pairs.

Runs the full analysis for several log sizes and behavioural shifts, printing a
table of phase timings, rule counts and the linear fit of runtime against size.

    python scripts/run_synthetic.py --sizes 10000 50000 100000 150000 --shift 0.0 0.5
"""

import argparse
import resource
import sys

import numpy as np

from declare_variants.analyzer import AnalysisParams, analyze
from declare_variants.synthetic import SyntheticConfig, generate_variants


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[10_000, 50_000, 100_000])
    p.add_argument("--shift", type=float, nargs="+", default=[0.5])
    p.add_argument("--activities", type=int, default=11)
    p.add_argument("--distinct", type=int, default=200)
    p.add_argument("--permutations", type=int, default=1000)
    p.add_argument("--support-min", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    header = f"{'traces':>8} {'shift':>5} {'rules':>6} {'tested':>6} {'signif':>6} {'perm s':>7} {'total s':>7}"
    print(header)
    for shift in args.shift:
        totals = []
        for n in args.sizes:
            cfg = SyntheticConfig(
                traces_a=n // 2,
                traces_b=n - n // 2,
                activities=args.activities,
                distinct=args.distinct,
                shift=shift,
                seed=args.seed,
            )
            log_a, log_b = generate_variants(cfg)
            result = analyze(
                log_a,
                log_b,
                params=AnalysisParams(permutations=args.permutations, seed=args.seed),
                support_min=args.support_min,
            )
            total = sum(result.timings.values())
            totals.append(total)
            print(
                f"{n:>8} {shift:>5.2f} {len(result.union):>6} {len(result.tested):>6} "
                f"{len(result.significant):>6} {result.timings['permutation test']:>7.2f} {total:>7.2f}"
            )
        if len(args.sizes) >= 2:
            slope, intercept = np.polyfit(args.sizes, totals, 1)
            fitted = np.polyval([slope, intercept], args.sizes)
            worst = np.max(np.abs(fitted - totals) / np.asarray(totals))
            print(f"  linear fit: {slope * 1e5:.2f}s per 100k traces + {intercept:.2f}s, max residual {worst:.1%}")
    print(f"peak RSS {resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024:.0f} MB")
    return 0


if __name__ == "__main__":
    sys.exit(main())
