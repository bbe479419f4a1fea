#!/usr/bin/env python3
"""Carve two variant logs out of one XES file by a numeric case attribute.

Examples:
    # hospital log split on patient age
    python scripts/split_variants.py "Sepsis Cases - Event Log.xes.gz" --attribute Age \
        --a ">=70" --b "<=35" --out-dir variants/
    # traffic-fine log split on the fine amount
    python scripts/split_variants.py Road_Traffic_Fine_Management_Process.xes.gz \
        --attribute amount --a "<50" --b ">=50" --out-dir variants/

Each variant is written as ``variant_a.csv`` / ``variant_b.csv`` (case, activity)
and its statistics are printed, ready for ``declare-variants --log-a ... --log-b ...``.
"""

import argparse
import operator
import re
import sys
from pathlib import Path

from declare_variants.log_io import parse_xes, stats, write_csv

OPS = {">=": operator.ge, "<=": operator.le, ">": operator.gt, "<": operator.lt, "==": operator.eq}


def predicate(attribute: str, condition: str):
    m = re.fullmatch(r"\s*(>=|<=|==|>|<)\s*(-?[\d.]+)\s*", condition)
    if not m:
        raise argparse.ArgumentTypeError(f"bad condition {condition!r}; use e.g. '>=70' or '<50'")
    op, bound = OPS[m.group(1)], float(m.group(2))

    def keep(attrs):
        value = attrs.get(attribute)
        return isinstance(value, (int, float)) and not isinstance(value, bool) and op(value, bound)

    return keep


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("xes", type=Path)
    p.add_argument("--attribute", required=True, help="case or event attribute to split on")
    p.add_argument("--a", required=True, help="condition for variant A, e.g. '>=70'")
    p.add_argument("--b", required=True, help="condition for variant B, e.g. '<=35'")
    p.add_argument("--out-dir", type=Path, default=Path("."))
    args = p.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for tag, cond in (("a", args.a), ("b", args.b)):
        log = parse_xes(args.xes, predicate(args.attribute, cond))
        target = args.out_dir / f"variant_{tag}.csv"
        write_csv(log, target)
        s = stats(log)
        print(
            f"{target}: {args.attribute} {cond.strip()}: {s.total_traces} traces "
            f"({s.distinct_traces} distinct), {s.total_events} events, {s.distinct_events} activities, "
            f"length {s.min_length}/{s.avg_length:.1f}/{s.max_length}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
