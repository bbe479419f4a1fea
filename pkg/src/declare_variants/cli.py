"""Command-line entry point: two variant logs in, ranked significant differences out.

Usage:
    declare-variants --log-a old.xes --log-b young.xes --out-dir results/
    declare-variants --log-a a.csv --log-b b.csv --model-a ma.json --model-b mb.json --seed 42
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .analyzer import AnalysisParams, analyze
from .declare import MeasureKind
from .discovery import read_specification, write_specification
from .errors import DegenerateAnalysisError, LogFormatError, SpecificationError
from .log_io import CsvMapping, read_log
from .report import statements_from, write_outputs

EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    log_a: Path
    log_b: Path
    out_dir: Path
    model_a: Path | None = None
    model_b: Path | None = None
    measure: MeasureKind = MeasureKind.CONFIDENCE
    m_min: float = 0.0
    m_diff_min: float = 0.01
    permutations: int = 1000
    alpha: float = 0.01
    top_n: int = 10
    support_min: float = 0.5
    confidence_min: float = 0.0
    seed: int | None = None
    workers: int | None = None
    csv_mapping: CsvMapping = CsvMapping()
    export_models: Path | None = None

    def params(self) -> AnalysisParams:
        return AnalysisParams(
            measure=self.measure,
            m_min=self.m_min,
            m_diff_min=self.m_diff_min,
            permutations=self.permutations,
            alpha=self.alpha,
            seed=self.seed,
            workers=self.workers,
        )

    def validate(self) -> None:
        self.params()
        for name in ("support_min", "confidence_min"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} out of range: must lie in [0, 1]")
        if self.top_n < 0:
            raise ValueError(f"top_n={self.top_n} must be >= 0")
        if (self.model_a is None) != (self.model_b is None):
            raise ValueError("--model-a and --model-b must be given together")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="declare-variants",
        description="Find Declare rules whose measure differs significantly between two process variants.",
    )
    p.add_argument("--log-a", type=Path, required=True, help="variant A log (.xes, .xes.gz or .csv)")
    p.add_argument("--log-b", type=Path, required=True, help="variant B log (.xes, .xes.gz or .csv)")
    p.add_argument("--model-a", type=Path, help="JSON specification for A (skips discovery)")
    p.add_argument("--model-b", type=Path, help="JSON specification for B (skips discovery)")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="where the text and CSV reports go")
    p.add_argument("--measure", choices=[k.value for k in MeasureKind], default="confidence")
    p.add_argument("--m-min", type=float, default=0.0, help="minimum measure in at least one variant")
    p.add_argument("--m-diff-min", type=float, default=0.01, help="minimum measure difference")
    p.add_argument("--permutations", type=int, default=1000, help="permutation test iterations")
    p.add_argument("--alpha", type=float, default=0.01, help="significance level")
    p.add_argument("--top-n", type=int, default=10, help="sentences in the text report")
    p.add_argument("--support-min", type=float, default=0.5, help="discovery Support threshold")
    p.add_argument("--confidence-min", type=float, default=0.0, help="discovery Confidence threshold")
    p.add_argument("--seed", type=int, help="RNG seed (random if omitted; always printed)")
    p.add_argument("--workers", type=int, help="permutation worker threads (default: all cores)")
    p.add_argument("--case-column", default="case", help="CSV case id column")
    p.add_argument("--activity-column", default="activity", help="CSV activity column")
    p.add_argument("--order-column", help="CSV ordering column (default: timestamp, else row order)")
    p.add_argument("--export-models", type=Path, help="write the discovered specifications as JSON here")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        log_a=args.log_a,
        log_b=args.log_b,
        out_dir=args.out_dir,
        model_a=args.model_a,
        model_b=args.model_b,
        measure=MeasureKind(args.measure),
        m_min=args.m_min,
        m_diff_min=args.m_diff_min,
        permutations=args.permutations,
        alpha=args.alpha,
        top_n=args.top_n,
        support_min=args.support_min,
        confidence_min=args.confidence_min,
        seed=args.seed,
        workers=args.workers,
        csv_mapping=CsvMapping(args.case_column, args.activity_column, args.order_column),
        export_models=args.export_models,
    )


def run(config: RunConfig, out=None) -> int:
    def say(msg: str) -> None:
        print(msg, file=out or sys.stdout)

    try:
        config.validate()
    except ValueError as exc:
        say(f"error: invalid configuration: {exc}")
        return EXIT_CONFIG

    seed = config.seed if config.seed is not None else int(np.random.SeedSequence().entropy)
    params = AnalysisParams(**{**config.params().__dict__, "seed": seed})
    total_start = time.perf_counter()

    start = time.perf_counter()
    try:
        log_a = read_log(config.log_a, config.csv_mapping)
        log_b = read_log(config.log_b, config.csv_mapping)
        spec_a = read_specification(config.model_a) if config.model_a else None
        spec_b = read_specification(config.model_b) if config.model_b else None
    except (LogFormatError, SpecificationError, OSError) as exc:
        say(f"error: {exc}")
        return EXIT_INPUT
    parse_time = time.perf_counter() - start

    try:
        result = analyze(log_a, log_b, spec_a, spec_b, params, config.support_min, config.confidence_min)
    except DegenerateAnalysisError as exc:
        say(f"error: degenerate analysis: {exc}")
        return EXIT_DEGENERATE

    start = time.perf_counter()
    statements = statements_from(result)
    try:
        write_outputs(statements, config.out_dir, config.top_n)
        if config.export_models and spec_a is None:
            config.export_models.mkdir(parents=True, exist_ok=True)
            write_specification(result.spec_a, config.export_models / "model_a.json")
            write_specification(result.spec_b, config.export_models / "model_b.json")
    except OSError as exc:
        say(f"error: {exc}")
        return EXIT_INPUT
    report_time = time.perf_counter() - start
    total = time.perf_counter() - total_start

    source = "loaded" if spec_a is not None else "discovered"
    say(f"seed: {seed}")
    say(f"rules {source}: A={len(result.spec_a)} B={len(result.spec_b)} union={len(result.union)}")
    say(
        f"pruned: {result.removed_by_difference} by minimum difference, "
        f"{result.removed_by_interest} by minimum interestingness, "
        f"{result.removed_by_redundancy} by redundancy"
    )
    say(f"tested: {len(result.tested)}  significant: {len(result.significant)} (alpha={params.alpha})")
    phases = {"parsing": parse_time, **result.timings, "reporting": report_time}
    say("time: " + ", ".join(f"{k} {v:.2f}s" for k, v in phases.items()) + f", total {total:.2f}s")
    say(f"reports: {config.out_dir}")
    if not result.tested:
        say("error: degenerate analysis: no rule left to test after pruning")
        return EXIT_DEGENERATE
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
