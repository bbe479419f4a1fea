"""Statistically significant differences between two process variants, as Declare rules."""

from .analyzer import (
    AnalysisParams,
    AnalysisResult,
    EncodedLog,
    Measurement,
    PermutationOutcome,
    aggregate,
    analyze,
    encode_logs,
    exact_pvalue_oracle,
    hierarchical_simplification,
    permutation_test,
    prune_thresholds,
    shuffle_once,
)
from .declare import (
    MeasureKind,
    Rule,
    Template,
    TraceEvaluation,
    entails,
    evaluate_trace,
    log_confidence,
    log_support,
)
from .discovery import Specification, candidate_rules, discover, read_specification, write_specification
from .log_io import CsvMapping, EventLog, LogStats, parse_csv, parse_xes, read_log, stats, write_csv
from .report import DifferenceStatement, rank, render_nl, write_outputs
from .synthetic import SyntheticConfig, generate_variants

__version__ = "0.1.0"
