"""Statistical comparison of two log variants through Declare rules.

The pipeline: measure the union of both specifications on both logs, drop
rules by difference/interest thresholds and by redundancy, cache per-trace
rule evaluations, then run a permutation test on the cached evaluations.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .declare import (
    MeasureKind,
    Rule,
    Trace,
    UNARY_TEMPLATES,
    components,
    evaluate_directional,
    generalizations,
    positions,
    ratio,
)
from .discovery import Specification, discover
from .errors import DegenerateAnalysisError
from .log_io import EventLog

log = logging.getLogger(__name__)

# iterations drawn from one RNG stream; fixed so results do not depend on the worker count
CHUNK_ITERATIONS = 250
# upper bound on permutation-matrix entries held at once per worker
_BATCH_ENTRIES = 1 << 21


@dataclass(frozen=True)
class AnalysisParams:
    measure: MeasureKind = MeasureKind.CONFIDENCE
    m_min: float = 0.0
    m_diff_min: float = 0.01
    permutations: int = 1000
    alpha: float = 0.01
    seed: int | None = None
    workers: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.measure, MeasureKind):
            object.__setattr__(self, "measure", MeasureKind(self.measure))
        for name in ("m_min", "m_diff_min"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} out of range: must lie in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha={self.alpha} out of range: must lie in (0, 1)")
        if self.permutations < 1:
            raise ValueError(f"permutations={self.permutations} out of range: must be >= 1")
        if self.seed is not None and self.seed < 0:
            raise ValueError(f"seed={self.seed} must be a non-negative integer")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers={self.workers} must be >= 1")


class Measurement(NamedTuple):
    e_a: float
    e_b: float
    e_diff: float


MeasurementTable = dict[Rule, Measurement]


def _ordered(rules: Iterable[Rule]) -> list[Rule]:
    return sorted(set(rules), key=Rule.sort_key)


# ---------------------------------------------------------------------------
# encoding


class _Rows:
    """Per distinct trace, per directional component: activations and satisfactions."""

    def __init__(self, parts: Sequence[Rule], traces: Sequence[Trace]):
        self.parts = tuple(parts)
        self.traces = tuple(traces)
        acts = np.zeros((len(self.traces), len(self.parts)), dtype=np.int64)
        sats = np.zeros_like(acts)
        for i, trace in enumerate(self.traces):
            index = positions(trace)
            for k, part in enumerate(self.parts):
                acts[i, k], sats[i, k] = evaluate_directional(part, trace, index)
        self.activations = acts
        self.satisfactions = sats
        self.lengths = np.fromiter((len(t) for t in self.traces), dtype=np.int64, count=len(self.traces))

    @classmethod
    def stack(cls, first: "_Rows", second: "_Rows") -> "_Rows":
        assert first.parts == second.parts
        rows = cls.__new__(cls)
        rows.parts = first.parts
        rows.traces = first.traces + second.traces
        rows.activations = np.vstack([first.activations, second.activations])
        rows.satisfactions = np.vstack([first.satisfactions, second.satisfactions])
        rows.lengths = np.concatenate([first.lengths, second.lengths])
        return rows

    def fractions(self, kind: MeasureKind) -> tuple[np.ndarray, np.ndarray]:
        """Float numerator and denominator contributions per row and component."""
        num = self.satisfactions.astype(np.float64)
        if kind is MeasureKind.CONFIDENCE:
            den = self.activations.astype(np.float64)
        else:
            unary = np.array([p.template in UNARY_TEMPLATES for p in self.parts])
            den = np.where(unary[None, :], 1.0, self.lengths[:, None].astype(np.float64))
        return num, den


def _part_layout(rules: Sequence[Rule]) -> tuple[list[Rule], np.ndarray]:
    parts: dict[Rule, int] = {}
    layout = np.zeros((len(rules), 2), dtype=np.intp)
    for i, rule in enumerate(rules):
        idx = [parts.setdefault(p, len(parts)) for p in components(rule)]
        layout[i] = (idx[0], idx[-1])
    return list(parts), layout


@dataclass(frozen=True, eq=False)
class EncodedLog:
    """A log with every trace replaced by its cached rule evaluations.

    ``counts[i]`` is the multiplicity of row ``i`` of the (possibly shared)
    evaluation table; rows with count 0 are simply absent from this log.
    """

    rules: tuple[Rule, ...]
    layout: np.ndarray
    rows: _Rows
    counts: np.ndarray

    def __len__(self) -> int:
        return int(self.counts.sum())

    def sums(self) -> tuple[np.ndarray, np.ndarray]:
        """Pooled (activations, satisfactions) per directional component."""
        return self.counts @ self.rows.activations, self.counts @ self.rows.satisfactions

    def trace_evaluation(self, row: int, rule_index: int) -> tuple[int, int]:
        a = s = 0
        for k in set(self.layout[rule_index]):
            a += int(self.rows.activations[row, k])
            s += int(self.rows.satisfactions[row, k])
        return a, s

    def measures(self, kind: MeasureKind = MeasureKind.CONFIDENCE) -> np.ndarray:
        return _rule_measures(self.counts[None, :], self.rows, self.layout, kind)[0]


def _measure_matrix(num: np.ndarray, den: np.ndarray, layout: np.ndarray) -> np.ndarray:
    values = np.divide(num, den, out=np.zeros_like(num), where=den != 0)
    return np.minimum(values[:, layout[:, 0]], values[:, layout[:, 1]])


def _rule_measures(counts: np.ndarray, rows: _Rows, layout: np.ndarray, kind: MeasureKind) -> np.ndarray:
    num, den = rows.fractions(kind)
    c = counts.astype(np.float64)
    return _measure_matrix(c @ num, c @ den, layout)


def encode_logs(log_a: EventLog, log_b: EventLog, rules: Iterable[Rule]) -> tuple[EncodedLog, EncodedLog]:
    """Evaluate every rule on every distinct trace of both logs, once."""
    ordered = tuple(_ordered(rules))
    parts, layout = _part_layout(ordered)
    encoded = []
    for lg in (log_a, log_b):
        rows = _Rows(parts, list(lg.traces))
        counts = np.fromiter(lg.traces.values(), dtype=np.int64, count=len(lg.traces))
        encoded.append(EncodedLog(ordered, layout, rows, counts))
    return encoded[0], encoded[1]


# ---------------------------------------------------------------------------
# pre-processing


def measure_rules(rules: Iterable[Rule], lg: EventLog, kind: MeasureKind) -> dict[Rule, float]:
    """Measure many rules on one log with exact integer sums."""
    ordered = _ordered(rules)
    parts, layout = _part_layout(ordered)
    rows = _Rows(parts, list(lg.traces))
    counts = np.fromiter(lg.traces.values(), dtype=np.int64, count=len(lg.traces))
    sats = counts @ rows.satisfactions
    if kind is MeasureKind.CONFIDENCE:
        dens = counts @ rows.activations
    else:
        n_traces, n_events = int(counts.sum()), int(counts @ rows.lengths)
        dens = np.array([n_traces if p.template in UNARY_TEMPLATES else n_events for p in parts], dtype=np.int64)
    values = [ratio(int(s), int(d)) for s, d in zip(sats, dens)]
    return {r: min(values[layout[i, 0]], values[layout[i, 1]]) for i, r in enumerate(ordered)}


def aggregate(
    spec_a: Specification | Iterable[Rule],
    spec_b: Specification | Iterable[Rule],
    log_a: EventLog,
    log_b: EventLog,
    measure: MeasureKind = MeasureKind.CONFIDENCE,
) -> tuple[list[Rule], MeasurementTable]:
    """Union of both specifications, each rule measured on both logs."""
    if log_a.alphabet and log_b.alphabet and not (log_a.alphabet & log_b.alphabet):
        log.warning("the two logs share no activity; every difference will be trivial")
    union = _ordered(itertools.chain(spec_a, spec_b))
    in_a = measure_rules(union, log_a, measure)
    in_b = measure_rules(union, log_b, measure)
    table = {r: Measurement(in_a[r], in_b[r], abs(in_a[r] - in_b[r])) for r in union}
    return union, table


def prune_thresholds(
    rules: Iterable[Rule], table: Mapping[Rule, Measurement], m_min: float, m_diff_min: float
) -> tuple[list[Rule], MeasurementTable]:
    """Drop rules whose difference is below ``m_diff_min`` or whose measure is below ``m_min`` in both logs."""
    kept = [
        r
        for r in _ordered(rules)
        if table[r].e_diff >= m_diff_min and (table[r].e_a >= m_min or table[r].e_b >= m_min)
    ]
    return kept, {r: table[r] for r in kept}


def hierarchical_simplification(
    rules: Iterable[Rule], table: Mapping[Rule, Measurement]
) -> tuple[list[Rule], MeasurementTable]:
    """Remove a rule when a more general rule of the set has the same measure in either log."""
    ordered = _ordered(rules)
    present = set(ordered)
    kept = []
    for r in ordered:
        mr = table[r]
        redundant = any(
            g in present and (table[g].e_a == mr.e_a or table[g].e_b == mr.e_b) for g in generalizations(r)
        )
        if not redundant:
            kept.append(r)
    return kept, {r: table[r] for r in kept}


# ---------------------------------------------------------------------------
# permutation test


@dataclass(frozen=True, eq=False)
class PermutationOutcome:
    rules: tuple[Rule, ...]
    exceedances: np.ndarray
    permutations: int
    seed: int

    @property
    def counters(self) -> np.ndarray:
        # counters start at 1, so a never-exceeded rule gets p = 1 / permutations
        return self.exceedances + 1

    @property
    def p_values(self) -> np.ndarray:
        return self.counters / self.permutations

    def p_value(self, rule: Rule) -> float:
        return float(self.p_values[self.rules.index(rule)])

    def as_dict(self) -> dict[Rule, tuple[int, float]]:
        return {r: (int(c), float(p)) for r, c, p in zip(self.rules, self.exceedances, self.p_values)}


class _Pool(NamedTuple):
    rows: _Rows
    layout: np.ndarray
    types: np.ndarray  # pooled row index of every labelled trace
    n_a: int
    total: np.ndarray  # pooled count per row


def _pool(enc_a: EncodedLog, enc_b: EncodedLog) -> _Pool:
    if enc_a.rules != enc_b.rules:
        raise ValueError("encoded logs were built for different rule sets")
    if enc_a.rows is enc_b.rows:
        rows, counts_a, counts_b = enc_a.rows, enc_a.counts, enc_b.counts
    else:
        rows = _Rows.stack(enc_a.rows, enc_b.rows)
        counts_a = np.concatenate([enc_a.counts, np.zeros(len(enc_b.counts), dtype=np.int64)])
        counts_b = np.concatenate([np.zeros(len(enc_a.counts), dtype=np.int64), enc_b.counts])
    # labelled traces: A's first, then B's
    types = np.concatenate(
        [np.repeat(np.arange(len(counts_a)), counts_a), np.repeat(np.arange(len(counts_b)), counts_b)]
    )
    return _Pool(rows, enc_a.layout, types, int(counts_a.sum()), counts_a + counts_b)


def _split_counts(pool: _Pool, perms: np.ndarray) -> np.ndarray:
    """Row counts on the A side for each permutation (a prefix split of size |A|)."""
    n_rows = len(pool.total)
    batch = perms.shape[0]
    picked = pool.types[perms[:, : pool.n_a]] + (np.arange(batch) * n_rows)[:, None]
    return np.bincount(picked.ravel(), minlength=batch * n_rows).reshape(batch, n_rows)


def shuffle_once(enc_a: EncodedLog, enc_b: EncodedLog, rng: np.random.Generator) -> tuple[EncodedLog, EncodedLog]:
    """Randomly re-partition the pooled traces into logs of the original sizes.

    A uniform permutation (Fisher-Yates) of the pooled traces is split after
    the first ``|enc_a|`` positions.  Evaluations are moved, never recomputed.
    """
    pool = _pool(enc_a, enc_b)
    perm = rng.permutation(len(pool.types))[None, :]
    counts_a = _split_counts(pool, perm)[0]
    return (
        EncodedLog(enc_a.rules, pool.layout, pool.rows, counts_a),
        EncodedLog(enc_a.rules, pool.layout, pool.rows, pool.total - counts_a),
    )


def _chunk_exceedances(
    pool: _Pool, e_diff: np.ndarray, kind: MeasureKind, seed: int, chunk: int, iterations: int
) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
    num, den = pool.rows.fractions(kind)
    tot = pool.total.astype(np.float64)
    tot_num, tot_den = tot @ num, tot @ den
    n = len(pool.types)
    batch = max(1, min(iterations, _BATCH_ENTRIES // max(n, 1)))
    base = np.broadcast_to(np.arange(n), (batch, n))
    hits = np.zeros(len(e_diff), dtype=np.int64)
    done = 0
    while done < iterations:
        b = min(batch, iterations - done)
        perms = rng.permuted(base[:b], axis=1)
        counts_a = _split_counts(pool, perms).astype(np.float64)
        num_a, den_a = counts_a @ num, counts_a @ den
        m_a = _measure_matrix(num_a, den_a, pool.layout)
        m_b = _measure_matrix(tot_num - num_a, tot_den - den_a, pool.layout)
        hits += (np.abs(m_a - m_b) >= e_diff).sum(axis=0)
        done += b
    return hits


def permutation_test(
    enc_a: EncodedLog,
    enc_b: EncodedLog,
    table: Mapping[Rule, Measurement],
    params: AnalysisParams = AnalysisParams(),
) -> PermutationOutcome:
    """Count, per rule, the shuffles whose measure difference reaches the observed one.

    Each block of ``CHUNK_ITERATIONS`` shuffles has its own RNG stream derived
    from ``(seed, block index)``; blocks run on a thread pool and their integer
    counters are summed, so the outcome is identical for any worker count.
    """
    seed = params.seed if params.seed is not None else int(np.random.SeedSequence().entropy)
    rules = enc_a.rules
    if not rules:
        return PermutationOutcome(rules, np.zeros(0, dtype=np.int64), params.permutations, seed)
    pool = _pool(enc_a, enc_b)
    e_diff = np.array([table[r].e_diff for r in rules])
    n_chunks = math.ceil(params.permutations / CHUNK_ITERATIONS)
    sizes = [min(CHUNK_ITERATIONS, params.permutations - c * CHUNK_ITERATIONS) for c in range(n_chunks)]

    def work(c: int) -> np.ndarray:
        return _chunk_exceedances(pool, e_diff, params.measure, seed, c, sizes[c])

    workers = params.workers or os.cpu_count() or 1
    if workers == 1 or n_chunks == 1:
        parts = [work(c) for c in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, n_chunks)) as ex:
            parts = list(ex.map(work, range(n_chunks)))
    return PermutationOutcome(rules, np.sum(parts, axis=0), params.permutations, seed)


def exact_pvalue_oracle(
    enc_a: EncodedLog,
    enc_b: EncodedLog,
    rule: Rule,
    e_diff: float,
    kind: MeasureKind = MeasureKind.CONFIDENCE,
    max_pool: int = 15,
) -> float:
    """Exact share of all splits of the pooled traces whose measure difference is >= ``e_diff``.

    Every labelled trace is distinct, so identical traces are counted once per
    copy.  Plain Python arithmetic, no sampling.
    """
    pooled: list[tuple[list[int], list[int]]] = []
    i = enc_a.rules.index(rule)
    for enc in (enc_a, enc_b):
        parts = sorted(set(int(k) for k in enc.layout[i]))
        for row, count in enumerate(enc.counts):
            acts = [int(enc.rows.activations[row, k]) for k in parts]
            sats = [int(enc.rows.satisfactions[row, k]) for k in parts]
            if kind is MeasureKind.CONFIDENCE:
                dens = acts
            else:
                dens = [1 if enc.rows.parts[k].template in UNARY_TEMPLATES else int(enc.rows.lengths[row]) for k in parts]
            pooled.extend([(sats, dens)] * int(count))
    n, n_a = len(pooled), len(enc_a)
    if n > max_pool:
        raise ValueError(f"pool of {n} traces exceeds the enumeration limit of {max_pool}")

    def side(members: Iterable[int]) -> float:
        width = len(pooled[0][0])
        num, den = [0] * width, [0] * width
        for j in members:
            sats, dens = pooled[j]
            for k in range(width):
                num[k] += sats[k]
                den[k] += dens[k]
        return min(ratio(x, y) for x, y in zip(num, den))

    everyone = set(range(n))
    hits = total = 0
    for chosen in itertools.combinations(range(n), n_a):
        total += 1
        if abs(side(chosen) - side(everyone.difference(chosen))) >= e_diff:
            hits += 1
    return hits / total


# ---------------------------------------------------------------------------
# end to end


@dataclass
class AnalysisResult:
    spec_a: Specification
    spec_b: Specification
    union: list[Rule]
    removed_by_difference: int
    removed_by_interest: int
    removed_by_redundancy: int
    tested: list[Rule]
    table: MeasurementTable
    outcome: PermutationOutcome
    significant: list[Rule]
    params: AnalysisParams
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.outcome.seed


def analyze(
    log_a: EventLog,
    log_b: EventLog,
    spec_a: Specification | None = None,
    spec_b: Specification | None = None,
    params: AnalysisParams = AnalysisParams(),
    support_min: float = 0.5,
    confidence_min: float = 0.0,
) -> AnalysisResult:
    """Rules whose measure differs significantly between the two logs (p-value <= alpha)."""
    if len(log_a) == 0 or len(log_b) == 0:
        raise DegenerateAnalysisError("both variant logs must contain at least one trace")
    timings: dict[str, float] = {}

    start = time.perf_counter()
    if spec_a is None:
        spec_a = discover(log_a, support_min, confidence_min)
    if spec_b is None:
        spec_b = discover(log_b, support_min, confidence_min)
    timings["discovery"] = time.perf_counter() - start

    start = time.perf_counter()
    union, table = aggregate(spec_a, spec_b, log_a, log_b, params.measure)
    by_diff, _ = prune_thresholds(union, table, 0.0, params.m_diff_min)
    by_both, table_t = prune_thresholds(by_diff, table, params.m_min, params.m_diff_min)
    tested, tested_table = hierarchical_simplification(by_both, table_t)
    timings["pre-processing"] = time.perf_counter() - start

    start = time.perf_counter()
    enc_a, enc_b = encode_logs(log_a, log_b, tested)
    timings["encoding"] = time.perf_counter() - start

    if not tested:
        log.warning("no rule left to test after pruning")
    start = time.perf_counter()
    outcome = permutation_test(enc_a, enc_b, tested_table, params)
    timings["permutation test"] = time.perf_counter() - start

    significant = [r for r, p in zip(outcome.rules, outcome.p_values) if p <= params.alpha]
    return AnalysisResult(
        spec_a=spec_a,
        spec_b=spec_b,
        union=union,
        removed_by_difference=len(union) - len(by_diff),
        removed_by_interest=len(by_diff) - len(by_both),
        removed_by_redundancy=len(by_both) - len(tested),
        tested=tested,
        table=tested_table,
        outcome=outcome,
        significant=significant,
        params=params,
        timings=timings,
    )
