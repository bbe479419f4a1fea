"""Ranking significant rules and rendering them as sentences, text and CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .declare import Rule, Template

TEXT_FILENAME = "differences.txt"
CSV_FILENAME = "differences.csv"
CSV_COLUMNS = (
    "rank",
    "template",
    "activator",
    "target",
    "measure_A",
    "measure_B",
    "abs_diff",
    "exceedance_count",
    "p_value",
    "statement",
)

# {a} is the activator, {b} the target
PHRASES = {
    Template.PARTICIPATION: "{a} occurs in a process instance",
    Template.AT_MOST_ONE: "{a} may occur at most once in a process instance",
    Template.RESPONDED_EXISTENCE: "if {a} occurs, also {b} occurs",
    Template.RESPONSE: "if {a} occurs, {b} will occur afterwards",
    Template.ALTERNATE_RESPONSE: (
        "if {a} occurs, {b} will occur afterwards without any other occurrence of {a} in between"
    ),
    Template.CHAIN_RESPONSE: "if {a} occurs, {b} will occur immediately afterwards",
    Template.PRECEDENCE: "{b} occurs only if {a} has occurred before",
    Template.ALTERNATE_PRECEDENCE: (
        "each time {b} occurs, {a} has occurred before without any other occurrence of {b} in between"
    ),
    Template.CHAIN_PRECEDENCE: "each time {b} occurs, {a} has occurred immediately before",
    Template.CO_EXISTENCE: "{a} and {b} either both occur or neither does",
    Template.SUCCESSION: "{a} occurs if and only if {b} occurs afterwards",
    Template.ALTERNATE_SUCCESSION: (
        "{a} occurs if and only if {b} occurs afterwards, and the two alternate without repetitions in between"
    ),
    Template.CHAIN_SUCCESSION: "{a} occurs if and only if {b} occurs immediately afterwards",
}


def phrase(rule: Rule) -> str:
    return PHRASES[rule.template].format(a=rule.activator, b=rule.target)


def percent(diff: float) -> str:
    return f"{diff * 100:.1f}"


def render_nl(rule: Rule, e_a: float, e_b: float) -> str:
    higher, lower = ("A", "B") if e_a >= e_b else ("B", "A")
    if min(e_a, e_b) == 0 and max(e_a, e_b) > 0:
        return f"It happens only in Variant {higher} that {phrase(rule)}."
    return (
        f"In Variant {higher}, it is {percent(abs(e_a - e_b))}% more likely than in Variant {lower} "
        f"that {phrase(rule)}."
    )


@dataclass(frozen=True)
class DifferenceStatement:
    rule: Rule
    e_a: float
    e_b: float
    e_diff: float
    p_value: float
    exceedances: int = 0
    rank: int = 0
    text: str = ""


def rank(statements: Iterable[DifferenceStatement]) -> list[DifferenceStatement]:
    """Largest difference first, then highest measure in either log, then rule name."""
    ordered = sorted(statements, key=lambda s: (-s.e_diff, -max(s.e_a, s.e_b), s.rule.sort_key()))
    return [
        DifferenceStatement(
            s.rule, s.e_a, s.e_b, s.e_diff, s.p_value, s.exceedances, i, s.text or render_nl(s.rule, s.e_a, s.e_b)
        )
        for i, s in enumerate(ordered, start=1)
    ]


def statements_from(result) -> list[DifferenceStatement]:
    """Ranked statements for the significant rules of an ``AnalysisResult``."""
    found = result.outcome.as_dict()
    out = []
    for rule in result.significant:
        m = result.table[rule]
        exceedances, p = found[rule]
        out.append(DifferenceStatement(rule, m.e_a, m.e_b, m.e_diff, p, exceedances))
    return rank(out)


def _number(x: float) -> str:
    return f"{x:.3f}"


def write_outputs(statements: Sequence[DifferenceStatement], out_dir: str | Path, top_n: int = 10) -> tuple[Path, Path]:
    """Write the top-``top_n`` sentences as text and every statement as CSV."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        text_path, csv_path = out / TEXT_FILENAME, out / CSV_FILENAME
        with open(text_path, "w", encoding="utf-8", newline="\n") as fh:
            for s in statements[:top_n]:
                fh.write(f"{s.rank}. {s.text}\n")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for s in statements:
                writer.writerow(
                    [
                        s.rank,
                        s.rule.template.value,
                        s.rule.activator,
                        s.rule.target or "",
                        _number(s.e_a),
                        _number(s.e_b),
                        _number(s.e_diff),
                        s.exceedances,
                        repr(float(s.p_value)),
                        s.text,
                    ]
                )
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc.strerror or exc}") from exc
    return text_path, csv_path
