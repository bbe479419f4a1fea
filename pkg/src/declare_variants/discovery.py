"""Exhaustive Declare discovery by thresholding, and the JSON specification format."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .declare import (
    BINARY_TEMPLATES,
    Rule,
    Template,
    _TARGET_ACTIVATED,
    components,
    evaluate_directional,
    positions,
    ratio,
)
from .errors import SpecificationError
from .log_io import EventLog

_DIRECTIONAL_BINARY = (
    Template.RESPONDED_EXISTENCE,
    Template.RESPONSE,
    Template.ALTERNATE_RESPONSE,
    Template.CHAIN_RESPONSE,
    Template.PRECEDENCE,
    Template.ALTERNATE_PRECEDENCE,
    Template.CHAIN_PRECEDENCE,
)


class Annotation(NamedTuple):
    support: float | None
    confidence: float | None


@dataclass(frozen=True)
class Specification:
    """A set of rules, each optionally annotated with Support and Confidence."""

    rules: Mapping[Rule, Annotation]
    source_log: str = ""

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(sorted(self.rules, key=Rule.sort_key))

    def __contains__(self, rule: object) -> bool:
        return rule in self.rules

    @classmethod
    def of(cls, rules: Iterable[Rule], source_log: str = "") -> "Specification":
        return cls({r: Annotation(None, None) for r in rules}, source_log)


def candidate_rules(alphabet: Iterable[str]) -> set[Rule]:
    activities = sorted(set(alphabet))
    if not activities:
        raise ValueError("empty alphabet")
    rules = {Rule(Template.PARTICIPATION, a) for a in activities}
    rules |= {Rule(Template.AT_MOST_ONE, a) for a in activities}
    for a in activities:
        for b in activities:
            if a != b:
                rules.update(Rule(t, a, b) for t in BINARY_TEMPLATES)
    return rules


def _check_threshold(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"threshold out of range: {name}={value} must lie in [0, 1]")


def measure_all(log: EventLog) -> dict[Rule, Annotation]:
    """Support and Confidence of every candidate rule over the log's alphabet.

    Only activity pairs that co-occur in a trace are evaluated; activation
    counts for the others follow from per-activity occurrence totals.
    """
    activities = sorted(log.alphabet)
    n_traces = len(log)
    n_events = 0
    occurrences: dict[str, int] = defaultdict(int)
    present: dict[str, int] = defaultdict(int)
    repeated: dict[str, int] = defaultdict(int)
    satisfied: dict[Rule, int] = defaultdict(int)

    for trace, count in log.traces.items():
        n_events += count * len(trace)
        index = positions(trace)
        for a, pa in index.items():
            occurrences[a] += count * len(pa)
            present[a] += count
            if len(pa) > 1:
                repeated[a] += count
        for a in index:
            for b in index:
                if a == b:
                    continue
                for t in _DIRECTIONAL_BINARY:
                    rule = Rule(t, a, b)
                    s = evaluate_directional(rule, trace, index).satisfactions
                    if s:
                        satisfied[rule] += count * s

    # directional (numerator, confidence denominator, support denominator)
    directional: dict[Rule, tuple[int, int, int]] = {}
    for a in activities:
        directional[Rule(Template.PARTICIPATION, a)] = (present[a], n_traces, n_traces)
        directional[Rule(Template.AT_MOST_ONE, a)] = (n_traces - repeated[a], n_traces, n_traces)

    def directional_sums(rule: Rule) -> tuple[int, int, int]:
        if rule not in directional:
            activating = rule.target if rule.template in _TARGET_ACTIVATED else rule.activator
            directional[rule] = (satisfied.get(rule, 0), occurrences[activating], n_events)
        return directional[rule]

    out: dict[Rule, Annotation] = {}
    for rule in candidate_rules(activities):
        supp, conf = [], []
        for part in components(rule):
            num, den_conf, den_supp = directional_sums(part)
            conf.append(ratio(num, den_conf))
            supp.append(ratio(num, den_supp))
        out[rule] = Annotation(min(supp), min(conf))
    return out


def discover(log: EventLog, support_min: float = 0.5, confidence_min: float = 0.0) -> Specification:
    _check_threshold("support_min", support_min)
    _check_threshold("confidence_min", confidence_min)
    if not log.alphabet:
        return Specification({}, log.source_id)
    kept = {
        rule: ann
        for rule, ann in measure_all(log).items()
        if ann.support >= support_min and ann.confidence >= confidence_min
    }
    return Specification(kept, log.source_id)


# ---------------------------------------------------------------------------
# JSON specification files
#
# {"source_log": "...",
#  "constraints": [{"template": "Response", "parameters": ["a", "b"],
#                   "support": 0.4, "confidence": 0.9}, ...]}
# "support"/"confidence" may be omitted for hand-written specifications.


def _rule_from_json(entry: object, position: int) -> tuple[Rule, Annotation]:
    if not isinstance(entry, dict):
        raise SpecificationError(f"constraint {position}: expected an object, got {type(entry).__name__}")
    try:
        template = Template.from_name(entry.get("template", ""))
    except ValueError as exc:
        raise SpecificationError(f"constraint {position}: {exc}") from None
    params = entry.get("parameters")
    if not isinstance(params, list) or not all(isinstance(p, str) for p in params):
        raise SpecificationError(f"constraint {position}: 'parameters' must be a list of activity names")
    if len(params) != template.arity:
        raise SpecificationError(
            f"constraint {position}: {template.value} takes {template.arity} parameter(s), got {len(params)}"
        )
    try:
        rule = Rule(template, *params)
    except ValueError as exc:
        raise SpecificationError(f"constraint {position}: {exc}") from None
    values = []
    for key in ("support", "confidence"):
        v = entry.get(key)
        if v is not None and (not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0):
            raise SpecificationError(f"constraint {position}: {key} must be a number in [0, 1]")
        values.append(None if v is None else float(v))
    return rule, Annotation(*values)


def read_specification(path: str | Path) -> Specification:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecificationError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("constraints"), list):
        raise SpecificationError(f"{path}: expected an object with a 'constraints' array")
    rules: dict[Rule, Annotation] = {}
    for i, entry in enumerate(data["constraints"]):
        rule, ann = _rule_from_json(entry, i)
        if rule in rules:
            raise SpecificationError(f"{path}: duplicate constraint {rule}")
        rules[rule] = ann
    return Specification(rules, str(data.get("source_log", path)))


def write_specification(spec: Specification, path: str | Path) -> None:
    constraints = []
    for rule in spec:
        entry: dict[str, object] = {"template": rule.template.value, "parameters": list(rule.parameters)}
        ann = spec.rules[rule]
        if ann.support is not None:
            entry["support"] = ann.support
        if ann.confidence is not None:
            entry["confidence"] = ann.confidence
        constraints.append(entry)
    payload = {"source_log": spec.source_log, "constraints": constraints}
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
