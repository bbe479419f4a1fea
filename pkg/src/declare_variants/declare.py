"""Declare templates, per-trace evaluation, log measures and the entailment order.

A rule is evaluated event by event: every activation either is or is not
satisfied.  Conjunctive templates (CoExistence and the Succession family)
are the conjunction of two directional rules; their per-trace evaluation
sums both directions, while their log measure is the minimum of the two
directional measures so that measures never decrease along entailment.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

Trace = tuple[str, ...]


class Template(enum.Enum):
    PARTICIPATION = "Participation"
    AT_MOST_ONE = "AtMostOne"
    RESPONDED_EXISTENCE = "RespondedExistence"
    RESPONSE = "Response"
    ALTERNATE_RESPONSE = "AlternateResponse"
    CHAIN_RESPONSE = "ChainResponse"
    PRECEDENCE = "Precedence"
    ALTERNATE_PRECEDENCE = "AlternatePrecedence"
    CHAIN_PRECEDENCE = "ChainPrecedence"
    CO_EXISTENCE = "CoExistence"
    SUCCESSION = "Succession"
    ALTERNATE_SUCCESSION = "AlternateSuccession"
    CHAIN_SUCCESSION = "ChainSuccession"

    @property
    def arity(self) -> int:
        return 1 if self in UNARY_TEMPLATES else 2

    @classmethod
    def from_name(cls, name: str) -> "Template":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise ValueError(f"unknown template {name!r}; valid templates: {valid}") from None


UNARY_TEMPLATES = frozenset({Template.PARTICIPATION, Template.AT_MOST_ONE})
BINARY_TEMPLATES = tuple(t for t in Template if t not in UNARY_TEMPLATES)

# templates whose activations are occurrences of the target parameter
_TARGET_ACTIVATED = frozenset(
    {Template.PRECEDENCE, Template.ALTERNATE_PRECEDENCE, Template.CHAIN_PRECEDENCE}
)


class MeasureKind(enum.Enum):
    CONFIDENCE = "confidence"
    SUPPORT = "support"


@dataclass(frozen=True)
class Rule:
    template: Template
    activator: str
    target: str | None = None

    def __post_init__(self) -> None:
        if not self.activator:
            raise ValueError("rule activator must be a non-empty activity label")
        if self.template.arity == 1:
            if self.target is not None:
                raise ValueError(f"{self.template.value} takes one parameter, got two")
        else:
            if not self.target:
                raise ValueError(f"{self.template.value} takes two parameters, got one")
            if self.target == self.activator:
                raise ValueError(f"self-rule {self.template.value}({self.activator}) is not allowed")

    @property
    def parameters(self) -> tuple[str, ...]:
        return (self.activator,) if self.target is None else (self.activator, self.target)

    def sort_key(self) -> tuple[str, str, str]:
        return (self.template.value, self.activator, self.target or "")

    def __str__(self) -> str:
        return f"{self.template.value}({', '.join(self.parameters)})"


class TraceEvaluation(NamedTuple):
    activations: int
    satisfactions: int


def components(rule: Rule) -> tuple[Rule, ...]:
    """Directional rules whose conjunction is ``rule`` (the rule itself if already directional)."""
    a, b = rule.activator, rule.target
    t = rule.template
    if t is Template.CO_EXISTENCE:
        return (Rule(Template.RESPONDED_EXISTENCE, a, b), Rule(Template.RESPONDED_EXISTENCE, b, a))
    if t is Template.SUCCESSION:
        return (Rule(Template.RESPONSE, a, b), Rule(Template.PRECEDENCE, a, b))
    if t is Template.ALTERNATE_SUCCESSION:
        return (Rule(Template.ALTERNATE_RESPONSE, a, b), Rule(Template.ALTERNATE_PRECEDENCE, a, b))
    if t is Template.CHAIN_SUCCESSION:
        return (Rule(Template.CHAIN_RESPONSE, a, b), Rule(Template.CHAIN_PRECEDENCE, a, b))
    return (rule,)


def positions(trace: Sequence[str]) -> dict[str, list[int]]:
    index: dict[str, list[int]] = {}
    for i, activity in enumerate(trace):
        index.setdefault(activity, []).append(i)
    return index


_EMPTY: list[int] = []


def evaluate_directional(
    rule: Rule, trace: Sequence[str], index: Mapping[str, list[int]] | None = None
) -> TraceEvaluation:
    """Activation/satisfaction counts of a directional rule, using an optional position index."""
    if index is None:
        index = positions(trace)
    t = rule.template
    pa = index.get(rule.activator, _EMPTY)
    if t is Template.PARTICIPATION:
        return TraceEvaluation(1, 1 if pa else 0)
    if t is Template.AT_MOST_ONE:
        return TraceEvaluation(1, 1 if len(pa) <= 1 else 0)

    pb = index.get(rule.target, _EMPTY)
    if t in _TARGET_ACTIVATED:
        if not pb:
            return TraceEvaluation(0, 0)
        if not pa:
            return TraceEvaluation(len(pb), 0)
        if t is Template.PRECEDENCE:
            # b positions after the first a
            return TraceEvaluation(len(pb), len(pb) - bisect_right(pb, pa[0]))
        if t is Template.CHAIN_PRECEDENCE:
            a = rule.activator
            return TraceEvaluation(len(pb), sum(1 for j in pb if j > 0 and trace[j - 1] == a))
        if t is Template.ALTERNATE_PRECEDENCE:
            ok = 0
            previous_b = -1
            for j in pb:
                k = bisect_left(pa, j) - 1
                if k >= 0 and pa[k] > previous_b:
                    ok += 1
                previous_b = j
            return TraceEvaluation(len(pb), ok)
        raise AssertionError(t)

    if not pa:
        return TraceEvaluation(0, 0)
    if not pb:
        return TraceEvaluation(len(pa), 0)
    if t is Template.RESPONDED_EXISTENCE:
        return TraceEvaluation(len(pa), len(pa))
    if t is Template.RESPONSE:
        # a positions before the last b
        return TraceEvaluation(len(pa), bisect_left(pa, pb[-1]))
    if t is Template.CHAIN_RESPONSE:
        b = rule.target
        n = len(trace)
        return TraceEvaluation(len(pa), sum(1 for i in pa if i + 1 < n and trace[i + 1] == b))
    if t is Template.ALTERNATE_RESPONSE:
        ok = 0
        last = len(pa) - 1
        for k, i in enumerate(pa):
            m = bisect_right(pb, i)
            if m < len(pb) and (k == last or pb[m] < pa[k + 1]):
                ok += 1
        return TraceEvaluation(len(pa), ok)
    raise ValueError(f"{t.value} is not a directional template")


def evaluate_trace(rule: Rule, trace: Sequence[str]) -> TraceEvaluation:
    """Event-level counts of ``rule`` on one trace, summed over both directions if conjunctive."""
    index = positions(trace)
    acts = sats = 0
    for part in components(rule):
        ev = evaluate_directional(part, trace, index)
        acts += ev.activations
        sats += ev.satisfactions
    return TraceEvaluation(acts, sats)


def ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else 0.0


def denominator(rule: Rule, evaluation: TraceEvaluation, trace_length: int, kind: MeasureKind) -> int:
    """Per-trace contribution to the denominator of a directional rule's measure."""
    if kind is MeasureKind.CONFIDENCE:
        return evaluation.activations
    return 1 if rule.template in UNARY_TEMPLATES else trace_length


def measure(rule: Rule, log: Mapping[Trace, int], kind: MeasureKind = MeasureKind.CONFIDENCE) -> float:
    """Support or Confidence of ``rule`` on a multiset of traces.

    ``log`` is anything mapping a trace to its multiplicity (an ``EventLog``'s
    ``traces``, or a plain dict).
    """
    traces = getattr(log, "traces", log)
    values = []
    for part in components(rule):
        num = den = 0
        for trace, count in traces.items():
            ev = evaluate_directional(part, trace, positions(trace))
            num += count * ev.satisfactions
            den += count * denominator(part, ev, len(trace), kind)
        values.append(ratio(num, den))
    return min(values)


def log_confidence(rule: Rule, log: Mapping[Trace, int]) -> float:
    return measure(rule, log, MeasureKind.CONFIDENCE)


def log_support(rule: Rule, log: Mapping[Trace, int]) -> float:
    return measure(rule, log, MeasureKind.SUPPORT)


# ---------------------------------------------------------------------------
# subsumption hierarchy


def direct_generalizations(rule: Rule) -> tuple[Rule, ...]:
    """Rules immediately entailed by ``rule`` (its parents in the hierarchy)."""
    a, b = rule.activator, rule.target
    T = Template
    edges = {
        T.CHAIN_SUCCESSION: ((T.CHAIN_RESPONSE, a, b), (T.CHAIN_PRECEDENCE, a, b), (T.ALTERNATE_SUCCESSION, a, b)),
        T.ALTERNATE_SUCCESSION: ((T.ALTERNATE_RESPONSE, a, b), (T.ALTERNATE_PRECEDENCE, a, b), (T.SUCCESSION, a, b)),
        T.SUCCESSION: ((T.RESPONSE, a, b), (T.PRECEDENCE, a, b), (T.CO_EXISTENCE, a, b)),
        T.CO_EXISTENCE: ((T.RESPONDED_EXISTENCE, a, b), (T.RESPONDED_EXISTENCE, b, a)),
        T.CHAIN_RESPONSE: ((T.ALTERNATE_RESPONSE, a, b),),
        T.ALTERNATE_RESPONSE: ((T.RESPONSE, a, b),),
        T.RESPONSE: ((T.RESPONDED_EXISTENCE, a, b),),
        T.CHAIN_PRECEDENCE: ((T.ALTERNATE_PRECEDENCE, a, b),),
        T.ALTERNATE_PRECEDENCE: ((T.PRECEDENCE, a, b),),
        T.PRECEDENCE: ((T.RESPONDED_EXISTENCE, b, a),),
    }.get(rule.template, ())
    return tuple(Rule(t, x, y) for t, x, y in edges)


@lru_cache(maxsize=None)
def generalizations(rule: Rule) -> frozenset[Rule]:
    """All rules strictly entailed by ``rule``."""
    out: set[Rule] = set()
    for parent in direct_generalizations(rule):
        out.add(parent)
        out |= generalizations(parent)
    return frozenset(out)


def entails(specific: Rule, general: Rule) -> bool:
    return specific == general or general in generalizations(specific)


def hierarchy_height(rules: Iterable[Rule]) -> int:
    return max((len(generalizations(r)) for r in rules), default=0)
