"""Reading event logs (XES, CSV) into multisets of activity sequences."""

from __future__ import annotations

import csv
import gzip
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .declare import Trace
from .errors import LogFormatError

ACTIVITY_KEY = "concept:name"
_ATTRIBUTE_TAGS = {"string", "date", "int", "float", "boolean", "id"}


@dataclass(frozen=True)
class EventLog:
    """A multiset of traces: each distinct activity sequence maps to its count."""

    traces: Mapping[Trace, int]
    source_id: str = ""
    alphabet: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        if any(c <= 0 for c in self.traces.values()):
            raise ValueError("trace multiplicities must be positive")
        object.__setattr__(self, "alphabet", frozenset(a for t in self.traces for a in t))

    @classmethod
    def from_traces(cls, traces: Iterable[Iterable[str]], source_id: str = "") -> "EventLog":
        return cls(dict(Counter(tuple(t) for t in traces)), source_id)

    def __len__(self) -> int:
        return sum(self.traces.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return dict(self.traces) == dict(other.traces)

    def __hash__(self) -> int:
        return hash(frozenset(self.traces.items()))

    def expanded(self) -> list[Trace]:
        """Every trace repeated by its multiplicity, in a deterministic order."""
        return [t for t, c in self.traces.items() for _ in range(c)]


@dataclass(frozen=True)
class LogStats:
    total_traces: int
    distinct_traces: int
    total_events: int
    distinct_events: int
    min_length: int
    avg_length: float
    max_length: int

    @property
    def distinct_ratio(self) -> float:
        return self.distinct_traces / self.total_traces if self.total_traces else 0.0


def stats(log: EventLog) -> LogStats:
    total = len(log)
    events = sum(len(t) * c for t, c in log.traces.items())
    lengths = [len(t) for t in log.traces]
    return LogStats(
        total_traces=total,
        distinct_traces=len(log.traces),
        total_events=events,
        distinct_events=len(log.alphabet),
        min_length=min(lengths, default=0),
        avg_length=events / total if total else 0.0,
        max_length=max(lengths, default=0),
    )


# ---------------------------------------------------------------------------
# XES


def _open_bytes(path: Path):
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _typed(elem: ET.Element) -> Any:
    tag, value = _local(elem.tag), elem.get("value")
    if value is None:
        return None
    try:
        if tag == "int":
            return int(value)
        if tag == "float":
            return float(value)
        if tag == "boolean":
            return value.strip().lower() == "true"
    except ValueError:
        pass
    return value


def parse_xes(
    path: str | Path,
    trace_filter: Callable[[Mapping[str, Any]], bool] | None = None,
) -> EventLog:
    """Parse the trace/event/concept:name subset of an XES file (optionally gzipped).

    ``trace_filter`` receives the trace-level attributes, completed with the
    first value seen for each event-level attribute key, and decides whether the
    trace is kept.  This is how variants such as "Age >= 70" are carved out of a
    single log.
    """
    path = Path(path)
    counts: Counter[Trace] = Counter()
    trace_index = -1
    try:
        with _open_bytes(path) as fh:
            events: list[str] = []
            attrs: dict[str, Any] = {}
            event_attrs: dict[str, Any] = {}
            depth_trace = depth_event = False
            for kind, elem in ET.iterparse(fh, events=("start", "end")):
                tag = _local(elem.tag)
                if kind == "start":
                    if tag == "trace":
                        trace_index += 1
                        depth_trace, events, attrs = True, [], {}
                    elif tag == "event" and depth_trace:
                        depth_event, event_attrs = True, {}
                    continue
                if tag == "event" and depth_event:
                    name = event_attrs.get(ACTIVITY_KEY)
                    if name is None or name == "":
                        raise LogFormatError(
                            f"{path}: event {len(events)} of trace {trace_index} has no {ACTIVITY_KEY}"
                        )
                    events.append(str(name))
                    for k, v in event_attrs.items():
                        attrs.setdefault(k, v)
                    depth_event = False
                    elem.clear()
                elif tag == "trace" and depth_trace:
                    if not events:
                        raise LogFormatError(f"{path}: empty trace (trace {trace_index} has no events)")
                    if trace_filter is None or trace_filter(attrs):
                        counts[tuple(events)] += 1
                    depth_trace = False
                    elem.clear()
                elif tag in _ATTRIBUTE_TAGS and depth_trace:
                    key = elem.get("key")
                    if key is None:
                        continue
                    # nested attributes belong to their parent; only direct children matter here
                    target = event_attrs if depth_event else attrs
                    target.setdefault(key, _typed(elem))
    except ET.ParseError as exc:
        line, col = exc.position
        raise LogFormatError(f"{path}: malformed XML at line {line}, column {col}: {exc}") from exc
    return EventLog(dict(counts), source_id=str(path))


# ---------------------------------------------------------------------------
# CSV


@dataclass(frozen=True)
class CsvMapping:
    case: str = "case"
    activity: str = "activity"
    # None: use a "timestamp" column when present, else file row order
    order: str | None = None


def _parse_timestamp(value: str) -> float:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _order_parser(sample: str) -> Callable[[str], float]:
    try:
        float(sample)
        return float
    except ValueError:
        return _parse_timestamp


def parse_csv(path: str | Path, mapping: CsvMapping = CsvMapping()) -> EventLog:
    """Group rows by case id and order each case by the order key.

    Rows sharing a case and an order key keep their file order (stable sort).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        order = mapping.order
        if order is None and "timestamp" in header:
            order = "timestamp"
        missing = [c for c in (mapping.case, mapping.activity, order) if c is not None and c not in header]
        if missing:
            raise LogFormatError(f"{path}: missing column(s) {', '.join(missing)}; header is {header}")

        cases: dict[str, list[tuple[float, str]]] = {}
        parse_key: Callable[[str], float] | None = None
        for row_number, row in enumerate(reader, start=2):
            activity = row[mapping.activity]
            if not activity:
                raise LogFormatError(f"{path}: row {row_number} has an empty activity")
            if order is None:
                key = float(row_number)
            else:
                raw = row[order] or ""
                if parse_key is None:
                    parse_key = _order_parser(raw)
                try:
                    key = parse_key(raw)
                except ValueError as exc:
                    raise LogFormatError(
                        f"{path}: row {row_number}: cannot parse order key {raw!r} in column {order!r}"
                    ) from exc
            cases.setdefault(row[mapping.case], []).append((key, activity))

    counts: Counter[Trace] = Counter()
    for rows in cases.values():
        rows.sort(key=lambda r: r[0])
        counts[tuple(a for _, a in rows)] += 1
    return EventLog(dict(counts), source_id=str(path))


def write_csv(log: EventLog, path: str | Path, mapping: CsvMapping = CsvMapping()) -> None:
    """Write one row per event, cases numbered in expansion order, events in trace order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([mapping.case, mapping.activity])
        for case, trace in enumerate(log.expanded()):
            for activity in trace:
                writer.writerow([case, activity])


def read_log(path: str | Path, mapping: CsvMapping = CsvMapping()) -> EventLog:
    """Dispatch on file extension: ``.xes``/``.xes.gz`` or ``.csv``."""
    name = Path(path).name.lower()
    if name.endswith((".xes", ".xes.gz")):
        return parse_xes(path)
    if name.endswith(".csv"):
        return parse_csv(path, mapping)
    raise LogFormatError(f"{path}: unsupported log format (expected .xes, .xes.gz or .csv)")
