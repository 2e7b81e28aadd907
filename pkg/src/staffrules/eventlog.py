"""Workflow event log model: parsing, cleaning, counting, frequency stats.

An event records that a resource executed a task of a process within a
case.  Timestamps are carried along for provenance but never enter any
mining arithmetic; event order is likewise irrelevant to the counts.
"""
from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence, TextIO

from .errors import ColumnMappingError, UnsupportedIdError

DEFAULT_TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M"


@dataclass(frozen=True)
class FormatConfig:
    """Maps input columns onto the five required roles plus optionals."""

    event_id: str = "event_id"
    process: str = "process"
    task: str = "task"
    resource: str = "resource"
    case: str = "case"
    timestamp: Optional[str] = "timestamp"
    event_type: Optional[str] = None
    delimiter: str = ","
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT

    def required_columns(self) -> tuple[str, ...]:
        return (self.event_id, self.process, self.task, self.resource, self.case)

    @classmethod
    def from_dict(cls, d: Mapping) -> "FormatConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(frozen=True)
class Event:
    event_id: str
    process: str
    task: str
    resource: str
    case_id: str
    timestamp: Optional[datetime] = None
    event_type: Optional[str] = None

    @property
    def activity(self) -> tuple[str, str]:
        return (self.process, self.task)

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.process, self.task, self.resource)


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str


class EventLog:
    """Immutable ordered multiset of events with lazily built count indexes.

    All indexes are derived once and cached; instances are safe for
    concurrent reads.
    """

    def __init__(self, events: Iterable[Event]):
        self._events: tuple[Event, ...] = tuple(events)

    @property
    def events(self) -> tuple[Event, ...]:
        return self._events

    @property
    def n_events(self) -> int:
        return len(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self):
        return iter(self._events)

    def __eq__(self, other) -> bool:
        return isinstance(other, EventLog) and self._events == other._events

    @cached_property
    def triples(self) -> list[tuple[str, str, str]]:
        return [e.triple for e in self._events]

    @cached_property
    def triple_counts(self) -> Counter:
        return Counter(self.triples)

    @cached_property
    def activity_counts(self) -> Counter:
        c: Counter = Counter()
        for (p, t, _r), n in self.triple_counts.items():
            c[(p, t)] += n
        return c

    @cached_property
    def process_counts(self) -> Counter:
        c: Counter = Counter()
        for (p, _t), n in self.activity_counts.items():
            c[p] += n
        return c

    @cached_property
    def task_counts(self) -> Counter:
        """Task token counts across processes (task ids may repeat between
        processes; per-process task counts live in activity_counts)."""
        c: Counter = Counter()
        for (_p, t), n in self.activity_counts.items():
            c[t] += n
        return c

    @cached_property
    def resource_counts(self) -> Counter:
        c: Counter = Counter()
        for (_p, _t, r), n in self.triple_counts.items():
            c[r] += n
        return c

    @cached_property
    def pair_pr_counts(self) -> Counter:
        c: Counter = Counter()
        for (p, _t, r), n in self.triple_counts.items():
            c[(p, r)] += n
        return c

    @cached_property
    def pair_tr_counts(self) -> Counter:
        c: Counter = Counter()
        for (_p, t, r), n in self.triple_counts.items():
            c[(t, r)] += n
        return c

    @cached_property
    def cases(self) -> dict[str, list[Event]]:
        by_case: dict[str, list[Event]] = {}
        for e in self._events:
            by_case.setdefault(e.case_id, []).append(e)
        return by_case

    def sub_log(self, indices: Sequence[int]) -> "EventLog":
        ev = self._events
        return EventLog(ev[i] for i in indices)


def parse_log(source: TextIO, fmt: FormatConfig) -> tuple[EventLog, list[RowError]]:
    """Parse delimiter-separated text into an EventLog.

    Malformed rows (short rows, unparseable timestamps) are collected as
    RowError entries rather than aborting; a missing required column in
    the header is fatal.
    """
    reader = csv.DictReader(source, delimiter=fmt.delimiter)
    header = reader.fieldnames or []
    missing = [c for c in fmt.required_columns() if c not in header]
    if missing:
        raise ColumnMappingError(
            "missing required column(s) in header: " + ", ".join(missing)
        )
    ts_col = fmt.timestamp if fmt.timestamp in header else None
    type_col = fmt.event_type if fmt.event_type in header else None

    events: list[Event] = []
    errors: list[RowError] = []
    for line_no, row in enumerate(reader, start=2):
        if row.get(None) is not None:
            errors.append(RowError(line_no, "too many fields"))
            continue
        values = {}
        short = False
        for col in fmt.required_columns():
            v = row.get(col)
            if v is None:
                short = True
                break
            values[col] = v.strip()
        if short:
            errors.append(RowError(line_no, "too few fields"))
            continue
        ts = None
        if ts_col is not None:
            raw = (row.get(ts_col) or "").strip()
            if raw:
                try:
                    ts = datetime.strptime(raw, fmt.timestamp_format)
                except ValueError:
                    errors.append(RowError(line_no, f"bad timestamp {raw!r}"))
                    continue
        etype = None
        if type_col is not None:
            etype = (row.get(type_col) or "").strip() or None
        events.append(
            Event(
                event_id=values[fmt.event_id],
                process=values[fmt.process],
                task=values[fmt.task],
                resource=values[fmt.resource],
                case_id=values[fmt.case],
                timestamp=ts,
                event_type=etype,
            )
        )
    return EventLog(events), errors


def write_log(log: EventLog, sink: TextIO, fmt: FormatConfig = FormatConfig()) -> None:
    """Serialize a log back to delimited text in the given column mapping."""
    columns = list(fmt.required_columns())
    if fmt.timestamp:
        columns.append(fmt.timestamp)
    if fmt.event_type:
        columns.append(fmt.event_type)
    writer = csv.writer(sink, delimiter=fmt.delimiter, lineterminator="\n")
    writer.writerow(columns)
    for e in log:
        row = [e.event_id, e.process, e.task, e.resource, e.case_id]
        if fmt.timestamp:
            row.append(e.timestamp.strftime(fmt.timestamp_format) if e.timestamp else "")
        if fmt.event_type:
            row.append(e.event_type or "")
        writer.writerow(row)


@dataclass(frozen=True)
class CleaningConfig:
    drop_event_types: frozenset[str] = frozenset()
    drop_missing: bool = True


@dataclass(frozen=True)
class CleaningReport:
    input_count: int
    kept_count: int
    dropped_missing_resource: int
    dropped_missing_fields: int
    dropped_by_event_type_filter: int

    def reconciles(self) -> bool:
        return self.input_count == (
            self.kept_count
            + self.dropped_missing_resource
            + self.dropped_missing_fields
            + self.dropped_by_event_type_filter
        )


def clean_log(
    log: EventLog, config: CleaningConfig = CleaningConfig()
) -> tuple[EventLog, CleaningReport]:
    """Drop noise events: filtered event types and rows with missing
    process/task/resource/case.  Total (never raises) and idempotent."""
    kept: list[Event] = []
    by_type = 0
    no_resource = 0
    no_fields = 0
    for e in log:
        if e.event_type is not None and e.event_type in config.drop_event_types:
            by_type += 1
            continue
        if config.drop_missing:
            if not e.resource:
                no_resource += 1
                continue
            if not (e.process and e.task and e.case_id):
                no_fields += 1
                continue
        kept.append(e)
    report = CleaningReport(
        input_count=log.n_events,
        kept_count=len(kept),
        dropped_missing_resource=no_resource,
        dropped_missing_fields=no_fields,
        dropped_by_event_type_filter=by_type,
    )
    return EventLog(kept), report


def _coerce_int(token: str, role: str) -> int:
    try:
        return int(token)
    except (TypeError, ValueError):
        raise UnsupportedIdError(
            f"{role} id {token!r} is not integer-coded; numeric activity ids "
            "are only defined for integer-coded logs"
        ) from None


def activity_id(process: int | str, task: int | str, max_task_id: int) -> int:
    """Flatten a (process, task) pair into a single integer id:
    max_task_id * process + task."""
    p = _coerce_int(process, "process") if not isinstance(process, int) else process
    t = _coerce_int(task, "task") if not isinstance(task, int) else task
    return max_task_id * p + t


def log_max_task_id(log: EventLog) -> int:
    """Largest integer task id over the whole log."""
    tasks = log.task_counts
    if not tasks:
        return 0
    return max(_coerce_int(t, "task") for t in tasks)


def _is_integer_coded(log: EventLog) -> bool:
    try:
        for p, t in log.activity_counts:
            int(p)
            int(t)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class FrequencyStats:
    """Count summaries of a cleaned log.

    process_task_matrix is orientation-explicit: keyed by the
    (process, task) pair, rendered with tasks as rows and processes as
    columns.  activity_counts uses the flattened integer id when the log
    is integer-coded, otherwise a "process/task" string key.
    """

    n_events: int
    process_task_matrix: Mapping[tuple[str, str], int]
    resource_counts: Mapping[str, int]
    activity_counts: Mapping[int | str, int]
    process_relative_freq: Mapping[str, float]

    def to_json_dict(self) -> dict:
        return {
            "n_events": self.n_events,
            "process_task_matrix": [
                {"process": p, "task": t, "count": n}
                for (p, t), n in sorted(
                    self.process_task_matrix.items(), key=lambda kv: _sort_key_pair(kv[0])
                )
            ],
            "resource_counts": {
                r: n for r, n in sorted(self.resource_counts.items(), key=lambda kv: _sort_key(kv[0]))
            },
            "activity_counts": {
                str(a): n
                for a, n in sorted(self.activity_counts.items(), key=lambda kv: _sort_key(str(kv[0])))
            },
            "process_relative_freq": {
                p: f for p, f in sorted(self.process_relative_freq.items(), key=lambda kv: _sort_key(kv[0]))
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def write_matrix_csv(self, sink: TextIO) -> None:
        """Process-task count matrix: one row per task, one column per
        process; blank cells are zero."""
        processes = sorted({p for p, _t in self.process_task_matrix}, key=_sort_key)
        tasks = sorted({t for _p, t in self.process_task_matrix}, key=_sort_key)
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["task"] + processes)
        for t in tasks:
            writer.writerow(
                [t] + [self.process_task_matrix.get((p, t), 0) for p in processes]
            )


def _sort_key(token: str):
    """Numeric-aware ordering so '10' sorts after '9'."""
    try:
        return (0, int(token), "")
    except ValueError:
        return (1, 0, token)


def _sort_key_pair(pair: tuple[str, str]):
    return (_sort_key(pair[0]), _sort_key(pair[1]))


def frequency_stats(log: EventLog) -> FrequencyStats:
    n = log.n_events
    matrix = dict(log.activity_counts)
    if n and _is_integer_coded(log):
        max_t = log_max_task_id(log)
        acts: dict[int | str, int] = {
            activity_id(p, t, max_t): c for (p, t), c in matrix.items()
        }
    else:
        acts = {f"{p}/{t}": c for (p, t), c in matrix.items()}
    rel = {p: c / n for p, c in log.process_counts.items()} if n else {}
    return FrequencyStats(
        n_events=n,
        process_task_matrix=matrix,
        resource_counts=dict(log.resource_counts),
        activity_counts=acts,
        process_relative_freq=rel,
    )
