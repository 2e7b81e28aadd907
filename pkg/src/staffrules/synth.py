"""Seeded synthetic log generator with planted per-activity resource
distributions.

The spec file is the single source of truth: the Bayes-optimal accuracy
ceiling is computed from the spec alone, never from generated data, so
it stays an independent oracle for the evaluator.  Case structure is
deliberately simple: every case holds events of one process, case
boundaries are drawn geometrically, timestamps increase monotonically.
"""
from __future__ import annotations

import bisect
import itertools
import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from importlib import resources
from typing import Mapping, Sequence

from .errors import SpecValidationError
from .eventlog import Event, EventLog

_AFFINITY_TOL = 1e-9


@dataclass(frozen=True)
class ActivitySpec:
    process: str
    task: str
    weight: float
    affinity: tuple[tuple[str, float], ...]  # (resource, probability)

    def max_probability(self) -> float:
        return max(p for _r, p in self.affinity)


@dataclass(frozen=True)
class GeneratorSpec:
    activities: tuple[ActivitySpec, ...]
    n_events: int
    n_cases: int
    seed: int

    def validate(self) -> None:
        if self.n_events < 0 or self.n_cases < 1:
            raise SpecValidationError("n_events must be >= 0 and n_cases >= 1")
        if not self.activities:
            raise SpecValidationError("spec has no activities")
        total = 0.0
        for a in self.activities:
            if a.weight < 0:
                raise SpecValidationError(
                    f"negative weight for activity ({a.process}, {a.task})"
                )
            total += a.weight
            if not a.affinity:
                raise SpecValidationError(
                    f"activity ({a.process}, {a.task}) has an empty affinity"
                )
            s = sum(p for _r, p in a.affinity)
            if abs(s - 1.0) > _AFFINITY_TOL or any(p < 0 for _r, p in a.affinity):
                raise SpecValidationError(
                    f"affinity for ({a.process}, {a.task}) is not a distribution "
                    f"(sums to {s})"
                )
        if total <= 0:
            raise SpecValidationError("activity weights must have a positive total")

    def to_json_dict(self) -> dict:
        return {
            "n_events": self.n_events,
            "n_cases": self.n_cases,
            "seed": self.seed,
            "activities": [
                {
                    "process": a.process,
                    "task": a.task,
                    "weight": a.weight,
                    "affinity": {r: p for r, p in a.affinity},
                }
                for a in self.activities
            ],
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "GeneratorSpec":
        spec = cls(
            activities=tuple(
                ActivitySpec(
                    process=str(a["process"]),
                    task=str(a["task"]),
                    weight=float(a["weight"]),
                    affinity=tuple(sorted(
                        (str(r), float(p)) for r, p in a["affinity"].items()
                    )),
                )
                for a in d["activities"]
            ),
            n_events=int(d["n_events"]),
            n_cases=int(d["n_cases"]),
            seed=int(d["seed"]),
        )
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        return cls.from_json_dict(json.loads(text))


def load_bundled_spec(name: str = "table3") -> GeneratorSpec:
    """Load a spec shipped with the package (currently just "table3")."""
    text = resources.files("staffrules.data").joinpath(f"{name}.spec.json").read_text()
    return GeneratorSpec.from_json(text)


def generate(spec: GeneratorSpec, n_events: int | None = None, seed: int | None = None) -> EventLog:
    """Generate a log of n_events events, deterministic for a given seed.

    Activities are drawn by normalized weight, the resource from the
    activity's affinity.  Each case holds events of a single process;
    a new case opens with probability n_cases/n_events per event.
    """
    spec.validate()
    n = spec.n_events if n_events is None else n_events
    rng = random.Random(spec.seed if seed is None else seed)

    weights = [a.weight for a in spec.activities]
    activity_draws = rng.choices(range(len(spec.activities)), weights=weights, k=n)

    # Per-activity cumulative affinity tables for bisect sampling.
    cum_tables: list[tuple[list[float], list[str]]] = []
    for a in spec.activities:
        cum = list(itertools.accumulate(p for _r, p in a.affinity))
        cum[-1] = 1.0  # guard against float undershoot
        cum_tables.append((cum, [r for r, _p in a.affinity]))

    p_new_case = min(1.0, spec.n_cases / n) if n else 0.0
    open_case: dict[str, str] = {}
    next_case = 1
    base_time = datetime(2007, 10, 15, 8, 0)

    events: list[Event] = []
    for i, ai in enumerate(activity_draws):
        act = spec.activities[ai]
        cum, res = cum_tables[ai]
        r = res[bisect.bisect_left(cum, rng.random())]
        case = open_case.get(act.process)
        if case is None or rng.random() < p_new_case:
            case = f"c{next_case}"
            next_case += 1
            open_case[act.process] = case
        events.append(
            Event(
                event_id=str(i + 1),
                process=act.process,
                task=act.task,
                resource=r,
                case_id=case,
                timestamp=base_time + timedelta(minutes=i),
            )
        )
    return EventLog(events)


def bayes_optimal_accuracy(spec: GeneratorSpec) -> float:
    """Weight-normalized mean of each activity's maximum affinity
    probability: the expected-accuracy ceiling of any per-activity
    classifier on data drawn from this spec."""
    spec.validate()
    total = sum(a.weight for a in spec.activities)
    return sum(a.weight * a.max_probability() for a in spec.activities) / total
