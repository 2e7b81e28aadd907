"""Most-confident-rule classifier and k-fold cross-validated accuracy.

Folds are stratified by (process, task) so rare activities appear in
every fold where their event count permits.  Events whose activity has
no surviving rule in a fold count as incorrect; the denominator is
always the full log size.
"""
from __future__ import annotations

import csv
import json
import random
import time
from dataclasses import dataclass
from typing import Mapping, Optional, TextIO

from .errors import EmptyLogError, UsageError
from .eventlog import EventLog, _is_integer_coded, _sort_key, activity_id, log_max_task_id
from .rules import AnnotatedRuleSet, MiningParams, three_stage


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: tuple[int, ...]  # event index -> fold index
    warnings: tuple[str, ...] = ()

    def fold_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def complement_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]


def kfold_split(log: EventLog, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified split: within each activity, a seeded
    shuffle assigns folds round-robin."""
    if k < 2:
        raise UsageError(f"k must be >= 2, got {k}")
    if log.n_events == 0:
        raise EmptyLogError("cannot split an empty log")
    strata: dict[tuple[str, str], list[int]] = {}
    for i, e in enumerate(log.events):
        strata.setdefault(e.activity, []).append(i)

    rng = random.Random(seed)
    assignment = [0] * log.n_events
    warnings: list[str] = []
    for key in sorted(strata, key=lambda a: (_sort_key(a[0]), _sort_key(a[1]))):
        indices = list(strata[key])
        rng.shuffle(indices)
        if len(indices) < k:
            warnings.append(
                f"activity ({key[0]}, {key[1]}) has {len(indices)} events; "
                f"it cannot reach all {k} folds"
            )
        for pos, idx in enumerate(indices):
            assignment[idx] = pos % k
    return FoldPlan(k=k, seed=seed, assignment=tuple(assignment), warnings=tuple(warnings))


@dataclass(frozen=True)
class ActivityScore:
    n: int
    correct: int

    @property
    def precision(self) -> float:
        return self.correct / self.n if self.n else 0.0


@dataclass(frozen=True)
class EvalReport:
    per_activity: Mapping[tuple[str, str], ActivityScore]
    n: int
    correct: int
    elapsed: float
    k: int
    seed: int
    params: Optional[MiningParams]

    @property
    def precision(self) -> float:
        return self.correct / self.n if self.n else 0.0

    def to_json_dict(self) -> dict:
        return {
            "overall": {"n": self.n, "correct": self.correct, "precision": self.precision},
            "per_activity": [
                {
                    "process": p,
                    "task": t,
                    "n": s.n,
                    "correct": s.correct,
                    "precision": s.precision,
                }
                for (p, t), s in sorted(
                    self.per_activity.items(),
                    key=lambda kv: (_sort_key(kv[0][0]), _sort_key(kv[0][1])),
                )
            ],
            "elapsed_seconds": self.elapsed,
            "k": self.k,
            "seed": self.seed,
            "params": self.params.to_json_dict() if self.params else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def write_activity_csv(self, sink: TextIO, log: Optional[EventLog] = None) -> None:
        """Two columns: activity id (flattened integer when the log is
        integer-coded) and precision."""
        max_t = 0
        integer_coded = log is not None and log.n_events > 0 and _is_integer_coded(log)
        if integer_coded:
            max_t = log_max_task_id(log)
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["activity_id", "precision"])
        rows = []
        for (p, t), s in self.per_activity.items():
            if integer_coded:
                label: int | str = activity_id(p, t, max_t)
            else:
                label = f"{p}/{t}"
            rows.append((label, s.precision))
        rows.sort(key=lambda r: _sort_key(str(r[0])))
        for label, precision in rows:
            writer.writerow([label, f"{precision:.6f}"])


def train(log_subset: EventLog, params: MiningParams) -> AnnotatedRuleSet:
    """Full pipeline on a training subset; the model is the ranked rule set."""
    return three_stage(log_subset, params)


def predict(model: AnnotatedRuleSet, process: str, task: str) -> Optional[str]:
    """Top-ranked resource for the activity, or None when no rule survives."""
    rules = model.groups.get((process, task))
    return rules[0].resource if rules else None


def _score(
    log: EventLog,
    plan: FoldPlan,
    predictor_for_fold,
) -> tuple[dict[tuple[str, str], ActivityScore], int]:
    counts: dict[tuple[str, str], list[int]] = {}
    total_correct = 0
    for fold in range(plan.k):
        predictor = predictor_for_fold(fold)
        for i in plan.fold_indices(fold):
            e = log.events[i]
            got = predictor(e.process, e.task)
            ok = got is not None and got == e.resource
            cell = counts.setdefault(e.activity, [0, 0])
            cell[0] += 1
            if ok:
                cell[1] += 1
                total_correct += 1
    per_activity = {k: ActivityScore(n=v[0], correct=v[1]) for k, v in counts.items()}
    return per_activity, total_correct


def evaluate(log: EventLog, k: int, seed: int, params: MiningParams) -> EvalReport:
    """k-fold CV of the most-confident-rule classifier."""
    if log.n_events == 0:
        raise EmptyLogError("empty log")
    start = time.perf_counter()
    plan = kfold_split(log, k, seed)

    def predictor_for_fold(fold: int):
        model = train(log.sub_log(plan.complement_indices(fold)), params)
        groups = model.groups
        return lambda p, t: (g[0].resource if (g := groups.get((p, t))) else None)

    per_activity, correct = _score(log, plan, predictor_for_fold)
    elapsed = time.perf_counter() - start
    return EvalReport(
        per_activity=per_activity,
        n=log.n_events,
        correct=correct,
        elapsed=elapsed,
        k=k,
        seed=seed,
        params=params,
    )


def majority_baseline(log: EventLog, k: int, seed: int) -> EvalReport:
    """Same CV protocol, but each fold predicts the training split's
    globally most frequent resource for every event."""
    if log.n_events == 0:
        raise EmptyLogError("empty log")
    start = time.perf_counter()
    plan = kfold_split(log, k, seed)

    def predictor_for_fold(fold: int):
        sub = log.sub_log(plan.complement_indices(fold))
        if sub.n_events == 0:
            return lambda p, t: None
        top = min(
            sub.resource_counts.items(), key=lambda kv: (-kv[1], _sort_key(kv[0]))
        )[0]
        return lambda p, t: top

    per_activity, correct = _score(log, plan, predictor_for_fold)
    elapsed = time.perf_counter() - start
    return EvalReport(
        per_activity=per_activity,
        n=log.n_events,
        correct=correct,
        elapsed=elapsed,
        k=k,
        seed=seed,
        params=None,
    )
