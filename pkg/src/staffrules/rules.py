"""Allocation rules: process AND task => resource.

From frequent 3-itemsets only the process/task => resource form is
emitted; the remaining subset-derived rule forms are discarded, except
the resource=>process and task=>process by-products which have their own
entry point.  Rules carry support, confidence and lift, all computed
from integer counts with the division done last.  Rules whose lift is
below 1 are annotated as negatively correlated but kept: they remain
valid assignments, just ones whose performer is primarily busy elsewhere.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .apriori import (
    DIM_PROCESS,
    DIM_RESOURCE,
    DIM_TASK,
    FrequentLevels,
    Item,
    Itemset,
    mine_frequent_3,
)
from .errors import (
    EmptyLogError,
    NoRuleError,
    NoSuchActivityError,
    ZeroMarginalError,
)
from .eventlog import EventLog, _sort_key

CORR_POSITIVE = "positive"
CORR_INDEPENDENT = "independent"
CORR_NEGATIVE = "negative"

_LIFT_INDEPENDENT_TOL = 1e-12


@dataclass(frozen=True)
class MiningParams:
    min_sup: float
    min_conf: float
    min_lift: Optional[float] = None
    candidate_budget: int = 20_000

    def to_json_dict(self) -> dict:
        d = {
            "min_sup": self.min_sup,
            "min_conf": self.min_conf,
            "candidate_budget": self.candidate_budget,
        }
        if self.min_lift is not None:
            d["min_lift"] = self.min_lift
        return d

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "MiningParams":
        return cls(
            min_sup=d["min_sup"],
            min_conf=d["min_conf"],
            min_lift=d.get("min_lift"),
            candidate_budget=d.get("candidate_budget", 20_000),
        )


@dataclass(frozen=True)
class PtrRule:
    process: str
    task: str
    resource: str
    lhs_count: int
    rule_count: int
    support: float
    confidence: float
    lift: Optional[float] = None
    correlation: Optional[str] = None

    @property
    def activity(self) -> tuple[str, str]:
        return (self.process, self.task)

    def to_json_dict(self) -> dict:
        return {
            "resource": self.resource,
            "rule_count": self.rule_count,
            "support": self.support,
            "confidence": self.confidence,
            "lift": self.lift,
            "correlation": self.correlation,
        }


@dataclass(frozen=True)
class ByproductRule:
    kind: str  # "RP" or "TP"
    lhs: str
    rhs: str
    lhs_count: int
    rule_count: int
    support: float
    confidence: float

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "lhs_count": self.lhs_count,
            "rule_count": self.rule_count,
            "support": self.support,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class AnnotatedRuleSet:
    """Rules grouped by (process, task) plus the parameters that mined them.

    activity_counts carries every activity seen in the training log, so
    "activity known but ruleless" is distinguishable from "never seen".
    """

    groups: Mapping[tuple[str, str], tuple[PtrRule, ...]]
    params: MiningParams
    n_events: int
    activity_counts: Mapping[tuple[str, str], int]

    def rules(self) -> list[PtrRule]:
        return [r for g in self.groups.values() for r in g]

    def sorted_activity_keys(self) -> list[tuple[str, str]]:
        return sorted(self.activity_counts, key=lambda k: (_sort_key(k[0]), _sort_key(k[1])))

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.to_json_dict(),
            "n_events": self.n_events,
            "activities": [
                {
                    "process": p,
                    "task": t,
                    "lhs_count": self.activity_counts[(p, t)],
                    "rules": [r.to_json_dict() for r in self.groups.get((p, t), ())],
                }
                for p, t in self.sorted_activity_keys()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "AnnotatedRuleSet":
        groups: dict[tuple[str, str], tuple[PtrRule, ...]] = {}
        counts: dict[tuple[str, str], int] = {}
        for act in d["activities"]:
            key = (act["process"], act["task"])
            counts[key] = act["lhs_count"]
            if act["rules"]:
                groups[key] = tuple(
                    PtrRule(
                        process=act["process"],
                        task=act["task"],
                        resource=r["resource"],
                        lhs_count=act["lhs_count"],
                        rule_count=r["rule_count"],
                        support=r["support"],
                        confidence=r["confidence"],
                        lift=r.get("lift"),
                        correlation=r.get("correlation"),
                    )
                    for r in act["rules"]
                )
        return cls(
            groups=groups,
            params=MiningParams.from_json_dict(d["params"]),
            n_events=d["n_events"],
            activity_counts=counts,
        )


def support(log: EventLog, items: Iterable[Item] | Itemset) -> float:
    """Fraction of log events matching every item; 1.0 for the empty set."""
    if log.n_events == 0:
        raise EmptyLogError("support is undefined on an empty log")
    from .apriori import _count_key

    if isinstance(items, Itemset):
        items = items.items
    return _count_key(tuple(items), log) / log.n_events


def confidence(log: EventLog, lhs: tuple[str, str], resource: str) -> float:
    """Conditional probability of the resource given the activity."""
    p, t = lhs
    lhs_count = log.activity_counts.get((p, t), 0)
    if lhs_count == 0:
        raise NoSuchActivityError(f"activity ({p}, {t}) does not occur in the log")
    return log.triple_counts.get((p, t, resource), 0) / lhs_count


def lift(log: EventLog, rule: PtrRule) -> float:
    """confidence / marginal support of the resource."""
    marginal = log.resource_counts.get(rule.resource, 0)
    if marginal == 0:
        raise ZeroMarginalError(f"resource {rule.resource!r} absent from the log")
    return rule.confidence / (marginal / log.n_events)


def generate_ptr_rules(
    levels: FrequentLevels, log: EventLog, min_conf: float
) -> AnnotatedRuleSet:
    """Emit exactly one process AND task => resource rule per frequent
    3-itemset, keeping those with confidence >= min_conf."""
    n = log.n_events
    groups: dict[tuple[str, str], list[PtrRule]] = {}
    for itemset in levels.f3:
        by_dim = {it.dimension: it.value for it in itemset.items}
        p, t, r = by_dim[DIM_PROCESS], by_dim[DIM_TASK], by_dim[DIM_RESOURCE]
        lhs_count = log.activity_counts[(p, t)]
        conf = itemset.support_count / lhs_count
        if conf < min_conf:
            continue
        groups.setdefault((p, t), []).append(
            PtrRule(
                process=p,
                task=t,
                resource=r,
                lhs_count=lhs_count,
                rule_count=itemset.support_count,
                support=itemset.support_count / n,
                confidence=conf,
            )
        )
    return AnnotatedRuleSet(
        groups={k: tuple(v) for k, v in groups.items()},
        params=MiningParams(
            min_sup=levels.min_sup,
            min_conf=min_conf,
            candidate_budget=levels.candidate_budget,
        ),
        n_events=n,
        activity_counts=dict(log.activity_counts),
    )


def _classify(lift_value: float) -> str:
    if abs(lift_value - 1.0) <= _LIFT_INDEPENDENT_TOL:
        return CORR_INDEPENDENT
    return CORR_NEGATIVE if lift_value < 1.0 else CORR_POSITIVE


def annotate(ruleset: AnnotatedRuleSet, log: EventLog) -> AnnotatedRuleSet:
    """Attach lift and correlation to every rule.  Negatively correlated
    rules stay in the set; the annotation is advisory."""
    groups = {
        key: tuple(
            replace(r, lift=(lv := lift(log, r)), correlation=_classify(lv))
            for r in rules
        )
        for key, rules in ruleset.groups.items()
    }
    return replace(ruleset, groups=groups)


def _rank_key(rule: PtrRule):
    return (-rule.confidence, -rule.rule_count, _sort_key(rule.resource))


def rank(ruleset: AnnotatedRuleSet) -> AnnotatedRuleSet:
    """Order each activity group by confidence descending; ties break on
    rule_count descending, then resource id ascending."""
    groups = {
        key: tuple(sorted(rules, key=_rank_key))
        for key, rules in ruleset.groups.items()
    }
    return replace(ruleset, groups=groups)


def apply_min_lift(ruleset: AnnotatedRuleSet, min_lift: float) -> AnnotatedRuleSet:
    """Optional post-filter dropping rules below a lift threshold."""
    groups = {}
    for key, rules in ruleset.groups.items():
        kept = tuple(r for r in rules if r.lift is not None and r.lift >= min_lift)
        if kept:
            groups[key] = kept
    return replace(
        ruleset, groups=groups, params=replace(ruleset.params, min_lift=min_lift)
    )


def three_stage(log: EventLog, params: MiningParams) -> AnnotatedRuleSet:
    """Mine, generate, annotate and rank in one pass."""
    levels = mine_frequent_3(log, params.min_sup, params.candidate_budget)
    ruleset = generate_ptr_rules(levels, log, params.min_conf)
    ruleset = rank(annotate(ruleset, log))
    if params.min_lift is not None:
        ruleset = apply_min_lift(ruleset, params.min_lift)
    return ruleset


@dataclass(frozen=True)
class Recommendation:
    resource: str
    confidence: float
    lift: Optional[float]
    correlation: Optional[str]

    @property
    def reserve(self) -> bool:
        """Negatively correlated performers are better kept in reserve
        for the work they are primarily associated with."""
        return self.correlation == CORR_NEGATIVE


def recommend(
    model: AnnotatedRuleSet,
    process: str,
    task: str,
    top_k: Optional[int] = None,
) -> list[Recommendation]:
    """Ranked candidate list for an activity; the head is the default
    assignment.  Unknown activities raise; known-but-ruleless return []."""
    key = (process, task)
    if key not in model.activity_counts:
        raise NoRuleError(f"activity ({process}, {task}) unknown to the model")
    rules = model.groups.get(key, ())
    out = [
        Recommendation(r.resource, r.confidence, r.lift, r.correlation) for r in rules
    ]
    return out[:top_k] if top_k is not None else out


def byproduct_rules(
    log: EventLog, min_sup: float, min_conf: float
) -> list[ByproductRule]:
    """RP (resource => process) and TP (task => process) rules with the
    same threshold semantics as the main rule form."""
    from .apriori import support_count_threshold

    n = log.n_events
    if n == 0:
        return []
    threshold = support_count_threshold(min_sup, n)
    out: list[ByproductRule] = []
    for kind, pair_counts, lhs_counts in (
        ("RP", log.pair_pr_counts, log.resource_counts),
        ("TP", log.activity_counts, log.task_counts),
    ):
        for key, count in pair_counts.items():
            if kind == "RP":
                p, lhs = key
            else:
                p, lhs = key[0], key[1]
            if count < threshold:
                continue
            lhs_count = lhs_counts[lhs]
            conf = count / lhs_count
            if conf < min_conf:
                continue
            out.append(
                ByproductRule(
                    kind=kind,
                    lhs=lhs,
                    rhs=p,
                    lhs_count=lhs_count,
                    rule_count=count,
                    support=count / n,
                    confidence=conf,
                )
            )
    out.sort(key=lambda r: (r.kind, _sort_key(r.lhs), _sort_key(r.rhs)))
    return out


def weighted_mean_residual(log: EventLog, resource: str) -> float:
    """Residual of the identity: the activity-count-weighted mean of the
    per-activity confidences toward a resource equals its marginal
    support.  Computed over all activities, unthresholded."""
    marginal = log.resource_counts.get(resource, 0)
    if marginal == 0:
        raise ZeroMarginalError(f"resource {resource!r} absent from the log")
    num = 0.0
    den = 0
    for (p, t), lhs_count in log.activity_counts.items():
        conf = log.triple_counts.get((p, t, resource), 0) / lhs_count
        num += conf * lhs_count
        den += lhs_count
    return abs(num / den - marginal / log.n_events)


def format_ratio(value: float, places: int = 4) -> str:
    return f"{value:.{places}f}"


def render_rule(rule: PtrRule) -> str:
    prefix = "*" if rule.correlation == CORR_NEGATIVE else ""
    line = (
        f"{prefix}process={rule.process} task={rule.task} {rule.lhs_count} "
        f"==> resource={rule.resource} {rule.rule_count} "
        f"conf:({format_ratio(rule.confidence)})"
    )
    if rule.lift is not None:
        line += f" lift:{format_ratio(rule.lift)}"
    return line


def render_text(ruleset: AnnotatedRuleSet) -> str:
    lines = []
    for key in ruleset.sorted_activity_keys():
        for rule in ruleset.groups.get(key, ()):
            lines.append(render_rule(rule))
    return "\n".join(lines)
