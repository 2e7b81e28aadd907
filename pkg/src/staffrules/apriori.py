"""Level-wise Apriori mining of dimension-tagged frequent itemsets.

Items are (dimension, value) pairs over the three log dimensions.  The
level loop stops at 3-itemsets since rule generation only consumes
triples; the dimension constraint (at most one item per dimension) is
enforced inside the join so no invalid candidate is ever counted.
Support counting is a hash-indexed lookup against the log's count
indexes, which is count-identical to the per-transaction subset walk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Collection, Iterable

from .errors import BudgetExceededError, ContractViolationError
from .eventlog import EventLog

DIM_PROCESS = "process"
DIM_TASK = "task"
DIM_RESOURCE = "resource"
DIMENSIONS = (DIM_PROCESS, DIM_TASK, DIM_RESOURCE)
_DIM_ORDER = {d: i for i, d in enumerate(DIMENSIONS)}


@dataclass(frozen=True, order=True)
class Item:
    dimension: str
    value: str


ItemKey = frozenset  # frozenset[Item]


def _canon(items: Iterable[Item]) -> tuple[Item, ...]:
    return tuple(sorted(items, key=lambda it: (_DIM_ORDER[it.dimension], it.value)))


@dataclass(frozen=True)
class Itemset:
    items: tuple[Item, ...]
    support_count: int
    support: float

    @property
    def key(self) -> ItemKey:
        return frozenset(self.items)

    def to_json_dict(self) -> dict:
        return {
            "items": [{"dim": it.dimension, "value": it.value} for it in self.items],
            "support_count": self.support_count,
            "support": self.support,
        }


@dataclass(frozen=True)
class FrequentLevels:
    f1: tuple[Itemset, ...]
    f2: tuple[Itemset, ...]
    f3: tuple[Itemset, ...]
    min_sup: float
    candidate_budget: int
    n_events: int

    def level(self, k: int) -> tuple[Itemset, ...]:
        return (self.f1, self.f2, self.f3)[k - 1]

    def to_json_dict(self) -> dict:
        return {
            "min_sup": self.min_sup,
            "candidate_budget": self.candidate_budget,
            "n_events": self.n_events,
            "levels": {
                str(k): [s.to_json_dict() for s in self.level(k)] for k in (1, 2, 3)
            },
        }


def support_count_threshold(min_sup: float, n_events: int) -> int:
    """Absolute count threshold for a relative min_sup; itemsets with
    support exactly equal to min_sup are kept."""
    return max(1, math.ceil(round(min_sup * n_events, 9)))


def _item_counts(log: EventLog) -> dict[Item, int]:
    counts: dict[Item, int] = {}
    for p, n in log.process_counts.items():
        counts[Item(DIM_PROCESS, p)] = n
    for t, n in log.task_counts.items():
        counts[Item(DIM_TASK, t)] = n
    for r, n in log.resource_counts.items():
        counts[Item(DIM_RESOURCE, r)] = n
    return counts


def _count_key(items: Collection[Item], log: EventLog) -> int:
    """Exact match count for a dimension-valid itemset of size 1..3."""
    by_dim = {it.dimension: it.value for it in items}
    if len(by_dim) != len(items):
        return 0  # repeated dimension can never match a single event
    p, t, r = by_dim.get(DIM_PROCESS), by_dim.get(DIM_TASK), by_dim.get(DIM_RESOURCE)
    if p is not None and t is not None and r is not None:
        return log.triple_counts.get((p, t, r), 0)
    if p is not None and t is not None:
        return log.activity_counts.get((p, t), 0)
    if p is not None and r is not None:
        return log.pair_pr_counts.get((p, r), 0)
    if t is not None and r is not None:
        return log.pair_tr_counts.get((t, r), 0)
    if p is not None:
        return log.process_counts.get(p, 0)
    if t is not None:
        return log.task_counts.get(t, 0)
    if r is not None:
        return log.resource_counts.get(r, 0)
    return log.n_events


def find_frequent_1(log: EventLog, min_sup: float) -> tuple[Itemset, ...]:
    """All single items whose support meets min_sup, with exact counts."""
    n = log.n_events
    if n == 0:
        return ()
    threshold = support_count_threshold(min_sup, n)
    out = [
        Itemset((item,), count, count / n)
        for item, count in _item_counts(log).items()
        if count >= threshold
    ]
    out.sort(key=lambda s: _canon(s.items))
    return tuple(out)


def has_infrequent_subset(candidate: Collection[Item], f_prev: Collection[ItemKey]) -> bool:
    """True iff some (k-1)-subset of the candidate is absent from F_{k-1}.
    Vacuously false for candidates of size <= 1."""
    items = list(candidate)
    if len(items) <= 1:
        return False
    prev = set(f_prev)
    for i in range(len(items)):
        subset = frozenset(items[:i] + items[i + 1 :])
        if subset not in prev:
            return True
    return False


def apriori_gen(f_prev: Collection[Collection[Item]]) -> set[ItemKey]:
    """Join F_{k-1} with itself, then prune candidates with an infrequent
    subset.  The one-item-per-dimension constraint is applied at the join."""
    ordered = [_canon(s if not isinstance(s, Itemset) else s.items) for s in f_prev]
    if not ordered:
        return set()
    sizes = {len(s) for s in ordered}
    if len(sizes) != 1:
        raise ContractViolationError(
            f"apriori_gen requires uniform itemset size, got sizes {sorted(sizes)}"
        )
    ordered.sort()
    keys = {frozenset(s) for s in ordered}
    candidates: set[ItemKey] = set()
    for i, l1 in enumerate(ordered):
        for l2 in ordered[i + 1 :]:
            if l1[:-1] != l2[:-1]:
                continue
            a, b = l1[-1], l2[-1]
            if a.dimension == b.dimension:
                continue
            cand = _canon(l1 + (b,))
            dims = {it.dimension for it in cand}
            if len(dims) != len(cand):
                continue
            if has_infrequent_subset(cand, keys):
                continue
            candidates.add(frozenset(cand))
    return candidates


def mine_frequent_3(
    log: EventLog, min_sup: float, candidate_budget: int
) -> FrequentLevels:
    """Run the level-wise loop for k = 1..3 and return all three levels.

    candidate_budget bounds the total number of candidate itemsets held
    across levels; exceeding it raises BudgetExceededError naming the
    level.
    """
    n = log.n_events
    empty = FrequentLevels((), (), (), min_sup, candidate_budget, n)
    if n == 0:
        return empty
    threshold = support_count_threshold(min_sup, n)

    held = len(_item_counts(log))
    if held > candidate_budget:
        raise BudgetExceededError(1, held, candidate_budget)
    f1 = find_frequent_1(log, min_sup)

    levels: list[tuple[Itemset, ...]] = [f1]
    prev = f1
    for k in (2, 3):
        if not prev:
            levels.append(())
            prev = ()
            continue
        cands = apriori_gen(prev)
        held += len(cands)
        if held > candidate_budget:
            raise BudgetExceededError(k, held, candidate_budget)
        fk = [
            Itemset(_canon(c), count, count / n)
            for c in cands
            if (count := _count_key(c, log)) >= threshold
        ]
        fk.sort(key=lambda s: _canon(s.items))
        levels.append(tuple(fk))
        prev = tuple(fk)

    return FrequentLevels(levels[0], levels[1], levels[2], min_sup, candidate_budget, n)
