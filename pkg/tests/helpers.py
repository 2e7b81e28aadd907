"""Shared test utilities: an independent brute-force mining oracle and
constructed fixture logs.

The oracle counts candidate itemsets with the classic per-transaction
subset walk, deliberately avoiding the library's hash-join counting so
the two paths stay independent.
"""
from __future__ import annotations

import random
from collections import Counter
from datetime import datetime, timedelta

from staffrules import Event, EventLog
from staffrules.apriori import support_count_threshold


def oracle_frequent(log: EventLog, min_sup: float) -> dict[int, dict[frozenset, int]]:
    """Brute-force frequent itemsets by level (1..3).

    Keys are frozensets of (dimension, value) pairs; values are counts.
    """
    n = log.n_events
    counts: Counter = Counter()
    for e in log:
        p = ("process", e.process)
        t = ("task", e.task)
        r = ("resource", e.resource)
        for subset in (
            (p,), (t,), (r,),
            (p, t), (p, r), (t, r),
            (p, t, r),
        ):
            counts[frozenset(subset)] += 1
    threshold = support_count_threshold(min_sup, n) if n else 0
    out: dict[int, dict[frozenset, int]] = {1: {}, 2: {}, 3: {}}
    for key, c in counts.items():
        if c >= threshold:
            out[len(key)][key] = c
    return out


def oracle_rules(log: EventLog, min_sup: float, min_conf: float) -> dict[tuple, dict]:
    """Brute-force rule enumeration: every (p, t, r) triple meeting the
    support threshold, kept when count(p,t,r)/count(p,t) >= min_conf.

    Returns {(p, t, r): {"rule_count", "lhs_count", "confidence", "lift"}}.
    """
    n = log.n_events
    triple_counts: Counter = Counter()
    lhs_counts: Counter = Counter()
    res_counts: Counter = Counter()
    for e in log:
        triple_counts[(e.process, e.task, e.resource)] += 1
        lhs_counts[(e.process, e.task)] += 1
        res_counts[e.resource] += 1
    threshold = support_count_threshold(min_sup, n) if n else 0
    out = {}
    for (p, t, r), c in triple_counts.items():
        if c < threshold:
            continue
        conf = c / lhs_counts[(p, t)]
        if conf < min_conf:
            continue
        out[(p, t, r)] = {
            "rule_count": c,
            "lhs_count": lhs_counts[(p, t)],
            "confidence": conf,
            "lift": conf / (res_counts[r] / n),
        }
    return out


def make_log(triples, case_ids=None) -> EventLog:
    """Build a log from (process, task, resource) triples; each event gets
    its own case unless case_ids is given."""
    base = datetime(2020, 1, 1, 9, 0)
    events = []
    for i, (p, t, r) in enumerate(triples):
        case = case_ids[i] if case_ids else f"c{i}"
        events.append(
            Event(
                event_id=str(i + 1),
                process=p,
                task=t,
                resource=r,
                case_id=case,
                timestamp=base + timedelta(minutes=i),
            )
        )
    return EventLog(events)


# One dominant activity with a planted confidence/lift rank order: 13 named
# resources whose marginals are sized so that exactly the last ten fall
# below lift 1.  Filler resources keep the head activity's denominator at
# 1053 while staying below any reasonable support threshold.
SKEW_RULES = [
    # (resource, count within the head activity, target lift)
    ("4", 541, 7.4014),
    ("17", 209, 4.6118),
    ("19", 99, 1.8338),
    ("5", 64, 0.8017),
    ("6", 56, 0.7523),
    ("12", 10, 0.1387),
    ("2", 8, 0.1565),
    ("8", 7, 0.1605),
    ("9", 7, 0.1901),
    ("20", 7, 0.1315),
    ("7", 6, 0.1091),
    ("10", 6, 0.1357),
    ("18", 6, 0.1315),
]
SKEW_HEAD = ("6", "9")  # the dominant activity
SKEW_LHS_COUNT = 1053
SKEW_N = 20_000
SKEW_MIN_SUP = 6 / SKEW_N
SKEW_MIN_CONF = 0.005
SKEW_N_FILLERS = SKEW_LHS_COUNT - sum(c for _r, c, _l in SKEW_RULES)  # 27


def skewed_activity_log() -> EventLog:
    """20k-event log realizing SKEW_RULES exactly within the head activity,
    with resource marginals tuned to reproduce the target lifts."""
    triples = []
    hp, ht = SKEW_HEAD
    for r, count, _lift in SKEW_RULES:
        triples.extend([(hp, ht, r)] * count)
    fillers = [f"x{i}" for i in range(1, SKEW_N_FILLERS + 1)]
    for f in fillers:
        triples.append((hp, ht, f))
    assert len(triples) == SKEW_LHS_COUNT

    # Remaining occurrences of each named resource live in a second
    # activity so its marginal hits round(N * conf / lift).
    for r, count, lift in SKEW_RULES:
        conf = count / SKEW_LHS_COUNT
        marginal = round(SKEW_N * conf / lift)
        triples.extend([("1", "1", r)] * (marginal - count))
    for f in fillers:
        triples.extend([("1", "1", f)] * 9)
    triples.extend([("1", "1", "bulk")] * (SKEW_N - len(triples)))
    assert len(triples) == SKEW_N
    return make_log(triples)


def random_log(seed: int, max_events: int = 1000) -> EventLog:
    """Seeded random log: <= 5 processes, <= 8 tasks, <= 10 resources."""
    rng = random.Random(seed)
    n = rng.randint(50, max_events)
    n_p = rng.randint(1, 5)
    n_t = rng.randint(1, 8)
    n_r = rng.randint(1, 10)
    triples = [
        (
            str(rng.randint(1, n_p)),
            str(rng.randint(1, n_t)),
            str(rng.randint(1, n_r)),
        )
        for _ in range(n)
    ]
    return make_log(triples)
