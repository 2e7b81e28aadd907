"""Acceptance suite: one test per criterion, printing a pass line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.
"""
import time

import pytest

from staffrules import (
    EventLog,
    MiningParams,
    annotate,
    bayes_optimal_accuracy,
    confidence,
    evaluate,
    generate,
    generate_ptr_rules,
    load_bundled_spec,
    mine_frequent_3,
    rank,
    weighted_mean_residual,
)
from staffrules.cli import run
from staffrules.evaluate import ActivityScore, EvalReport
from staffrules.rules import CORR_NEGATIVE

from helpers import (
    SKEW_MIN_CONF,
    SKEW_MIN_SUP,
    SKEW_RULES,
    make_log,
    oracle_frequent,
    oracle_rules,
    random_log,
)


def _ok(name):
    print(f"\nACCEPTANCE {name}: PASS")


def _mine_rules(log, min_sup, min_conf):
    levels = mine_frequent_3(log, min_sup, 1_000_000)
    return rank(annotate(generate_ptr_rules(levels, log, min_conf), log))


def _counts_log(lhs_count, rule_count, resource="r"):
    triples = [("p", "t", resource)] * rule_count
    triples += [("p", "t", "other")] * (lhs_count - rule_count)
    return make_log(triples)


def test_c1_rule_arithmetic_regression():
    cases = [
        (206, 199, 0.9660, 0.0005, "0.97"),
        (1053, 541, 0.5138, 0.0001, None),
        (296, 276, 0.9324, 0.0005, "0.93"),
    ]
    for lhs, count, expected, tol, rendered in cases:
        conf = confidence(_counts_log(lhs, count), ("p", "t"), "r")
        assert conf == pytest.approx(expected, abs=tol)
        if rendered is not None:
            assert f"{conf:.2f}" == rendered
    _ok("1 rule-arithmetic regression")


def test_c2_overall_precision_arithmetic():
    report = EvalReport(
        per_activity={("all", "all"): ActivityScore(n=75934, correct=46663)},
        n=75934,
        correct=46663,
        elapsed=0.0,
        k=10,
        seed=0,
        params=None,
    )
    assert report.precision == pytest.approx(0.61452, abs=0.00001)
    _ok("2 overall precision arithmetic")


def test_c3_schematic_log_end_to_end(table2_log):
    mined = _mine_rules(table2_log, 0.15, 0.5)
    expected = oracle_rules(table2_log, 0.15, 0.5)
    got = {
        (r.process, r.task, r.resource): r for r in mined.rules()
    }
    assert set(got) == set(expected)
    for key, exp in expected.items():
        r = got[key]
        assert r.rule_count == exp["rule_count"]
        assert r.lhs_count == exp["lhs_count"]
        assert r.confidence == exp["confidence"]
    tony = got[("66", "A", "Tony")]
    assert tony.confidence == pytest.approx(5 / 6, abs=1e-12)
    assert tony.lift == pytest.approx(110 / 42, abs=1e-12)
    _ok("3 schematic-log end to end vs oracle")


def test_c4_oracle_equivalence_at_scale():
    start = time.perf_counter()
    min_confs = (0.0, 0.05, 0.2)
    for seed in range(50):
        log = random_log(seed, max_events=1000)
        min_sup = ((seed % 7) + 1) * 4 / 1024  # binary-exact thresholds
        min_conf = min_confs[seed % 3]
        levels = mine_frequent_3(log, min_sup, 1_000_000)
        expected_levels = oracle_frequent(log, min_sup)
        for k in (1, 2, 3):
            got = {
                frozenset((it.dimension, it.value) for it in s.items): s.support_count
                for s in levels.level(k)
            }
            assert got == expected_levels[k], f"seed {seed} level {k}"

        mined = generate_ptr_rules(levels, log, min_conf)
        got_rules = {
            (r.process, r.task, r.resource): (r.rule_count, r.lhs_count)
            for r in mined.rules()
        }
        expected_rules = {
            key: (v["rule_count"], v["lhs_count"])
            for key, v in oracle_rules(log, min_sup, min_conf).items()
        }
        assert got_rules == expected_rules, f"seed {seed} rules"
    elapsed = time.perf_counter() - start
    assert elapsed < 30
    _ok(f"4 oracle equivalence on 50 random logs ({elapsed:.1f}s)")


def test_c5_identity_suite(table1_log, table2_log, skew_log):
    logs = [table1_log, table2_log, skew_log]
    logs.append(generate(load_bundled_spec(), n_events=2000))
    logs.extend(random_log(seed) for seed in (100, 101))

    for log in logs:
        n = log.n_events
        # activity count totals are exact
        assert sum(log.activity_counts.values()) == n
        assert sum(log.triple_counts.values()) == n
        # weighted-mean identity per resource
        for resource in log.resource_counts:
            assert weighted_mean_residual(log, resource) <= 1e-9
        # unthresholded confidences sum to one per activity
        for act in log.activity_counts:
            total = sum(
                confidence(log, act, r) for r in log.resource_counts
            )
            assert total == pytest.approx(1.0, abs=1e-9)
        # duplicating every event changes no measure and no ranking
        doubled = EventLog(list(log.events) * 2)
        a = _mine_rules(log, 0.01, 0.05)
        b = _mine_rules(doubled, 0.01, 0.05)
        assert set(a.groups) == set(b.groups)
        for key in a.groups:
            fa = [
                (r.resource, r.support, r.confidence, r.lift, r.correlation)
                for r in a.groups[key]
            ]
            fb = [
                (r.resource, r.support, r.confidence, r.lift, r.correlation)
                for r in b.groups[key]
            ]
            assert fa == fb
    _ok("5 identity suite")


def test_c6_annotation_correctness(skew_log):
    mined = _mine_rules(skew_log, SKEW_MIN_SUP, SKEW_MIN_CONF)
    group = mined.groups[("6", "9")]
    assert [r.resource for r in group] == [r for r, _c, _l in SKEW_RULES]
    negatives = [r.resource for r in group if r.correlation == CORR_NEGATIVE]
    assert negatives == [r for r, _c, lift in SKEW_RULES if lift < 1]
    assert len(negatives) == 10  # ranked positions 4..13
    rule4 = group[3]
    assert rule4.resource == "5"
    assert rule4.lift == pytest.approx(0.8017, abs=0.001)
    _ok("6 annotation correctness")


def test_c7_classifier_ceiling_on_synthetic_data():
    start = time.perf_counter()
    spec = load_bundled_spec()
    log = generate(spec)  # 100,000 events per the bundled spec
    assert log.n_events == 100_000
    ceiling = bayes_optimal_accuracy(spec)
    report = evaluate(log, 10, 0, MiningParams(min_sup=1e-6, min_conf=0.05))
    assert report.precision == pytest.approx(ceiling, abs=0.02)
    elapsed = time.perf_counter() - start
    assert elapsed < 60
    _ok(
        f"7 classifier ceiling: cv={report.precision:.5f} "
        f"ceiling={ceiling:.5f} ({elapsed:.1f}s)"
    )


def test_c8_threshold_sweep_shape():
    start = time.perf_counter()
    spec = load_bundled_spec()
    log = generate(spec)
    ceiling = bayes_optimal_accuracy(spec)
    sups = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]  # descending
    rule_counts = []
    accuracies = []
    for min_sup in sups:
        params = MiningParams(min_sup=min_sup, min_conf=0.05)
        rule_counts.append(len(_mine_rules(log, min_sup, 0.05).rules()))
        accuracies.append(evaluate(log, 10, 0, params).precision)
    # rule counts grow as the threshold drops
    assert rule_counts == sorted(rule_counts)
    # accuracy never drops as the threshold drops
    for lo, hi in zip(accuracies, accuracies[1:]):
        assert hi >= lo - 1e-12
    # and plateaus at the ceiling
    assert accuracies[-1] == pytest.approx(ceiling, abs=0.02)
    assert abs(accuracies[-1] - accuracies[-2]) <= 0.005
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    _ok(
        f"8 threshold sweep shape: rules {rule_counts}, "
        f"accuracy {[round(a, 4) for a in accuracies]} ({elapsed:.1f}s)"
    )


def test_c9_command_determinism(tmp_path):
    log_path = tmp_path / "log.csv"
    outs = {}
    for tag in ("a", "b"):
        gen_out = tmp_path / f"gen_{tag}.csv"
        assert run(["gen", "table3", "--n-events", "1500", "-o", str(gen_out)]) == 0
        if tag == "a":
            log_path.write_bytes(gen_out.read_bytes())
        mine_out = tmp_path / f"mine_{tag}.json"
        assert run(
            ["mine", str(log_path), "--min-sup", "0.001", "--min-conf", "0.05",
             "-o", str(mine_out), "--text", str(tmp_path / f"text_{tag}.txt")]
        ) == 0
        stats_out = tmp_path / f"stats_{tag}.json"
        assert run(["stats", str(log_path), "-o", str(stats_out)]) == 0
        eval_out = tmp_path / f"eval_{tag}.json"
        assert run(
            ["evaluate", str(log_path), "-k", "3", "--seed", "4",
             "--min-sup", "0.001", "--min-conf", "0.05", "-o", str(eval_out)]
        ) == 0
        sweep_out = tmp_path / f"sweep_{tag}.csv"
        assert run(
            ["sweep", str(log_path), "--min-sup-list", "0.01,0.001",
             "-k", "2", "--seed", "4", "-o", str(sweep_out)]
        ) == 0
        outs[tag] = [gen_out, mine_out, tmp_path / f"text_{tag}.txt",
                     stats_out, eval_out, sweep_out]
    for fa, fb in zip(outs["a"], outs["b"]):
        assert fa.read_bytes() == fb.read_bytes(), fa.name
    _ok("9 command determinism")
