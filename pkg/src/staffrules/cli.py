"""Command-line surface: gen, ingest/stats, mine, recommend, evaluate, sweep.

Exit codes: 0 success, 1 usage error, 2 data error, 3 candidate budget
exceeded.  Errors print one machine-parseable line to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import (
    BudgetExceededError,
    DataError,
    StaffrulesError,
    UsageError,
)
from .eventlog import (
    CleaningConfig,
    EventLog,
    FormatConfig,
    clean_log,
    frequency_stats,
    parse_log,
    write_log,
)
from .evaluate import evaluate, majority_baseline
from .rules import (
    AnnotatedRuleSet,
    MiningParams,
    Recommendation,
    byproduct_rules,
    recommend,
    render_text,
    three_stage,
)
from .synth import GeneratorSpec, generate, load_bundled_spec

CONFIG_ENV_VAR = "STAFFRULES_CONFIG"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def _round_floats(obj, sig: int = 12):
    """Normalize floats to 12 significant digits for stable JSON output."""
    if isinstance(obj, float):
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v, sig) for v in obj]
    return obj


def _dump_json(obj, path: Optional[str]) -> None:
    text = json.dumps(_round_floats(obj), sort_keys=True, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _default_config() -> dict:
    path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path} is not valid JSON: {exc}") from exc


def _add_format_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input format")
    g.add_argument("--col-event-id", default=None)
    g.add_argument("--col-process", default=None)
    g.add_argument("--col-task", default=None)
    g.add_argument("--col-resource", default=None)
    g.add_argument("--col-case", default=None)
    g.add_argument("--col-timestamp", default=None)
    g.add_argument("--col-event-type", default=None)
    g.add_argument("--delimiter", default=None)
    g.add_argument("--timestamp-format", default=None)
    g.add_argument(
        "--drop-event-type",
        action="append",
        default=[],
        metavar="TOKEN",
        help="event type tokens to filter out during cleaning (repeatable)",
    )


def _format_config(args) -> FormatConfig:
    cfg = _default_config()
    overrides = {
        "event_id": args.col_event_id,
        "process": args.col_process,
        "task": args.col_task,
        "resource": args.col_resource,
        "case": args.col_case,
        "timestamp": args.col_timestamp,
        "event_type": args.col_event_type,
        "delimiter": args.delimiter,
        "timestamp_format": args.timestamp_format,
    }
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = v
    return FormatConfig.from_dict(cfg)


def _load_log(args) -> EventLog:
    fmt = _format_config(args)
    try:
        with open(args.log, newline="") as fh:
            log, errors = parse_log(fh, fmt)
    except OSError as exc:
        raise DataError(f"cannot read log {args.log}: {exc}") from exc
    if errors:
        print(f"warning: skipped {len(errors)} malformed row(s)", file=sys.stderr)
    cleaned, report = clean_log(
        log, CleaningConfig(drop_event_types=frozenset(args.drop_event_type))
    )
    dropped = report.input_count - report.kept_count
    if dropped:
        print(f"warning: cleaning dropped {dropped} event(s)", file=sys.stderr)
    return cleaned


def _add_mining_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("mining thresholds")
    g.add_argument(
        "--min-sup",
        type=float,
        default=1e-6,
        help="minimum support ratio (default 0.0001%%; the source material "
        "quotes both 0.001%% and 0.0001%% in different places)",
    )
    g.add_argument("--min-conf", type=float, default=0.05,
                   help="minimum confidence (default 0.05)")
    g.add_argument("--min-lift", type=float, default=None,
                   help="optional lift post-filter (default off)")
    g.add_argument("--budget", type=int, default=20_000,
                   help="candidate itemset budget (default 20000)")


def _mining_params(args) -> MiningParams:
    if not (0 < args.min_sup <= 1) or not (0 < args.min_conf <= 1):
        raise UsageError("--min-sup and --min-conf must lie in (0, 1]")
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    return MiningParams(
        min_sup=args.min_sup,
        min_conf=args.min_conf,
        min_lift=args.min_lift,
        candidate_budget=args.budget,
    )


def _load_spec(token: str) -> GeneratorSpec:
    if not token.endswith(".json") and not Path(token).exists():
        try:
            return load_bundled_spec(token)
        except FileNotFoundError:
            raise DataError(f"no bundled spec named {token!r}") from None
    try:
        return GeneratorSpec.from_json(Path(token).read_text())
    except OSError as exc:
        raise DataError(f"cannot read spec {token}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"spec {token} is not valid JSON: {exc}") from exc


def _cmd_gen(args) -> int:
    spec = _load_spec(args.spec)
    log = generate(spec, n_events=args.n_events, seed=args.seed)
    fmt = FormatConfig()
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            write_log(log, fh, fmt)
    else:
        write_log(log, sys.stdout, fmt)
    return 0


def _cmd_stats(args) -> int:
    log = _load_log(args)
    stats = frequency_stats(log)
    if args.format == "csv":
        if args.out and args.out != "-":
            with open(args.out, "w", newline="") as fh:
                stats.write_matrix_csv(fh)
        else:
            stats.write_matrix_csv(sys.stdout)
    else:
        _dump_json(stats.to_json_dict(), args.out)
    if args.plot:
        from .plots import plot_frequency_stats

        plot_frequency_stats(stats, Path(args.plot))
    return 0


def _cmd_mine(args) -> int:
    log = _load_log(args)
    if log.n_events == 0:
        raise DataError("empty log")
    params = _mining_params(args)
    ruleset = three_stage(log, params)
    _dump_json(ruleset.to_json_dict(), args.out)
    text = render_text(ruleset)
    if args.text:
        Path(args.text).write_text(text + "\n" if text else "")
    elif args.out and args.out != "-":
        print(text)
    if args.byproducts:
        rows = [r.to_json_dict() for r in byproduct_rules(log, params.min_sup, params.min_conf)]
        _dump_json(rows, args.byproducts)
    return 0


def _format_recommendation(rec: Recommendation) -> str:
    mark = "*" if rec.reserve else " "
    lift_s = f" lift:{rec.lift:.4f}" if rec.lift is not None else ""
    note = "  (reserve: primarily associated with other work)" if rec.reserve else ""
    return f"{mark}resource={rec.resource} conf:({rec.confidence:.4f}){lift_s}{note}"


def _cmd_recommend(args) -> int:
    try:
        model = AnnotatedRuleSet.from_json_dict(json.loads(Path(args.rules).read_text()))
    except OSError as exc:
        raise DataError(f"cannot read rules {args.rules}: {exc}") from exc
    except (json.JSONDecodeError, KeyError) as exc:
        raise DataError(f"rules file {args.rules} is malformed: {exc}") from exc
    recs = recommend(model, args.process, args.task, args.top_k)
    if args.format == "json":
        _dump_json(
            [
                {
                    "resource": r.resource,
                    "confidence": r.confidence,
                    "lift": r.lift,
                    "correlation": r.correlation,
                    "reserve": r.reserve,
                }
                for r in recs
            ],
            args.out,
        )
    else:
        for r in recs:
            print(_format_recommendation(r))
    return 0


def _cmd_evaluate(args) -> int:
    log = _load_log(args)
    if log.n_events == 0:
        raise DataError("empty log")
    if args.k < 2:
        raise UsageError("-k must be >= 2")
    params = _mining_params(args)
    if args.baseline:
        report = majority_baseline(log, args.k, args.seed)
    else:
        report = evaluate(log, args.k, args.seed, params)
    payload = report.to_json_dict()
    if args.timing:
        payload["elapsed_seconds"] = round(payload["elapsed_seconds"], 3)
    else:
        # wall time varies run to run; leave it out so identical inputs
        # produce byte-identical reports
        del payload["elapsed_seconds"]
    _dump_json(payload, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            report.write_activity_csv(fh, log)
    if args.plot:
        from .plots import plot_activity_precision

        plot_activity_precision(report, Path(args.plot))
    return 0


def _cmd_sweep(args) -> int:
    log = _load_log(args)
    if log.n_events == 0:
        raise DataError("empty log")
    try:
        sup_list = sorted({float(s) for s in args.min_sup_list.split(",")}, reverse=True)
    except ValueError:
        raise UsageError(f"bad --min-sup-list value: {args.min_sup_list!r}") from None
    if not sup_list or any(not (0 < s <= 1) for s in sup_list):
        raise UsageError("--min-sup-list values must lie in (0, 1]")
    rows: list[tuple[float, int, float]] = []
    for min_sup in sup_list:
        params = MiningParams(
            min_sup=min_sup,
            min_conf=args.min_conf,
            min_lift=args.min_lift,
            candidate_budget=args.budget,
        )
        ruleset = three_stage(log, params)
        rule_count = len(ruleset.rules())
        report = evaluate(log, args.k, args.seed, params)
        rows.append((min_sup, rule_count, report.precision))
    lines = ["min_sup,rule_count,overall_accuracy"]
    for min_sup, count, acc in rows:
        lines.append(f"{min_sup:.10g},{count},{acc:.6f}")
    text = "\n".join(lines) + "\n"
    if args.out and args.out != "-":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plots import plot_sweep

        plot_sweep(rows, Path(args.plot))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="staffrules", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic log from a spec")
    p.add_argument("spec", help="spec JSON path or bundled name (e.g. table3)")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--n-events", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("stats", help="frequency statistics of a log")
    p.add_argument("log")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--plot", metavar="DIR", default=None)
    _add_format_flags(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("mine", help="mine ranked allocation rules")
    p.add_argument("log")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--text", metavar="PATH", default=None,
                   help="also write the plain-text rule rendering here")
    p.add_argument("--byproducts", metavar="PATH", default=None,
                   help="also write resource=>process / task=>process rules as JSON")
    _add_format_flags(p)
    _add_mining_flags(p)
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("recommend", help="ranked resources for an activity")
    p.add_argument("rules", help="rule-set JSON written by `mine`")
    p.add_argument("-p", "--process", required=True)
    p.add_argument("-t", "--task", required=True)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("evaluate", help="k-fold cross-validated accuracy")
    p.add_argument("log")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", action="store_true",
                   help="score the global-majority baseline instead")
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the report (non-reproducible)")
    p.add_argument("--csv", metavar="PATH", default=None,
                   help="also write per-activity precision CSV")
    p.add_argument("--plot", metavar="DIR", default=None)
    _add_format_flags(p)
    _add_mining_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="re-mine and re-evaluate per support threshold")
    p.add_argument("log")
    p.add_argument("--min-sup-list", required=True,
                   help="comma-separated support thresholds")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-conf", type=float, default=0.05)
    p.add_argument("--min-lift", type=float, default=None)
    p.add_argument("--budget", type=int, default=20_000)
    p.add_argument("--plot", metavar="DIR", default=None)
    _add_format_flags(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"error: budget: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2
    except StaffrulesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
