"""Command-line front end: campaign driver, store queries, report tables.

Subcommands
    campaign run --config FILE     drive simulated submissions day by day
    jobs poll                      status summary of the stored job log
    report KIND --out FILE         write one analysis CSV from the log
    store export --out FILE        dump the log (optionally filtered) as CSV

Exit codes: 0 success, 2 configuration problem, 3 store problem, 4 empty
report.  The store path resolves as --store flag, then the config file's
``store`` key (campaign only), then $QBENCH_STORE, then ./qbench_jobs.jsonl.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from .analysis import REPORT_KINDS, benchmark_fidelity, write_report
from .circuit import build_benchmark, random_input
from .costing import Money
from .providers import (
    DAY,
    JobStatus,
    PRESET_NAMES,
    QueueModel,
    SimProvider,
    TargetProfile,
    target_profile,
)
from .rng import derive_seed
from .simulator import GlobalDepolarizing
from .store import JobRecord, JobStore, StoreError, default_store_path

DEFAULT_SEED = 20240917
SUBMIT_SPACING = 300  # seconds between consecutive submissions in a sweep


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    qubits: tuple[int, ...]
    shots: int
    days: int
    sweeps_per_day: int
    seed: int
    store: str | None
    budget_cap: Money | None
    targets: tuple[TargetProfile, ...]


def _parse_qubits(text: str) -> tuple[int, ...]:
    """Accept ``8..16:2`` range syntax or a comma list like ``8,10,12``."""
    text = text.strip()
    if ".." in text:
        lo_part, _, rest = text.partition("..")
        hi_part, _, step_part = rest.partition(":")
        lo, hi = int(lo_part), int(hi_part)
        step = int(step_part) if step_part else 1
        if step <= 0 or hi < lo:
            raise ConfigError(f"bad qubits range {text!r}")
        values = tuple(range(lo, hi + 1, step))
    else:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    if not values or any(q < 2 or q > 60 for q in values):
        raise ConfigError(f"qubit sizes out of range in {text!r}")
    return values


_OVERRIDE_KEYS = {
    "f_2qg",
    "gate_limit",
    "qubits",
    "execution_seconds",
    "queue_mu",
    "queue_sigma",
    "queue_bias",
}


def _apply_overrides(profile: TargetProfile, section) -> TargetProfile:
    unknown = set(section) - _OVERRIDE_KEYS
    if unknown:
        raise ConfigError(f"unknown override keys for {profile.name}: {sorted(unknown)}")
    changes: dict = {}
    if "f_2qg" in section:
        changes["noise"] = GlobalDepolarizing(section.getfloat("f_2qg"))
    if "gate_limit" in section:
        raw = section.get("gate_limit").strip().lower()
        changes["gate_limit"] = None if raw == "none" else int(raw)
    if "qubits" in section:
        changes["qubits"] = section.getint("qubits")
    if "execution_seconds" in section:
        changes["execution_seconds"] = section.getint("execution_seconds")
    if {"queue_mu", "queue_sigma", "queue_bias"} & set(section):
        q = profile.queue
        changes["queue"] = QueueModel(
            mu=section.getfloat("queue_mu", q.mu),
            sigma=section.getfloat("queue_sigma", q.sigma),
            predictor_bias=section.getfloat("queue_bias", q.predictor_bias),
        )
    return dataclasses.replace(profile, **changes)


def load_config(path: str) -> CampaignConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc
    if "campaign" not in parser or "targets" not in parser:
        raise ConfigError("config needs [campaign] and [targets] sections")
    camp = parser["campaign"]
    try:
        qubits = _parse_qubits(camp.get("qubits", "8..16:2"))
        shots = camp.getint("shots", 500)
        days = camp.getint("days", 1)
        sweeps = camp.getint("sweeps_per_day", 1)
        env_seed = os.environ.get("QBENCH_SEED")
        seed = camp.getint(
            "seed", int(env_seed) if env_seed is not None else DEFAULT_SEED
        )
        cap_text = camp.get("budget_cap", "").strip()
        budget_cap = Money.from_usd(cap_text) if cap_text else None
        use = [p.strip() for p in parser["targets"].get("use", "").split(",") if p.strip()]
        if not use:
            raise ConfigError("[targets] use = must list at least one preset")
        targets = []
        for name in use:
            if name not in PRESET_NAMES:
                raise ConfigError(f"unknown target preset {name!r}")
            profile = target_profile(name)
            if parser.has_section(f"target:{name}"):
                profile = _apply_overrides(profile, parser[f"target:{name}"])
            targets.append(profile)
    except (ValueError, ArithmeticError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    if shots < 1 or days < 1 or sweeps < 1 or DAY % sweeps:
        raise ConfigError("shots/days/sweeps_per_day must be positive (sweeps divide a day)")
    return CampaignConfig(
        qubits=qubits,
        shots=shots,
        days=days,
        sweeps_per_day=sweeps,
        seed=seed,
        store=camp.get("store", None),
        budget_cap=budget_cap,
        targets=tuple(targets),
    )


def run_campaign(cfg: CampaignConfig, store_path: str) -> dict:
    store = JobStore(store_path)
    providers = {p.name: SimProvider(p) for p in cfg.targets}
    spent: dict[str, Money] = {p.name: Money(0) for p in cfg.targets}
    by_status: dict[str, int] = {}
    by_target: dict[str, dict] = {
        p.name: {"jobs": 0, "statuses": {}, "cost_usd": "$0.00"} for p in cfg.targets
    }
    skipped_budget = 0
    sweep_len = DAY // cfg.sweeps_per_day
    for day in range(cfg.days):
        for sweep in range(cfg.sweeps_per_day):
            idx = 0
            for profile in cfg.targets:
                provider = providers[profile.name]
                for q in cfg.qubits:
                    clock = day * DAY + sweep * sweep_len + idx * SUBMIT_SPACING
                    idx += 1
                    if cfg.budget_cap is not None and spent[profile.name] >= cfg.budget_cap:
                        skipped_budget += 1
                        continue
                    job_seed = derive_seed(cfg.seed, day, sweep, profile.name, q)
                    n = random_input(q, job_seed)
                    circuit = build_benchmark(q, n, seed=job_seed)
                    job_id = f"{profile.name}-d{day:02d}s{sweep}-q{q:02d}"
                    handle = provider.submit(
                        circuit, cfg.shots, clock, seed=job_seed, job_id=job_id
                    )
                    poll_clock = handle.exec_end if handle.exec_end is not None else clock
                    result = provider.poll(handle, poll_clock)
                    cost = provider.job_cost(handle)
                    fidelity = success = None
                    if result.status is JobStatus.PROCESSED:
                        score = benchmark_fidelity(result.counts, q, n)
                        fidelity, success = score.value, score.success
                    record = JobRecord(
                        job_id=job_id,
                        cloud=profile.cloud,
                        target=profile.name,
                        qubits=q,
                        shots=cfg.shots,
                        seed=job_seed,
                        submitted_at=clock,
                        status=result.status,
                        cost=cost,
                        executed_at=(
                            handle.exec_end
                            if result.status is JobStatus.PROCESSED
                            else None
                        ),
                        predicted_wait=handle.predicted_wait,
                        actual_wait=(
                            handle.actual_wait
                            if result.status is JobStatus.PROCESSED
                            else None
                        ),
                        census=handle.census,
                        counts=result.counts,
                        fidelity=fidelity,
                        success=success,
                        error_message=result.error_message,
                    )
                    store.append(record)
                    spent[profile.name] = spent[profile.name] + cost
                    by_status[result.status.value] = (
                        by_status.get(result.status.value, 0) + 1
                    )
                    slot = by_target[profile.name]
                    slot["jobs"] += 1
                    slot["statuses"][result.status.value] = (
                        slot["statuses"].get(result.status.value, 0) + 1
                    )
    total = Money(0)
    for name, m in spent.items():
        by_target[name]["cost_usd"] = str(m)
        total = total + m
    return {
        "command": "campaign run",
        "store": store_path,
        "jobs": sum(by_status.values()),
        "by_status": dict(sorted(by_status.items())),
        "by_target": by_target,
        "skipped_budget": skipped_budget,
        "total_cost_usd": str(total),
    }


def _print_campaign_summary(summary: dict) -> None:
    print(f"wrote {summary['jobs']} jobs to {summary['store']}")
    for status, count in summary["by_status"].items():
        print(f"  {status:12s} {count}")
    for name, slot in summary["by_target"].items():
        print(f"  {name:16s} jobs={slot['jobs']} cost={slot['cost_usd']}")
    if summary["skipped_budget"]:
        print(f"  skipped (budget cap): {summary['skipped_budget']}")
    print(f"total cost {summary['total_cost_usd']}")


def _coerce_filter_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _parse_filters(pairs: Sequence[str]) -> dict:
    filters = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError(f"filters take key=value form, got {pair!r}")
        filters[key] = _coerce_filter_value(value)
    return filters


def _resolve_store(flag: str | None, config_value: str | None = None) -> str:
    if flag:
        return flag
    if config_value:
        return config_value
    return default_store_path()


def cmd_campaign_run(args) -> int:
    cfg = load_config(args.config)
    store_path = _resolve_store(args.store, cfg.store)
    summary = run_campaign(cfg, store_path)
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        _print_campaign_summary(summary)
    return 0


def cmd_jobs_poll(args) -> int:
    store = JobStore(_resolve_store(args.store))
    counts: dict[tuple[str, str], int] = {}
    for record in store.records():
        key = (record.target, record.status.value)
        counts[key] = counts.get(key, 0) + 1
    summary = {
        "command": "jobs poll",
        "jobs": len(store),
        "by_target_status": {f"{t}/{s}": n for (t, s), n in sorted(counts.items())},
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    elif not counts:
        print("no jobs in store")
    else:
        for (target, status), n in sorted(counts.items()):
            print(f"{target:16s} {status:12s} {n}")
    return 0


def cmd_report(args) -> int:
    store = JobStore(_resolve_store(args.store))
    records = store.query(**_parse_filters(args.filter))
    rows = write_report(args.kind, records, args.out)
    if rows == 0:
        print(f"report {args.kind}: no matching rows", file=sys.stderr)
        return 4
    summary = {"command": "report", "kind": args.kind, "rows": rows, "out": args.out}
    print(json.dumps(summary, sort_keys=True) if args.json else f"wrote {rows} rows to {args.out}")
    return 0


def cmd_store_export(args) -> int:
    store = JobStore(_resolve_store(args.store))
    columns = [c.strip() for c in args.columns.split(",")] if args.columns else None
    rows = store.export_csv(args.out, columns=columns, **_parse_filters(args.filter))
    if rows == 0:
        print("store export: no matching rows", file=sys.stderr)
        return 4
    summary = {"command": "store export", "rows": rows, "out": args.out}
    print(json.dumps(summary, sort_keys=True) if args.json else f"wrote {rows} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbench", description="simulated quantum-cloud benchmarking campaigns"
    )
    parser.add_argument("--store", help="job log path (overrides config and env)")
    parser.add_argument("--json", action="store_true", help="machine-readable summary")
    sub = parser.add_subparsers(dest="command", required=True)

    campaign = sub.add_parser("campaign", help="campaign operations")
    campaign_sub = campaign.add_subparsers(dest="subcommand", required=True)
    run = campaign_sub.add_parser("run", help="run a configured campaign")
    run.add_argument("--config", required=True, help="INI config file")
    run.set_defaults(func=cmd_campaign_run)

    jobs = sub.add_parser("jobs", help="job-log operations")
    jobs_sub = jobs.add_subparsers(dest="subcommand", required=True)
    poll = jobs_sub.add_parser("poll", help="summarize job statuses")
    poll.set_defaults(func=cmd_jobs_poll)

    report = sub.add_parser("report", help="write an analysis CSV")
    report.add_argument("kind", choices=REPORT_KINDS)
    report.add_argument("--out", required=True)
    report.add_argument(
        "--filter", action="append", default=[], metavar="KEY=VALUE",
        help="record filter, repeatable; supports __ge/__gt/__le/__lt suffixes",
    )
    report.set_defaults(func=cmd_report)

    store = sub.add_parser("store", help="job-log storage operations")
    store_sub = store.add_subparsers(dest="subcommand", required=True)
    export = store_sub.add_parser("export", help="dump records as CSV")
    export.add_argument("--out", required=True)
    export.add_argument("--columns", help="comma-separated column subset")
    export.add_argument(
        "--filter", action="append", default=[], metavar="KEY=VALUE",
        help="record filter, repeatable",
    )
    export.set_defaults(func=cmd_store_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StoreError as exc:
        print(f"store error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
