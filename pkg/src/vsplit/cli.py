"""Command-line harness: run the optimizer or static policies and write CSV reports.

Every subcommand writes into ``--out``. Numeric CSV fields use six fixed
decimals and LF line endings, so identical configs give byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import yaml

from . import __version__
from .errors import ConfigError, InfeasibleError
from .modes import SplitMode
from .optimizer import solve
from .policies import STATIC_POLICIES, ComparisonRow, StaticPolicy, compare, run_policy, summarize
from .results import SearchResult
from .scenario import PRESETS, Scenario, build_scenario, resolve_config
from .traffic_energy import TraceError, ingest_traces, serialize_traces

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

SCHEDULE_HEADER = ["policy", "t", "vsc", "mode", "mode_name", "battery_kwh", "load"]
STEPS_HEADER = ["policy", "t", "grid_watts", "drop_rate", "cost"]
SUMMARY_HEADER = [
    "policy", "total_cost", "grid_energy_kwh", "average_drop_pct",
    "off_pct", "cran_pct", "upperlower_pct", "macphy_pct",
]


def fmt(x: float) -> str:
    text = f"{x:.6f}"
    # "-0.000000" would make goldens depend on the sign of rounding noise.
    return "0.000000" if text == "-0.000000" else text


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def schedule_rows(result: SearchResult, scenario: Scenario) -> list[list[str]]:
    from .system_dynamics import carried_loads

    rows = []
    traces, caps = scenario.traces, scenario.cluster.capacity
    for t, (modes, bats) in enumerate(zip(result.modes_per_step, result.batteries_per_step)):
        loads = carried_loads(modes, traces.demand[:, t], caps, float(traces.mbs_background[t])).vsc_loads
        for i, mode in enumerate(modes):
            rows.append([result.name, str(t + 1), str(i + 1), str(int(mode)), SplitMode(mode).label, fmt(bats[i]), fmt(loads[i])])
    return rows


def steps_rows(result: SearchResult) -> list[list[str]]:
    return [
        [result.name, str(t + 1), fmt(o.grid_watts), fmt(o.drop_rate), fmt(o.cost)]
        for t, o in enumerate(result.per_step)
    ]


def summary_row(row: ComparisonRow) -> list[str]:
    return [row.policy, fmt(row.total_cost), fmt(row.grid_energy_kwh), fmt(row.average_drop_pct), *map(fmt, row.selection_pct)]


def write_reports(out_dir: Path, scenario: Scenario, results: Sequence[SearchResult]) -> dict[str, str]:
    """Write schedule, steps and summary CSVs; return their contents keyed by file name."""
    schedule, steps, summary = [], [], []
    for r in results:
        schedule.extend(schedule_rows(r, scenario))
        steps.extend(steps_rows(r))
        summary.append(summary_row(summarize(r, scenario.delta_t)))
    files = {
        "schedule.csv": _csv_text(SCHEDULE_HEADER, schedule),
        "steps.csv": _csv_text(STEPS_HEADER, steps),
        "summary.csv": _csv_text(SUMMARY_HEADER, summary),
    }
    for name, text in files.items():
        (out_dir / name).write_text(text, encoding="utf-8", newline="\n")
    return files


def write_manifest(out_dir: Path, command: str, scenario: Scenario, files: dict[str, str]) -> Path:
    manifest = {
        "tool": "vsplit",
        "version": __version__,
        "command": command,
        "scenario": scenario.name,
        "scenario_digest": scenario.digest(),
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "outputs": {
            name: {"path": str(out_dir / name), "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()}
            for name, text in sorted(files.items())
        },
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return path


def _read_config(spec: str) -> tuple[dict, Path | None]:
    path = Path(spec)
    if not path.exists() and spec in PRESETS:
        return {"preset": spec}, None
    text = path.read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return raw, path.parent


def load_cli_scenario(args: argparse.Namespace) -> Scenario:
    raw, base_dir = _read_config(args.config)
    if args.seed is not None:
        raw = {**raw, "seed": args.seed}
    if args.fidelity_mode:
        raw = {**raw, "solver": {**(raw.get("solver") or {}), "fidelity_mode": True}}
    cfg = resolve_config(raw)
    traces = None
    try:
        if args.traces:
            traces = ingest_traces(args.traces, cfg["n_vsc"], cfg["horizon"])
        return build_scenario(cfg, traces=traces, base_dir=base_dir)
    except TraceError as exc:
        raise ConfigError(str(exc)) from None


def _policies(names: Sequence[str] | None) -> tuple[StaticPolicy, ...]:
    if not names:
        return STATIC_POLICIES
    return tuple(StaticPolicy(SplitMode.parse(n)) for n in names)


def run(command: str, args: argparse.Namespace) -> int:
    scenario = load_cli_scenario(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if command == "gen-traces":
        text = serialize_traces(scenario.traces.truncated(scenario.horizon))
        (out_dir / "traces.csv").write_text(text, encoding="utf-8", newline="\n")
        write_manifest(out_dir, command, scenario, {"traces.csv": text})
        print(out_dir / "traces.csv")
        return EXIT_OK

    if command == "solve":
        results: list[SearchResult] = [solve(scenario)]
    elif command == "policy":
        results = [run_policy(p, scenario) for p in _policies(args.policy)]
    else:
        report = compare(scenario, _policies(args.policy))
        results = list(report.results)
    files = write_reports(out_dir, scenario, results)
    write_manifest(out_dir, command, scenario, files)
    if command == "compare":
        print(report.to_table())
    else:
        for r in results:
            row = summarize(r, scenario.delta_t)
            print(f"{row.policy}: cost={row.total_cost:.6f} grid={row.grid_energy_kwh:.3f} kWh drop={row.average_drop_pct:.3f}%")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vsplit", description="Optimal baseband split schedules for solar-powered small cells.")
    parser.add_argument("--version", action="version", version=f"vsplit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "find the minimum-cost schedule",
        "policy": "run static split policies",
        "compare": "optimal schedule next to every static policy",
        "gen-traces": "write the scenario's energy and demand traces as CSV",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help=f"YAML config file or preset name ({', '.join(PRESETS)})")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--traces", help="trace CSV overriding the generated traces")
        p.add_argument("--fidelity-mode", action="store_true", help="one label per (timestep, mode vector); may be suboptimal")
        p.add_argument("--seed", type=int, help="override the config seed")
        if name in ("policy", "compare"):
            p.add_argument("--policy", action="append", help="static split to run (repeatable; default all)")
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("VSPLIT_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return run(args.command, args)
    except ConfigError as exc:
        print(f"vsplit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"vsplit: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"vsplit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"vsplit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
