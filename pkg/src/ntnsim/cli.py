"""Command line front end.

Two subcommands:

  ntnsim run --config scenario.cfg       one scenario from a config file
  ntnsim campaign --preset paper         a named batch of scenarios

Exit status: 0 when everything ran and met its requirements, 1 when the
simulation ran but at least one requirement verdict is FAIL, 2 on bad usage
or configuration. Output directory resolution order: --out flag, NTNSIM_OUT
environment variable, ./out.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import PRESETS, ConfigError, ScenarioConfig, load_config
from .kpi import evaluate, results_table, write_scenario_outputs
from .mac_sched import run_drop


def _parse_seed_list(text: str) -> tuple[int, ...]:
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    if not tokens:
        raise ConfigError("empty seed list")
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as exc:
        raise ConfigError(f"bad seed list {text!r}") from exc


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seeds", help="override seeds, e.g. 1,2,3")
    sub.add_argument("--slots", type=int, help="override slot count")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker processes for parallel seeds (default 1)")
    sub.add_argument("--dry-run", action="store_true",
                     help="print resolved configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntnsim",
        description="LEO satellite network Monte-Carlo simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="simulate one scenario file")
    run_cmd.add_argument("--config", type=Path, required=True,
                         help="scenario file with key = value lines")
    _add_common(run_cmd)

    camp_cmd = commands.add_parser("campaign", help="simulate a preset batch")
    camp_cmd.add_argument("--preset", default="paper", choices=sorted(PRESETS),
                          help="scenario batch name (default: paper)")
    camp_cmd.add_argument("--only", action="append", metavar="NAME",
                          help="restrict to named scenarios (repeatable)")
    _add_common(camp_cmd)
    return parser


def _resolve_configs(args: argparse.Namespace) -> list[ScenarioConfig]:
    if args.command == "run":
        configs = [load_config(args.config)]
    else:
        configs = list(PRESETS[args.preset]())
        if args.only:
            known = {c.name for c in configs}
            missing = [n for n in args.only if n not in known]
            if missing:
                raise ConfigError(
                    f"unknown scenario(s) {', '.join(missing)}; "
                    f"choose from {', '.join(sorted(known))}")
            configs = [c for c in configs if c.name in args.only]
    overrides = {}
    if args.seeds:
        overrides["seeds"] = _parse_seed_list(args.seeds)
    if args.slots is not None:
        overrides["slots"] = args.slots
    if overrides:
        configs = [dataclasses.replace(c, **overrides) for c in configs]
    for cfg in configs:
        cfg.validate()
    return configs


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return args.out
    env = os.environ.get("NTNSIM_OUT")
    return Path(env) if env else Path("out")


def _simulate(cfg: ScenarioConfig, jobs: int):
    if jobs > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_drop, [cfg] * len(cfg.seeds), cfg.seeds))
    return [run_drop(cfg, seed) for seed in cfg.seeds]


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configs = _resolve_configs(args)
    except (ConfigError, OSError) as exc:
        print(f"ntnsim: error: {exc}", file=sys.stderr)
        return 2

    if args.dry_run:
        for cfg in configs:
            print(json.dumps(dataclasses.asdict(cfg), sort_keys=True))
        return 0

    outdir = _out_dir(args)
    all_kpis = []
    for cfg in configs:
        results = _simulate(cfg, args.jobs)
        kpis = evaluate(cfg, results)
        write_scenario_outputs(kpis, outdir / cfg.name,
                               cfg.channel_bw_mhz * 1e6)
        all_kpis.append(kpis)
        print(f"{cfg.name}: 5th-pct SE {kpis.user_se_5th:.4f} b/s/Hz, "
              f"rate {kpis.user_rate_5th_mbps:.3f} Mb/s, "
              f"cell SE {kpis.avg_cell_se:.4f} b/s/Hz, "
              f"area {kpis.area_capacity_kbps_km2:.3f} kb/s/km2 -> "
              f"{'PASS' if kpis.passed else 'FAIL'}")

    table = results_table(all_kpis)
    if args.command == "campaign":
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "results_table.txt").write_text(table)
        combined = {k.name: (outdir / k.name / "summary.json").name
                    for k in all_kpis}
        campaign = {
            "preset": args.preset,
            "scenarios": sorted(combined),
            "passed": {k.name: k.passed for k in all_kpis},
        }
        (outdir / "campaign_summary.json").write_text(
            json.dumps(campaign, indent=2, sort_keys=True) + "\n")
        print(table, end="")
    return 0 if all(k.passed for k in all_kpis) else 1


if __name__ == "__main__":
    sys.exit(main())
