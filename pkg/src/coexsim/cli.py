"""Command-line front end.

Examples:
    simulate --scenario indoor-indoor --incumbents 10 --entrants 1..10 \
        --variant laa --channels sense --power 23 --realizations 3000 \
        --seed 42 --out results.csv --summary summary.json

A range like 1..10 sweeps the entrant count, writing one CSV per point
(results_e1.csv, ..., results_e10.csv) under a shared base seed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .campaign import summary_dict, sweep, write_csv
from .model import (ChannelMode, ConfigError, Scenario, ScenarioConfig,
                    TechVariant, default_config, load_config, validate_config)


def _parse_entrants(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Monte Carlo LTE/Wi-Fi 5 GHz coexistence campaigns")
    p.add_argument("--config", help="YAML config file; flags override it")
    p.add_argument("--scenario",
                   choices=[s.value for s in Scenario])
    p.add_argument("--incumbents", type=int)
    p.add_argument("--entrants", type=_parse_entrants, metavar="N or LO..HI")
    p.add_argument("--variant", choices=[v.value for v in TechVariant])
    p.add_argument("--channels", choices=[m.value for m in ChannelMode],
                   help="channel selection mechanism")
    p.add_argument("--power", type=float,
                   help="entrant TX power dBm (all APs for outdoor-outdoor)")
    p.add_argument("--density", type=float,
                   help="indoor-outdoor incumbent density per km^2")
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--summary", help="summary JSON path, or - for stdout")
    return p


def _config_from_args(args) -> tuple[ScenarioConfig, list[int]]:
    if args.config:
        cfg = load_config(args.config)
        if args.scenario and Scenario(args.scenario) is not cfg.scenario:
            raise ConfigError(["--scenario conflicts with the config file"])
    elif args.scenario:
        cfg = default_config(args.scenario)
    else:
        raise ConfigError(["either --config or --scenario is required"])
    updates = {}
    if args.incumbents is not None:
        updates["n_incumbent"] = args.incumbents
    if args.variant:
        updates["entrant_variant"] = TechVariant(args.variant)
    if args.channels:
        updates["channel_mode"] = ChannelMode(args.channels)
    if args.power is not None:
        updates["entrant_tx_power_dbm"] = args.power
        if cfg.scenario is Scenario.OUTDOOR_OUTDOOR:
            updates["incumbent_tx_power_dbm"] = args.power
    if args.density is not None:
        updates["incumbent_density_per_km2"] = args.density
    if args.realizations is not None:
        updates["n_realizations"] = args.realizations
    if args.seed is not None:
        updates["base_seed"] = args.seed
    if args.workers is not None:
        updates["workers"] = args.workers
    entrants = args.entrants if args.entrants is not None else [cfg.n_entrant]
    if updates:
        cfg = replace(cfg, **updates)
    return cfg, entrants


def _out_path(base: str, n_entrant: int, multi: bool) -> Path:
    path = Path(base)
    if not multi:
        return path
    return path.with_name(f"{path.stem}_e{n_entrant}{path.suffix or '.csv'}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, entrant_counts = _config_from_args(args)
        cfg = replace(cfg, n_entrant=entrant_counts[0])
        validate_config(replace(cfg, n_entrant=max(entrant_counts)))
        validate_config(cfg)
    except ConfigError as err:
        json.dump({"error": "invalid-config", "violations": err.violations},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2

    multi = len(entrant_counts) > 1
    summaries = []
    results = sweep(cfg, "n_entrant", entrant_counts)
    for n_ent, result in results:
        if args.out:
            path = _out_path(args.out, int(n_ent), multi)
            write_csv(result.records, path)
            print(f"wrote {path} ({len(result.records)} records)")
        summaries.append(summary_dict(result))
        for role, s in result.summary.items():
            print(f"entrants={n_ent} {role}: median={s.median_mbps:.2f} Mbps "
                  f"p10={s.p10_mbps:.2f} Mbps (n={s.count})")

    if args.summary:
        payload = json.dumps({"points": summaries}, indent=2)
        if args.summary == "-":
            print(payload)
        else:
            Path(args.summary).write_text(payload + "\n")
            print(f"wrote {args.summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
