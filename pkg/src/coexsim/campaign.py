"""Campaign runner: seeded realizations, percentile aggregation, CSV output.

Each realization runs the full pipeline (topology -> channels -> gains -> CS
graph -> MAC terms -> SINR -> throughput) deterministically from
(config, base_seed, realization_id); campaigns pool the per-AP ensemble and
report nearest-rank median and 10th-percentile throughput by role.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import channels as channels_mod
from . import geometry, propagation, throughput
from .mac import build_cs_graph
from .model import ChannelMode, Scenario, ScenarioConfig, TechVariant, validate_config


@dataclass(frozen=True)
class ApRecord:
    realization_id: int
    ap_id: int
    role: str
    variant: str
    channel: int
    throughput_mbps: float


CSV_COLUMNS = ("realization_id", "ap_id", "role", "variant", "channel",
               "throughput_mbps")


@dataclass(frozen=True)
class RoleSummary:
    count: int
    median_mbps: float
    p10_mbps: float


@dataclass(frozen=True)
class CampaignResult:
    config: ScenarioConfig
    records: tuple[ApRecord, ...]
    summary: dict[str, RoleSummary]

    def role_values(self, role: str) -> list[float]:
        return [r.throughput_mbps for r in self.records if r.role == role]


def nearest_rank(values: Sequence[float], percentile: float) -> float:
    """Nearest-rank percentile; the even-size median is the lower-middle value."""
    if not values:
        raise ValueError("empty ensemble")
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


def _summarize(records: Iterable[ApRecord]) -> dict[str, RoleSummary]:
    by_role: dict[str, list[float]] = {}
    for rec in records:
        by_role.setdefault(rec.role, []).append(rec.throughput_mbps)
    return {role: RoleSummary(len(vals), nearest_rank(vals, 50.0),
                              nearest_rank(vals, 10.0))
            for role, vals in sorted(by_role.items())}


def run_realization(cfg: ScenarioConfig, realization_id: int,
                    sites: np.ndarray | None = None,
                    tables=None) -> list[ApRecord]:
    """One seeded end-to-end network realization."""
    base_seed = cfg.base_seed
    params = cfg.propagation
    if tables is None:
        tables = throughput.default_tables(cfg)
    if sites is None and cfg.scenario is not Scenario.INDOOR_INDOOR:
        sites = geometry.load_pico_sites(cfg.pico_sites_file)

    def coverage_loss(d3: float) -> float:
        return propagation.path_loss_outdoor(d3, params.frequency_hz, True, params)

    topo = geometry.generate_topology(cfg, base_seed, realization_id, sites,
                                      coverage_loss)
    rng_ch_inc = geometry.stream(base_seed, realization_id,
                                 geometry.TAG_CHANNELS_INC)
    rng_ch_ent = geometry.stream(base_seed, realization_id,
                                 geometry.TAG_CHANNELS_ENT)
    gains = propagation.GainTable(topo, params, base_seed, realization_id)

    cs_detectable = None
    if cfg.sense_scope == "cs-range" and cfg.channel_mode is ChannelMode.SENSE:
        cs_detectable = _detectable_incumbents(topo, gains, cfg)
    chans = channels_mod.assign_channels(topo, cfg, rng_ch_inc, rng_ch_ent,
                                         cs_detectable)
    graph = build_cs_graph(topo, chans, gains, cfg.cs_thresholds,
                           symmetric=cfg.cs_graph == "symmetric")
    results = throughput.evaluate_realization(topo, chans, graph, gains, cfg,
                                              tables)
    return [ApRecord(realization_id, r.ap_id, r.role, r.variant.value,
                     r.channel, r.throughput_bps / 1e6)
            for r in sorted(results, key=lambda r: r.ap_id)]


def _detectable_incumbents(topo, gains, cfg) -> dict[int, set[int]]:
    """Channel-agnostic detectability of incumbents, for cs-range sensing."""
    out: dict[int, set[int]] = {}
    incumbents = [ap for ap in topo.aps if ap.role == "incumbent"]
    for ent in topo.aps:
        if ent.role != "entrant":
            continue
        visible = set()
        thr = cfg.cs_thresholds.threshold_dbm(ent.variant, TechVariant.WIFI)
        for inc in incumbents:
            rx = inc.tx_power_dbm - gains.loss_db(ent.uid, inc.uid)
            if rx >= thr:
                visible.add(inc.id)
        out[ent.id] = visible
    return out


def _run_chunk(args) -> list[ApRecord]:
    cfg, ids, sites_list = args
    sites = np.asarray(sites_list) if sites_list is not None else None
    tables = throughput.default_tables(cfg)
    out: list[ApRecord] = []
    for rid in ids:
        out.extend(run_realization(cfg, rid, sites, tables))
    return out


def run_campaign(cfg: ScenarioConfig,
                 sites: np.ndarray | None = None) -> CampaignResult:
    """Run cfg.n_realizations seeded realizations and aggregate percentiles."""
    validate_config(cfg)
    if sites is None and cfg.scenario is not Scenario.INDOOR_INDOOR:
        sites = geometry.load_pico_sites(cfg.pico_sites_file)

    ids = list(range(cfg.n_realizations))
    if cfg.workers <= 1:
        records = _run_chunk((cfg, ids, None if sites is None else sites.tolist()))
    else:
        chunks = [ids[i::cfg.workers] for i in range(cfg.workers)]
        sites_list = None if sites is None else sites.tolist()
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = pool.map(_run_chunk,
                             [(cfg, chunk, sites_list) for chunk in chunks])
            records = [rec for part in parts for rec in part]
    records.sort(key=lambda r: (r.realization_id, r.ap_id))
    records = tuple(records)
    return CampaignResult(cfg, records, _summarize(records))


SWEEP_AXES = ("n_entrant", "variant", "channel_mode", "tx_power")


def sweep(cfg: ScenarioConfig, axis: str, values: Sequence,
          sites: np.ndarray | None = None) -> list[tuple[object, CampaignResult]]:
    """One campaign per axis value; the shared base seed pairs realizations."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; one of {SWEEP_AXES}")
    out = []
    for value in values:
        if axis == "n_entrant":
            point = replace(cfg, n_entrant=int(value))
        elif axis == "variant":
            point = replace(cfg, entrant_variant=TechVariant(value))
        elif axis == "channel_mode":
            point = replace(cfg, channel_mode=ChannelMode(value))
        else:
            point = replace(cfg, entrant_tx_power_dbm=float(value),
                            incumbent_tx_power_dbm=(
                                float(value)
                                if cfg.scenario is Scenario.OUTDOOR_OUTDOOR
                                else cfg.incumbent_tx_power_dbm))
        out.append((value, run_campaign(point, sites)))
    return out


def write_csv(records: Iterable[ApRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([r.realization_id, r.ap_id, r.role, r.variant,
                             r.channel, f"{r.throughput_mbps:.6f}"])


def summary_dict(result: CampaignResult) -> dict:
    return {
        "scenario": result.config.scenario.value,
        "n_incumbent": result.config.n_incumbent,
        "n_entrant": result.config.n_entrant,
        "entrant_variant": result.config.entrant_variant.value,
        "channel_mode": result.config.channel_mode.value,
        "entrant_tx_power_dbm": result.config.entrant_tx_power_dbm,
        "realizations": result.config.n_realizations,
        "seed": result.config.base_seed,
        "roles": {role: {"count": s.count, "median_mbps": s.median_mbps,
                         "p10_mbps": s.p10_mbps}
                  for role, s in result.summary.items()},
    }
