"""SINR composition and per-AP downlink throughput.

Throughput per AP is rho(SINR) * bandwidth * A * S * (1 - r_deg).  The SINR
at the served user counts co-channel incumbents outside the serving AP's CS
range at full power (mutual exclusion silences the in-range ones), and
co-channel entrants per the serving variant: LBT and ideal-TDMA servers see
only out-of-range entrants, while duty-cycled and always-on servers see every
co-channel entrant weighted by the pairwise transmission-overlap probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .channels import ChannelAssignment
from .geometry import Topology
from .mac import (Contender, CsGraph, MacShare, bianchi_efficiency,
                  collision_degradation, duty_period_slots,
                  frames_per_on_slot, laa_contender, lbt_airtime,
                  overlap_probability, wifi_contender)
from .model import (ScenarioConfig, TechVariant, ThroughputTerms, dbm_to_mw,
                    radio_for)


@dataclass(frozen=True)
class SpectralEfficiencyTable:
    """Step-function SINR -> spectral efficiency map (closed lower bounds)."""

    rows: tuple[tuple[float, float], ...]   # (min_sinr_db, bps_per_hz) ascending

    def __post_init__(self):
        last_s, last_e = -math.inf, 0.0
        for sinr, eff in self.rows:
            if sinr <= last_s or eff <= last_e:
                raise ValueError("table rows must increase in both columns")
            last_s, last_e = sinr, eff

    def efficiency(self, sinr_db: float) -> float:
        eff = 0.0
        for min_sinr, e in self.rows:
            if sinr_db >= min_sinr:
                eff = e
            else:
                break
        return eff

    @property
    def max_efficiency(self) -> float:
        return self.rows[-1][1]

    @property
    def min_rate_efficiency(self) -> float:
        return self.rows[0][1]


def load_table(path: str | Path) -> SpectralEfficiencyTable:
    """Two-column text file: min_sinr_db  bps_per_hz."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sinr, eff = line.split()
        rows.append((float(sinr), float(eff)))
    return SpectralEfficiencyTable(tuple(rows))


def _packaged_table(name: str) -> SpectralEfficiencyTable:
    ref = resources.files("coexsim").joinpath(f"data/{name}")
    rows = []
    for line in ref.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sinr, eff = line.split()
        rows.append((float(sinr), float(eff)))
    return SpectralEfficiencyTable(tuple(rows))


def default_tables(cfg: ScenarioConfig | None = None,
                   ) -> dict[str, SpectralEfficiencyTable]:
    wifi = (load_table(cfg.wifi_table_file) if cfg and cfg.wifi_table_file
            else _packaged_table("wifi_mcs.txt"))
    lte = (load_table(cfg.lte_table_file) if cfg and cfg.lte_table_file
           else _packaged_table("lte_cqi.txt"))
    return {"wifi": wifi, "lte": lte}


def table_for(variant: TechVariant, tables: dict[str, SpectralEfficiencyTable]
              ) -> SpectralEfficiencyTable:
    return tables["wifi"] if variant is TechVariant.WIFI else tables["lte"]


@dataclass(frozen=True)
class ApResult:
    ap_id: int
    role: str
    variant: TechVariant
    channel: int
    throughput_bps: float
    terms: ThroughputTerms


def sinr_terms(ap, topology: Topology, channels: ChannelAssignment,
               cs_graph: CsGraph, gains, cfg: ScenarioConfig,
               periods: dict[int, int]) -> tuple[float, float, float, float]:
    """Return (sinr_linear, i_inc_mw, i_ent_mw, noise_mw) at the served user.

    The default worst-case accounting counts every out-of-CS-range interferer
    at full transmit power; cfg.interference == "airtime-weighted" scales each
    one by its long-run transmission fraction instead (sensitivity studies).
    """
    user = topology.user_of(ap.id)
    radio = radio_for(ap.variant, ap.tx_power_dbm)
    noise_mw = radio.noise_mw()
    signal_mw = dbm_to_mw(ap.tx_power_dbm) * gains.gain(ap.uid, user.uid)

    by_id = {a.id: a for a in topology.aps}

    def activity(other) -> float:
        if cfg.interference != "airtime-weighted":
            return 1.0
        if other.variant.is_lbt:
            lbt_nbrs = sum(1 for n in cs_graph.detected[other.id]
                           if by_id[n].variant.is_lbt)
            return 1.0 / (1 + lbt_nbrs)
        return 1.0 / periods[other.id]

    in_cs = cs_graph.detected[ap.id]
    i_inc = 0.0
    i_ent = 0.0
    lbt_like_server = ap.variant.is_lbt or ap.variant is TechVariant.LTEU_IDEAL
    for other in topology.aps:
        if other.id == ap.id or not channels.co_channel(ap.id, other.id):
            continue
        rx_mw = dbm_to_mw(other.tx_power_dbm) * gains.gain(other.uid, user.uid)
        if other.role == "incumbent":
            if other.id not in in_cs:
                i_inc += activity(other) * rx_mw
            continue
        if lbt_like_server:
            if other.id not in in_cs:
                i_ent += activity(other) * rx_mw
        else:
            if other.variant.is_lbt:
                # an LBT entrant interfering with a duty-cycled server defers
                # to nothing it cannot hear; keep the worst-case full power
                if other.id not in in_cs:
                    i_ent += activity(other) * rx_mw
            else:
                weight = overlap_probability(
                    ap.variant, periods[ap.id], other.variant,
                    periods[other.id], within_cs=other.id in in_cs)
                i_ent += weight * rx_mw
    sinr = signal_mw / (i_inc + i_ent + noise_mw)
    return sinr, i_inc, i_ent, noise_mw


def ap_throughput(rho_bps_per_hz: float, bandwidth_hz: float,
                  share: MacShare) -> float:
    return (rho_bps_per_hz * bandwidth_hz * share.airtime
            * share.mac_efficiency * (1.0 - share.r_deg))


def evaluate_realization(topology: Topology, channels: ChannelAssignment,
                         cs_graph: CsGraph, gains, cfg: ScenarioConfig,
                         tables: dict[str, SpectralEfficiencyTable],
                         ) -> list[ApResult]:
    """Every per-AP term of the throughput product for one realization."""
    aps = {ap.id: ap for ap in topology.aps}
    lbt = cfg.lbt
    duty = cfg.duty

    # duty periods first: adaptive and ideal periods depend on neighborhoods.
    # An ideal entrant claims 1/(1+n_ent) for itself (TDMA packing gain), but
    # schedules its slots over the adaptive-sized period, so neighbors
    # experience the same polite ON fraction as an adaptive entrant.
    periods: dict[int, int] = {}
    experienced: dict[int, int] = {}
    for ap in topology.aps:
        if ap.variant.is_lbt:
            periods[ap.id] = 0
            experienced[ap.id] = 0
        else:
            nb = cs_graph.neighborhoods[ap.id]
            periods[ap.id] = duty_period_slots(ap.variant, nb.n_inc, nb.n_ent, duty)
            if ap.variant is TechVariant.LTEU_IDEAL:
                experienced[ap.id] = duty_period_slots(
                    TechVariant.LTEU_ADAPTIVE, nb.n_inc, nb.n_ent, duty)
            else:
                experienced[ap.id] = periods[ap.id]

    # SINR -> spectral efficiency -> per-AP PHY rate and frame duration
    bandwidth = radio_for(TechVariant.WIFI, 23.0).bandwidth_hz
    sinr_lin: dict[int, float] = {}
    parts: dict[int, tuple[float, float, float]] = {}
    rho: dict[int, float] = {}
    rate: dict[int, float] = {}
    for ap in topology.aps:
        s, i_inc, i_ent, n_mw = sinr_terms(ap, topology, channels, cs_graph,
                                           gains, cfg, periods)
        sinr_lin[ap.id] = s
        parts[ap.id] = (i_inc, i_ent, n_mw)
        table = table_for(ap.variant, tables)
        rho[ap.id] = table.efficiency(10.0 * math.log10(s))
        rate[ap.id] = rho[ap.id] * bandwidth

    def contender_for(ap_id: int) -> Contender:
        ap = aps[ap_id]
        if ap.variant is TechVariant.LAA:
            return laa_contender(lbt)
        table = table_for(ap.variant, tables)
        phy = rate[ap_id]
        if phy <= 0.0:
            # a starved station still occupies the channel; contend at the
            # lowest decodable rate for timing purposes
            phy = table.min_rate_efficiency * bandwidth
        return wifi_contender(phy, lbt)

    results = []
    for ap in topology.aps:
        nb = cs_graph.detected[ap.id]
        share = _mac_share(ap, nb, aps, periods, experienced, cs_graph, lbt,
                           duty, contender_for, rate, bandwidth)
        r = ap_throughput(rho[ap.id], bandwidth, share)
        i_inc, i_ent, n_mw = parts[ap.id]
        terms = ThroughputTerms(
            rho_bps_per_hz=rho[ap.id], airtime=share.airtime,
            mac_efficiency=share.mac_efficiency,
            collision_degradation=share.r_deg,
            sinr_db=10.0 * math.log10(sinr_lin[ap.id]),
            i_inc_mw=i_inc, i_ent_mw=i_ent, noise_mw=n_mw)
        results.append(ApResult(ap.id, ap.role, ap.variant,
                                channels[ap.id], r, terms))
    return results


def _ideal_clusters(duty_ids: list[int], aps, cs_graph: CsGraph) -> list[list[int]]:
    """Index groups of detected ideal entrants that are in CS range of each
    other (their ON slots never overlap); connected components of the
    entrant-entrant detection subgraph."""
    idx = {ap_id: i for i, ap_id in enumerate(duty_ids)}
    ideal = [ap_id for ap_id in duty_ids
             if aps[ap_id].variant is TechVariant.LTEU_IDEAL]
    seen: set[int] = set()
    clusters = []
    for start in ideal:
        if start in seen:
            continue
        comp = []
        stack = [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            comp.append(idx[node])
            for nbr in cs_graph.detected[node]:
                if nbr in seen or nbr not in idx:
                    continue
                if aps[nbr].variant is TechVariant.LTEU_IDEAL:
                    seen.add(nbr)
                    stack.append(nbr)
        clusters.append(comp)
    return clusters


def _mac_share(ap, neighbors: set[int], aps, periods, experienced, cs_graph,
               lbt, duty, contender_for, rate, bandwidth) -> MacShare:
    variant = ap.variant
    if variant is TechVariant.LTE_PLAIN:
        return MacShare(1.0, 1.0, 0.0, duty_period_slots(variant, 0, 0, duty))
    if variant.is_duty_cycled:
        period = periods[ap.id]
        return MacShare(1.0 / period, 1.0, 0.0, period)

    # LBT: split the duty-OFF window evenly with the detected LBT stations
    lbt_nbrs = [n for n in sorted(neighbors) if aps[n].variant.is_lbt]
    duty_nbrs = [n for n in sorted(neighbors)
                 if aps[n].role == "entrant" and not aps[n].variant.is_lbt]
    entrant_periods = [experienced[n] for n in duty_nbrs]
    clusters = _ideal_clusters(duty_nbrs, aps, cs_graph)
    airtime = lbt_airtime(len(lbt_nbrs), entrant_periods, clusters)

    clique = [ap.id] + lbt_nbrs
    bianchi = bianchi_efficiency([contender_for(i) for i in clique], lbt)
    s = bianchi.s_per_contender[0]

    r_deg = 0.0
    if ap.role == "incumbent" and duty_nbrs and airtime > 0.0:
        inc_clique = [i for i in clique if aps[i].role == "incumbent"]
        inc_res = bianchi_efficiency([contender_for(i) for i in inc_clique], lbt)
        cycles = [inc_res.mean_cycle_us(k) for k in range(len(inc_clique))]
        m = frames_per_on_slot(cycles, duty).m
        r_deg = collision_degradation(entrant_periods, m, clusters)
    return MacShare(airtime, s, r_deg, None)
