"""MAC-layer model: carrier-sense graph, LBT efficiency, airtime shares,
duty-cycle overlap, and incumbent collision degradation.

The LBT efficiency follows the saturation fixed point between per-station
transmit probability tau and conditional collision probability p under binary
exponential backoff, generalized to stations with heterogeneous frame
durations (variable-rate data frames and fixed 1 ms subframes).  The
per-station efficiency S is normalized so that throughput = rate * A * S with
A = 1/(number of mutually contending stations).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import ChannelAssignment
from .geometry import Topology
from .model import (CsNeighborhood, CsThresholds, DutyCycleParams, FramesPerSlot,
                    LbtParams, TechVariant)


@dataclass(frozen=True)
class CsGraph:
    """Co-channel carrier-sense detection relation.

    `detected[i]` is the neighborhood used by AP i's MAC (symmetrized with the
    union rule by default); `directed[i]` holds the raw one-way detections.
    """

    detected: dict[int, set[int]]
    directed: dict[int, set[int]]
    neighborhoods: dict[int, CsNeighborhood]


def build_cs_graph(topology: Topology, channels: ChannelAssignment, gains,
                   thresholds: CsThresholds, symmetric: bool = True) -> CsGraph:
    """Detection rule: listener i hears transmitter j iff j's received power
    (median loss + shadowing, full TX power) clears i's threshold for j's
    technology class, and both share a channel."""
    aps = topology.aps
    directed: dict[int, set[int]] = {ap.id: set() for ap in aps}
    for i, a in enumerate(aps):
        for b in aps[i + 1:]:
            if not channels.co_channel(a.id, b.id):
                continue
            loss = gains.loss_db(a.uid, b.uid)
            rx_at_a = b.tx_power_dbm - loss
            rx_at_b = a.tx_power_dbm - loss
            if rx_at_a >= thresholds.threshold_dbm(a.variant, b.variant):
                directed[a.id].add(b.id)
            if rx_at_b >= thresholds.threshold_dbm(b.variant, a.variant):
                directed[b.id].add(a.id)

    if symmetric:
        detected: dict[int, set[int]] = {ap.id: set() for ap in aps}
        for i, nbrs in directed.items():
            for j in nbrs:
                detected[i].add(j)
                detected[j].add(i)
    else:
        detected = {i: set(nbrs) for i, nbrs in directed.items()}

    role = {ap.id: ap.role for ap in aps}
    neighborhoods = {}
    for ap in aps:
        members = tuple(sorted(detected[ap.id]))
        n_inc = sum(1 for m in members if role[m] == "incumbent")
        neighborhoods[ap.id] = CsNeighborhood(n_inc, len(members) - n_inc, members)
    return CsGraph(detected, directed, neighborhoods)


def wifi_frame_duration(phy_rate_bps: float, lbt: LbtParams = LbtParams()) -> float:
    """Data frame duration in seconds: PHY header plus headers+payload airtime."""
    if phy_rate_bps <= 0.0:
        raise ValueError("rate must be positive")
    payload_bits = lbt.mac_header_bits + 8 * lbt.msdu_bytes
    return lbt.phy_header_us * 1e-6 + payload_bits / phy_rate_bps


@dataclass(frozen=True)
class Contender:
    """One LBT station for the saturation fixed point (durations in us)."""

    frame_us: float
    useful_us: float


def laa_contender(lbt: LbtParams = LbtParams()) -> Contender:
    return Contender(frame_us=lbt.laa_frame_us, useful_us=lbt.laa_frame_us)


def wifi_contender(phy_rate_bps: float, lbt: LbtParams = LbtParams()) -> Contender:
    t_f = wifi_frame_duration(phy_rate_bps, lbt) * 1e6
    return Contender(frame_us=t_f, useful_us=t_f - lbt.phy_header_us)


class FixedPointError(RuntimeError):
    pass


@dataclass(frozen=True)
class BianchiResult:
    s_per_contender: tuple[float, ...]
    tau: tuple[float, ...]
    p: tuple[float, ...]
    expected_slot_us: float
    success_prob: tuple[float, ...]

    def mean_cycle_us(self, index: int) -> float:
        """Expected time between successive successful frames of one station."""
        return self.expected_slot_us / self.success_prob[index]


_BIANCHI_CACHE: dict[tuple, BianchiResult] = {}
_BIANCHI_CACHE_MAX = 200_000


def _tau_of_p(p: float, w: int, m: int) -> float:
    # tau = 2 / (W+1 + p*W*sum_{i<m}(2p)^i); smooth at p = 1/2
    s = sum((2.0 * p) ** i for i in range(m))
    return 2.0 / ((w + 1) + p * w * s)


def bianchi_efficiency(contenders: list[Contender],
                       lbt: LbtParams = LbtParams(),
                       tol: float = 1e-9, max_iter: int = 10_000,
                       ) -> BianchiResult:
    """Solve the heterogeneous-duration saturation fixed point.

    Returns per-station S such that a station's long-run throughput equals
    rate * A * S with A the equal time share 1/N: S_i is the payload fraction
    of one frame cycle after charging the station 1/N of the idle and
    collision time.
    """
    if not contenders:
        raise ValueError("need at least one contender")
    key = (tuple(sorted((round(c.frame_us, 3), round(c.useful_us, 3))
                        for c in contenders)),
           lbt.cw_min, lbt.cw_max, round(lbt.slot_us, 3), round(lbt.difs_us, 3))
    cached = _BIANCHI_CACHE.get(key)
    if cached is not None:
        return _remap(cached, contenders)

    order = sorted(range(len(contenders)),
                   key=lambda i: (round(contenders[i].frame_us, 3),
                                  round(contenders[i].useful_us, 3)))
    cs = [contenders[i] for i in order]
    n = len(cs)
    w = lbt.cw_min + 1
    m = lbt.backoff_stages

    p = [0.0] * n
    tau = [_tau_of_p(0.0, w, m)] * n
    for _ in range(max_iter):
        one_minus = [1.0 - t for t in tau]
        prod_all = math.prod(one_minus)
        p_new = []
        for i in range(n):
            others = prod_all / one_minus[i] if one_minus[i] > 0.0 else 0.0
            p_new.append(1.0 - others)
        delta = max(abs(a - b) for a, b in zip(p_new, p))
        p = [0.5 * (a + b) for a, b in zip(p_new, p)]
        tau = [_tau_of_p(pi, w, m) for pi in p]
        if delta < tol:
            break
    else:
        raise FixedPointError("backoff fixed point did not converge")

    one_minus = [1.0 - t for t in tau]
    prod_all = math.prod(one_minus)
    p_idle = prod_all
    p_succ = [tau[i] * (prod_all / one_minus[i]) if one_minus[i] > 0 else 0.0
              for i in range(n)]

    # collision term: group stations by frame duration, longest first; the
    # collision occupies the longest colliding frame plus DIFS
    groups: list[tuple[float, list[int]]] = []
    for i in sorted(range(n), key=lambda i: -cs[i].frame_us):
        if groups and abs(groups[-1][0] - cs[i].frame_us) < 1e-9:
            groups[-1][1].append(i)
        else:
            groups.append((cs[i].frame_us, [i]))

    e_slot = p_idle * lbt.slot_us
    success_time = 0.0
    for i in range(n):
        success_time += p_succ[i] * (cs[i].frame_us + lbt.difs_us)
    e_slot += success_time

    prefix_silent = 1.0   # probability that all longer-frame groups are silent
    for dur, members in groups:
        q_g = math.prod(one_minus[i] for i in members)
        s_g = sum(tau[i] * math.prod(one_minus[j] for j in members if j != i)
                  for i in members)
        below = [i for i in range(n) if cs[i].frame_us < dur - 1e-9]
        q_l = math.prod(one_minus[i] for i in below) if below else 1.0
        s_l = sum(tau[i] * math.prod(one_minus[j] for j in below if j != i)
                  for i in below)
        # >=1 transmitter in this group and >=2 total among group and below
        p_here = 1.0 - q_g * q_l - (q_g * s_l + s_g * q_l)
        e_slot += prefix_silent * p_here * (dur + lbt.difs_us)
        prefix_silent *= q_g

    # Equal long-run time sharing: each station's granted share carries its
    # own frames plus an equal split of the unproductive time (idle slots and
    # collisions), so S_i is the payload fraction of one frame cycle inside
    # that share.  For identical stations this reduces to
    # n * P_succ * useful / E[slot].
    waste = e_slot - success_time
    s = tuple(cs[i].useful_us
              / (cs[i].frame_us + lbt.difs_us + waste / (n * p_succ[i]))
              for i in range(n))
    canonical = BianchiResult(s, tuple(tau), tuple(p), e_slot, tuple(p_succ))
    if len(_BIANCHI_CACHE) < _BIANCHI_CACHE_MAX:
        _BIANCHI_CACHE[key] = canonical
    # undo the sort so results line up with the caller's ordering
    inv = [0] * n
    for sorted_idx, orig_idx in enumerate(order):
        inv[orig_idx] = sorted_idx
    return BianchiResult(tuple(s[i] for i in inv), tuple(tau[i] for i in inv),
                         tuple(p[i] for i in inv), e_slot,
                         tuple(p_succ[i] for i in inv))


def _remap(canonical: BianchiResult, contenders: list[Contender]) -> BianchiResult:
    """Match cached per-duration results back to the caller's station order."""
    pool: dict[tuple[float, float], list[int]] = {}
    keyed = sorted(range(len(contenders)),
                   key=lambda i: (round(contenders[i].frame_us, 3),
                                  round(contenders[i].useful_us, 3)))
    for slot, idx in enumerate(keyed):
        k = (round(contenders[idx].frame_us, 3), round(contenders[idx].useful_us, 3))
        pool.setdefault(k, []).append(slot)
    s = [0.0] * len(contenders)
    tau = [0.0] * len(contenders)
    p = [0.0] * len(contenders)
    ps = [0.0] * len(contenders)
    for i, c in enumerate(contenders):
        k = (round(c.frame_us, 3), round(c.useful_us, 3))
        slot = pool[k].pop()
        s[i] = canonical.s_per_contender[slot]
        tau[i] = canonical.tau[slot]
        p[i] = canonical.p[slot]
        ps[i] = canonical.success_prob[slot]
    return BianchiResult(tuple(s), tuple(tau), tuple(p),
                         canonical.expected_slot_us, tuple(ps))


def duty_period_slots(variant: TechVariant, n_inc: int, n_ent: int,
                      duty: DutyCycleParams = DutyCycleParams()) -> int:
    """ON/OFF period length in slots for a duty-cycled or always-on entrant."""
    if variant is TechVariant.LTEU_FIXED50:
        return duty.fixed_period_slots
    if variant is TechVariant.LTEU_ADAPTIVE:
        # the period counts the AP itself alongside everything it detects
        return max(1, n_inc + n_ent + 1)
    if variant is TechVariant.LTEU_IDEAL:
        return 1 + n_ent
    if variant is TechVariant.LTE_PLAIN:
        return 1
    raise ValueError(f"{variant} has no duty period")


@dataclass(frozen=True)
class MacShare:
    airtime: float
    mac_efficiency: float
    r_deg: float
    duty_period_slots: int | None = None


def duty_off_fraction(entrant_periods: list[int],
                      ideal_clusters: list[list[int]] | None = None) -> float:
    """Expected fraction of slots in which every listed entrant is OFF.

    `entrant_periods` holds the period of each detected duty-cycled entrant;
    `ideal_clusters` lists index groups whose ON slots never overlap (TDMA),
    everything else draws its ON slot independently.
    """
    if not entrant_periods:
        return 1.0
    clustered = set()
    off = 1.0
    for cluster in ideal_clusters or []:
        on = sum(1.0 / entrant_periods[i] for i in cluster)
        off *= max(0.0, 1.0 - min(1.0, on))
        clustered.update(cluster)
    for i, period in enumerate(entrant_periods):
        if i in clustered:
            continue
        off *= 1.0 - 1.0 / period
    return off


def lbt_airtime(n_lbt_neighbors: int, entrant_periods: list[int],
                ideal_clusters: list[list[int]] | None = None) -> float:
    """Airtime share of an LBT AP: duty-OFF window split evenly among the
    mutually contending LBT stations."""
    return duty_off_fraction(entrant_periods, ideal_clusters) / (1 + n_lbt_neighbors)


def overlap_probability(variant_a: TechVariant, period_a: int,
                        variant_b: TechVariant, period_b: int,
                        within_cs: bool) -> float:
    """Long-run probability that two non-LBT entrants transmit simultaneously."""
    for v in (variant_a, variant_b):
        if v.is_lbt:
            raise ValueError("overlap is defined for duty-cycled/always-on pairs")
    if TechVariant.LTE_PLAIN in (variant_a, variant_b):
        return 1.0
    if (variant_a is TechVariant.LTEU_IDEAL and variant_b is TechVariant.LTEU_IDEAL
            and within_cs):
        return 0.0
    return 1.0 / max(period_a, period_b)


def frames_per_on_slot(incumbent_cycles_us: list[float],
                       duty: DutyCycleParams = DutyCycleParams()) -> FramesPerSlot:
    """Frames sent by all listed incumbents during one ON-time slot duration."""
    if not incumbent_cycles_us:
        raise ValueError("need at least one transmitting incumbent")
    rate = sum(1.0 / c for c in incumbent_cycles_us)   # frames per us, aggregate
    return FramesPerSlot(m=max(1, math.floor(duty.on_slot_us * rate)))


def collision_degradation(entrant_periods: list[int], m: int,
                          ideal_clusters: list[list[int]] | None = None) -> float:
    """Fraction of incumbent frames lost to duty-cycle OFF->ON transitions.

    One frame in flight is destroyed whenever an all-OFF slot is followed by a
    slot with some detected entrant ON; the incumbent sends m frames per
    all-OFF slot.  Periods <= 1 (an always-on neighbor) leave the incumbent
    with no airtime, so no frames are at risk.
    """
    if not entrant_periods or m <= 0:
        return 0.0
    periods: list[float] = []
    clustered = set()
    for cluster in ideal_clusters or []:
        on = sum(1.0 / entrant_periods[i] for i in cluster)
        clustered.update(cluster)
        if on > 0.0:
            periods.append(1.0 / on)
    for i, p in enumerate(entrant_periods):
        if i not in clustered:
            periods.append(float(p))
    if any(p <= 1.0 for p in periods):
        return 0.0
    all_off = math.prod((p - 1.0) / p for p in periods)
    off_twice = math.prod(max(p - 2.0, 0.0) / p for p in periods)
    if all_off <= 0.0:
        return 0.0
    return min(1.0, (all_off - off_twice) / (all_off * m))
