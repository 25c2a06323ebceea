"""Independent reference models used to validate the analytical MAC terms.

These stay deliberately separate from the package implementation: a
discrete-event slot-level CSMA/CA simulator for the backoff fixed point, and
a slot-level duty-cycle simulator for airtime overlap and frame-collision
statistics.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass


@dataclass
class DcfStation:
    frame_us: float
    useful_us: float
    stage: int = 0
    counter: int = 0
    successes: int = 0
    useful_time: float = 0.0


def simulate_dcf(frames_useful: list[tuple[float, float]], rounds: int,
                 seed: int, cw_min: int = 15, cw_max: int = 1023,
                 slot_us: float = 9.0, difs_us: float = 34.0) -> dict:
    """Slot-level saturation CSMA/CA with binary exponential backoff.

    Every channel event (idle slot, success, collision) is one backoff round:
    stations at zero transmit, everyone else decrements.  Collisions occupy
    the longest colliding frame.  Returns per-station success counts, useful
    airtime, and total elapsed time in microseconds.
    """
    rng = random.Random(seed)
    stations = [DcfStation(f, u) for f, u in frames_useful]

    def resample(st: DcfStation) -> None:
        cw = min((cw_min + 1) << st.stage, cw_max + 1) - 1
        st.counter = rng.randint(0, cw)

    for st in stations:
        resample(st)

    elapsed = 0.0
    for _ in range(rounds):
        txers = [st for st in stations if st.counter == 0]
        if not txers:
            elapsed += slot_us
        elif len(txers) == 1:
            st = txers[0]
            elapsed += st.frame_us + difs_us
            st.successes += 1
            st.useful_time += st.useful_us
            st.stage = 0
            resample(st)
        else:
            elapsed += max(st.frame_us for st in txers) + difs_us
            for st in txers:
                st.stage = min(st.stage + 1, 6)
                resample(st)
        for st in stations:
            if st not in txers:
                st.counter -= 1
    return {
        "elapsed_us": elapsed,
        "successes": [st.successes for st in stations],
        "useful_us": [st.useful_time for st in stations],
    }


def dcf_per_station_s(frames_useful: list[tuple[float, float]], rounds: int,
                      seed: int, difs_us: float = 34.0) -> list[float]:
    """Empirical S under equal time sharing with waste split evenly.

    S_i = useful_i / (own cycle + equal share of idle and collision time);
    for identical stations this equals N * useful airtime / elapsed time.
    """
    out = simulate_dcf(frames_useful, rounds, seed, difs_us=difs_us)
    n = len(frames_useful)
    success_time = sum(s * (f + difs_us)
                       for s, (f, _) in zip(out["successes"], frames_useful))
    waste = out["elapsed_us"] - success_time
    result = []
    for (frame, useful), succ in zip(frames_useful, out["successes"]):
        cycle = frame + difs_us + waste / (n * succ)
        result.append(useful / cycle)
    return result


def enumerate_duty_cycles(periods: list[int], m_frames_per_slot: int) -> dict:
    """Exact slotted ON/OFF oracle for independently chosen transmit slots.

    Each entrant j picks one slot offset uniformly from 0..periods[j]-1 and
    transmits in that slot of every period.  All offset combinations are
    enumerated over one LCM-length steady-state cycle.  An incumbent
    transmits m frames per all-OFF slot; the frame in flight at a slot
    boundary is lost when any entrant turns ON there.
    """
    horizon = math.lcm(*periods)
    combos = list(itertools.product(*(range(p) for p in periods)))
    off_slots = 0
    frames_sent = 0
    frames_lost = 0
    overlap_pairs: dict[tuple[int, int], int] = {}
    on_totals = [0] * len(periods)
    for offsets in combos:
        on = [[(t % periods[j]) == offsets[j] for t in range(horizon)]
              for j in range(len(periods))]
        all_off = [not any(col) for col in zip(*on)]
        off_slots += sum(all_off)
        for t in range(horizon):
            if all_off[t]:
                frames_sent += m_frames_per_slot
                if not all_off[(t + 1) % horizon]:
                    frames_lost += 1
        for j in range(len(periods)):
            on_totals[j] += sum(on[j])
            for k in range(j + 1, len(periods)):
                both = sum(1 for t in range(horizon) if on[j][t] and on[k][t])
                overlap_pairs[(j, k)] = overlap_pairs.get((j, k), 0) + both
    total_slots = horizon * len(combos)
    return {
        "off_fraction": off_slots / total_slots,
        "r_deg": frames_lost / frames_sent if frames_sent else 0.0,
        # joint-ON airtime as a fraction of the more-often-ON station's
        # airtime; symmetric in the pair
        "overlap": {pair: both / max(on_totals[pair[0]], on_totals[pair[1]])
                    for pair, both in overlap_pairs.items()},
    }
