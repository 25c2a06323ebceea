"""Operating-channel assignment for incumbents and entrants."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Topology
from .model import ChannelMode, ScenarioConfig


@dataclass(frozen=True)
class ChannelAssignment:
    """Map AP id -> 20 MHz channel index, plus the pools that produced it."""

    channels: dict[int, int]
    incumbent_pool: tuple[int, ...]
    entrant_pool: tuple[int, ...]

    def __getitem__(self, ap_id: int) -> int:
        return self.channels[ap_id]

    def co_channel(self, a: int, b: int) -> bool:
        return self.channels[a] == self.channels[b]


def assign_channels(topology: Topology, cfg: ScenarioConfig,
                    rng_inc: np.random.Generator,
                    rng_ent: np.random.Generator,
                    cs_detectable: dict[int, set[int]] | None = None,
                    ) -> ChannelAssignment:
    """Assign one channel per AP under the configured selection mechanism.

    Incumbents always pick uniformly at random from their pool.  Entrants pick
    per cfg.channel_mode: uniform (random), an incumbent-free channel with a
    fewest-incumbents fallback (sense), or channel 0 for everyone (forced
    co-channel).  Sense counts incumbents globally unless cfg.sense_scope is
    "cs-range", in which case only incumbents in `cs_detectable[ap_id]` count.
    """
    inc_pool = tuple(range(cfg.n_channels_incumbent))
    ent_pool = tuple(range(cfg.n_channels_entrant))
    if not inc_pool or not ent_pool:
        raise ValueError("empty channel pool")
    channels: dict[int, int] = {}

    if cfg.channel_mode is ChannelMode.FORCED_CO_CHANNEL:
        for ap in topology.aps:
            channels[ap.id] = 0
        return ChannelAssignment(channels, inc_pool, ent_pool)

    incumbents = [ap for ap in topology.aps if ap.role == "incumbent"]
    entrants = [ap for ap in topology.aps if ap.role == "entrant"]
    for ap in incumbents:
        channels[ap.id] = int(rng_inc.integers(0, len(inc_pool)))

    if cfg.channel_mode is ChannelMode.RANDOM:
        for ap in entrants:
            channels[ap.id] = int(rng_ent.integers(0, len(ent_pool)))
        return ChannelAssignment(channels, inc_pool, ent_pool)

    # sense: evaluated per entrant in AP-id order against incumbent occupancy
    for ap in sorted(entrants, key=lambda a: a.id):
        if cs_detectable is not None:
            visible = cs_detectable.get(ap.id, set())
            counted = [i for i in incumbents if i.id in visible]
        else:
            counted = incumbents
        occupancy = [0] * len(ent_pool)
        for inc in counted:
            ch = channels[inc.id]
            if ch < len(ent_pool):
                occupancy[ch] += 1
        free = [c for c in ent_pool if occupancy[c] == 0]
        if free:
            pick = free[int(rng_ent.integers(0, len(free)))]
        else:
            fewest = min(occupancy)
            tied = [c for c in ent_pool if occupancy[c] == fewest]
            pick = tied[int(rng_ent.integers(0, len(tied)))]
        channels[ap.id] = pick
    return ChannelAssignment(channels, inc_pool, ent_pool)
