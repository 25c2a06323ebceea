"""Channel selection mechanisms."""
import collections

import numpy as np
from scipy.stats import chisquare

from coexsim.channels import assign_channels
from coexsim.geometry import generate_topology, stream
from coexsim.model import ChannelMode, default_config


def make(cfg, seed=1, rid=0):
    topo = generate_topology(cfg, seed, rid)
    return topo, stream(seed, rid, 3), stream(seed, rid, 4)


def test_forced_co_channel_all_zero():
    cfg = default_config("indoor-indoor", n_incumbent=10, n_entrant=10,
                         channel_mode=ChannelMode.FORCED_CO_CHANNEL)
    topo, ri, re = make(cfg)
    assignment = assign_channels(topo, cfg, ri, re)
    assert all(assignment[ap.id] == 0 for ap in topo.aps)


def test_channels_within_pools():
    cfg = default_config("outdoor-outdoor", n_incumbent=5, n_entrant=5,
                         channel_mode=ChannelMode.RANDOM)
    for rid in range(20):
        topo, ri, re = make(cfg, rid=rid)
        assignment = assign_channels(topo, cfg, ri, re)
        for ap in topo.aps:
            assert 0 <= assignment[ap.id] < 11


def test_sense_avoids_single_incumbent():
    cfg = default_config("indoor-indoor", n_incumbent=1, n_entrant=1,
                         channel_mode=ChannelMode.SENSE)
    for rid in range(200):
        topo, ri, re = make(cfg, rid=rid)
        assignment = assign_channels(topo, cfg, ri, re)
        inc = next(ap for ap in topo.aps if ap.role == "incumbent")
        ent = next(ap for ap in topo.aps if ap.role == "entrant")
        assert assignment[ent.id] != assignment[inc.id]


def test_sense_never_shares_when_channels_sufficient():
    cfg = default_config("indoor-indoor", n_incumbent=10, n_entrant=9,
                         channel_mode=ChannelMode.SENSE)
    for rid in range(50):
        topo, ri, re = make(cfg, rid=rid)
        assignment = assign_channels(topo, cfg, ri, re)
        inc_channels = {assignment[ap.id] for ap in topo.aps
                        if ap.role == "incumbent"}
        for ap in topo.aps:
            if ap.role == "entrant":
                assert assignment[ap.id] not in inc_channels


class _SeqRng:
    """Deterministic stand-in for a Generator: integers() pops a queue."""

    def __init__(self, values):
        self.values = list(values)

    def integers(self, lo, hi):
        v = self.values.pop(0)
        assert lo <= v < hi
        return v


def test_sense_tie_break_fewest_incumbents():
    # 12 incumbents on 12 distinct channels; the 11-channel entrant pool is
    # occupied exactly once everywhere, so all entrant channels tie
    cfg = default_config("indoor-outdoor", n_entrant=1, n_incumbent=12,
                         incumbent_density_per_km2=None,
                         channel_mode=ChannelMode.SENSE)
    topo, _, _ = make(cfg)
    seen = set()
    for pick in range(11):
        assignment = assign_channels(topo, cfg, _SeqRng(range(12)),
                                     _SeqRng([pick]))
        ent = next(ap for ap in topo.aps if ap.role == "entrant")
        seen.add(assignment[ent.id])
    assert seen == set(range(11))


def test_sense_all_occupied_picks_fewest():
    cfg = default_config("indoor-indoor", n_incumbent=10, n_entrant=1,
                         channel_mode=ChannelMode.SENSE, n_channels_entrant=2,
                         n_channels_incumbent=2)
    counts = collections.Counter()
    for rid in range(300):
        topo, ri, re = make(cfg, rid=rid)
        assignment = assign_channels(topo, cfg, ri, re)
        inc_counts = collections.Counter(assignment[ap.id] for ap in topo.aps
                                         if ap.role == "incumbent")
        ent = next(ap for ap in topo.aps if ap.role == "entrant")
        ch = assignment[ent.id]
        if len(inc_counts) == 2 and inc_counts[0] != inc_counts[1]:
            assert ch == min(inc_counts, key=inc_counts.get)
            counts["fewest"] += 1
    assert counts["fewest"] > 50


def test_random_assignment_uniform_chi_square():
    # 1e5 incumbent draws over 19 channels at 1% significance
    cfg = default_config("indoor-indoor", n_incumbent=10, n_entrant=0,
                         channel_mode=ChannelMode.RANDOM)
    draws = []
    for rid in range(10_000):
        topo, ri, re = make(cfg, rid=rid)
        assignment = assign_channels(topo, cfg, ri, re)
        draws.extend(assignment.channels.values())
    counts = np.bincount(draws, minlength=19)
    assert counts.sum() == 100_000
    _, p = chisquare(counts)
    assert p > 0.01
