"""Sweep indoor wall-attenuation parameters against the acceptance anchors.

Reports, per (wall_loss_db, wall_decay) candidate:
  zero1/zero6/zero7 - fraction of realizations with a silenced incumbent for
                      1/6/7 always-on co-channel entrants (want ~0.115 / <0.47
                      / >0.53 so the median crosses zero between 6 and 7 and
                      the 10th percentile is zero at every count)
  fig3p10           - 10-incumbent sense-selection 10th percentile (want ~19)
  d_wifi / d_laa    - dense forced co-channel 10th percentiles for all-Wi-Fi
                      (want ~5) and LAA entrants (want <= 1)
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from coexsim.campaign import nearest_rank, run_realization
from coexsim.model import (ChannelMode, PropagationParams, TechVariant,
                           default_config)


def zero_fraction(cfg, n_real):
    zeros = 0
    for rid in range(n_real):
        recs = run_realization(cfg, rid)
        inc = [r for r in recs if r.role == "incumbent"]
        zeros += all(r.throughput_mbps <= 1e-9 for r in inc)
    return zeros / n_real


def p10_role(cfg, n_real, role):
    vals = []
    for rid in range(n_real):
        vals.extend(r.throughput_mbps for r in run_realization(cfg, rid)
                    if r.role == role)
    return nearest_rank(vals, 10), nearest_rank(vals, 50)


def evaluate(lw, decay, n_real, seed=1):
    prop = PropagationParams(wall_loss_db=lw, wall_decay=decay)

    def cfg(**kw):
        base = default_config("indoor-indoor", base_seed=seed, **kw)
        return replace(base, propagation=prop)

    out = {"lw": lw, "decay": decay}
    for n in (1, 6, 7):
        c = cfg(n_incumbent=1, n_entrant=n,
                entrant_variant=TechVariant.LTE_PLAIN,
                channel_mode=ChannelMode.FORCED_CO_CHANNEL)
        out[f"zero{n}"] = zero_fraction(c, n_real)
    c = cfg(n_incumbent=10, n_entrant=5, entrant_variant=TechVariant.LAA,
            channel_mode=ChannelMode.SENSE)
    out["fig3p10"], out["fig3med"] = p10_role(c, n_real // 2, "incumbent")
    c = cfg(n_incumbent=10, n_entrant=10, entrant_variant=TechVariant.WIFI,
            channel_mode=ChannelMode.FORCED_CO_CHANNEL)
    out["d_wifi"], _ = p10_role(c, n_real // 2, "incumbent")
    c = cfg(n_incumbent=10, n_entrant=10, entrant_variant=TechVariant.LAA,
            channel_mode=ChannelMode.FORCED_CO_CHANNEL)
    out["d_laa"], _ = p10_role(c, n_real // 2, "incumbent")
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--walls", type=float, nargs="+",
                    default=[9.0, 10.0, 11.0, 12.0])
    ap.add_argument("--decays", type=float, nargs="+", default=[0.7, 0.8])
    ap.add_argument("-n", type=int, default=600)
    args = ap.parse_args()
    print("lw    decay  zero1  zero6  zero7  fig3p10 fig3med d_wifi d_laa")
    for lw in args.walls:
        for decay in args.decays:
            r = evaluate(lw, decay, args.n)
            print(f"{r['lw']:4.1f}  {r['decay']:.2f}  {r['zero1']:.3f}  "
                  f"{r['zero6']:.3f}  {r['zero7']:.3f}  {r['fig3p10']:6.2f}  "
                  f"{r['fig3med']:6.2f}  {r['d_wifi']:5.2f}  {r['d_laa']:5.2f}")
            sys.stdout.flush()


if __name__ == "__main__":
    main()
