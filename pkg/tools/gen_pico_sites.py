"""Generate the fixed 20-point outdoor pico-site coordinate file.

The sites are a jittered grid inside the 346 m x 389 m study area with a
minimum pairwise separation, a synthetic stand-in with central-urban
small-cell spacing.  Regenerate with:

    python tools/gen_pico_sites.py --seed 7 --out src/coexsim/data/pico_sites.txt
"""
from __future__ import annotations

import argparse

import numpy as np

AREA = (346.0, 389.0)


def generate(seed: int, n: int = 20, margin: float = 30.0,
             min_sep: float = 40.0, jitter: float = 18.0,
             cols: int = 4, rows: int = 5,
             scale: float = 1.0) -> np.ndarray:
    """Jittered grid, rescaled about the area centre by `scale`."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(margin, AREA[0] - margin, cols)
    ys = np.linspace(margin, AREA[1] - margin, rows)
    base = np.array([(x, y) for y in ys for x in xs])
    centre = np.array(AREA) / 2.0
    base = centre + (base - centre) * scale
    for _ in range(10_000):
        pts = base + rng.uniform(-jitter, jitter, size=base.shape)
        pts = np.clip(pts, 5.0, np.array(AREA) - 5.0)
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        np.fill_diagonal(d, np.inf)
        if d.min() >= min_sep:
            return pts[:n]
    raise RuntimeError("could not satisfy the minimum separation")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--jitter", type=float, default=18.0)
    ap.add_argument("--min-sep", type=float, default=40.0)
    ap.add_argument("--out", default="src/coexsim/data/pico_sites.txt")
    args = ap.parse_args()
    pts = generate(args.seed, jitter=args.jitter, min_sep=args.min_sep,
                   scale=args.scale)
    with open(args.out, "w") as fh:
        fh.write("# 20 outdoor pico-site coordinates (metres), one 'x y' per line\n")
        for x, y in pts:
            fh.write(f"{x:.2f} {y:.2f}\n")
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    np.fill_diagonal(d, np.inf)
    print(f"wrote {args.out}; nearest-neighbour distances "
          f"{d.min(axis=0).min():.1f}..{d.min(axis=0).max():.1f} m")


if __name__ == "__main__":
    main()
