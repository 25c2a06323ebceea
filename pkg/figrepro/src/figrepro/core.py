"""Chart regeneration from campaign CSV files.

Reads per-AP throughput records produced by the simulator CLI (columns:
realization_id, ap_id, role, variant, channel, throughput_mbps), derives the
entrant count of each file from its own rows, and draws throughput versus
entrant count with one line per entrant variant.  No simulation results are
recomputed here; every plotted number is a percentile of the CSV rows, and
the same numbers are written next to the image as a diffable text table.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_COLUMNS = ("realization_id", "ap_id", "role", "variant", "channel",
               "throughput_mbps")

VARIANT_ORDER = ("wifi", "laa", "lteu-fixed50", "lteu-adaptive",
                 "lteu-ideal", "lte")

FIGURE_ROLE = {"fig3": "incumbent", "fig4": "entrant", "fig5": "incumbent"}
FIGURE_TITLE = {
    "fig3": "Incumbent throughput, indoor/indoor, sense selection",
    "fig4": "Entrant throughput, outdoor/outdoor, sense selection",
    "fig5": "Incumbent throughput, indoor/indoor, forced co-channel",
}
PANEL_PERCENTILE = {"median": 50.0, "p10": 10.0}


class SchemaError(ValueError):
    """The input file does not look like campaign CSV output."""


@dataclass(frozen=True)
class FigureSpec:
    figure: str                      # fig3 | fig4 | fig5
    panel: str                       # median | p10
    inputs: tuple[Path, ...]
    output: Path
    require_all_variants: bool = False

    def __post_init__(self):
        if self.figure not in FIGURE_ROLE:
            raise ValueError(f"unknown figure {self.figure!r}")
        if self.panel not in PANEL_PERCENTILE:
            raise ValueError(f"unknown panel {self.panel!r}")
        if not self.inputs:
            raise SchemaError("no input files")


@dataclass
class FilePoint:
    """One campaign CSV reduced to what the charts need."""

    variant: str
    n_entrant: int
    values_by_role: dict[str, list[float]] = field(default_factory=dict)


def nearest_rank(values: list[float], percentile: float) -> float:
    if not values:
        raise SchemaError("empty ensemble")
    ordered = sorted(values)
    rank = max(1, math.ceil(percentile / 100.0 * len(ordered)))
    return ordered[rank - 1]


def read_point(path: Path) -> FilePoint:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != CSV_COLUMNS:
            raise SchemaError(f"{path}: unexpected header {header}")
        realizations = set()
        entrant_rows = 0
        variants = set()
        values_by_role: dict[str, list[float]] = {}
        for line, row in enumerate(reader, start=2):
            if len(row) != len(CSV_COLUMNS):
                raise SchemaError(f"{path}:{line}: malformed row")
            realization, _, role, variant, _, mbps = row
            realizations.add(realization)
            values_by_role.setdefault(role, []).append(float(mbps))
            if role == "entrant":
                entrant_rows += 1
                variants.add(variant)
    if not realizations:
        raise SchemaError(f"{path}: no records")
    if len(variants) > 1:
        raise SchemaError(f"{path}: mixed entrant variants {sorted(variants)}")
    n_entrant, rem = divmod(entrant_rows, len(realizations))
    if rem:
        raise SchemaError(f"{path}: entrant rows not a multiple of realizations")
    variant = variants.pop() if variants else "none"
    return FilePoint(variant, n_entrant, values_by_role)


def collect_series(spec: FigureSpec) -> dict[str, list[tuple[int, float]]]:
    """variant -> sorted (n_entrant, percentile value) points."""
    role = FIGURE_ROLE[spec.figure]
    pct = PANEL_PERCENTILE[spec.panel]
    series: dict[str, list[tuple[int, float]]] = {}
    for path in spec.inputs:
        point = read_point(Path(path))
        values = point.values_by_role.get(role)
        if not values:
            raise SchemaError(f"{path}: no {role} records")
        if point.variant == "none":
            continue          # entrant-free baseline has no series to join
        series.setdefault(point.variant, []).append(
            (point.n_entrant, nearest_rank(values, pct)))
    if not series:
        raise SchemaError("inputs held no entrant series")
    missing = [v for v in VARIANT_ORDER if v not in series]
    if spec.require_all_variants and missing:
        raise SchemaError(f"missing variant series: {missing}")
    for points in series.values():
        points.sort()
    return series


def table_text(series: dict[str, list[tuple[int, float]]]) -> str:
    lines = ["variant\tn_entrant\tthroughput_mbps"]
    for variant in sorted(series, key=lambda v: (VARIANT_ORDER.index(v)
                                                 if v in VARIANT_ORDER else 99,
                                                 v)):
        for n, value in series[variant]:
            lines.append(f"{variant}\t{n}\t{value:.6f}")
    return "\n".join(lines) + "\n"


def render(spec: FigureSpec) -> tuple[Path, Path]:
    """Write the chart and its companion data table; returns both paths."""
    series = collect_series(spec)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for variant in VARIANT_ORDER:
        if variant not in series:
            continue
        xs = [n for n, _ in series[variant]]
        ys = [v for _, v in series[variant]]
        ax.plot(xs, ys, marker="o", label=variant)
    for variant in series:
        if variant not in VARIANT_ORDER:
            xs, ys = zip(*series[variant])
            ax.plot(xs, ys, marker="o", label=variant)
    ax.set_xlabel("number of entrant APs")
    ax.set_ylabel("throughput (Mbps)")
    ax.set_title(f"{FIGURE_TITLE[spec.figure]} ({spec.panel})")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output)
    fig.savefig(out, dpi=120)
    plt.close(fig)

    table_path = out.with_suffix(".txt")
    table_path.write_text(table_text(series))
    return out, table_path
