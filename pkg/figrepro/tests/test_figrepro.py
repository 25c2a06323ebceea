"""Chart regeneration from golden campaign CSVs."""
import subprocess
import sys
from pathlib import Path

import pytest

from figrepro.core import (FigureSpec, SchemaError, collect_series,
                           nearest_rank, read_point, render)

HEADER = "realization_id,ap_id,role,variant,channel,throughput_mbps\n"

VARIANTS = ("wifi", "laa", "lteu-fixed50", "lteu-adaptive", "lteu-ideal", "lte")


def write_campaign(path: Path, variant: str, n_entrant: int, n_real: int,
                   inc_value, ent_value) -> None:
    """Small synthetic campaign file: 1 incumbent + n entrants per realization."""
    rows = [HEADER]
    for rid in range(n_real):
        inc = inc_value(rid) if callable(inc_value) else inc_value
        rows.append(f"{rid},0,incumbent,wifi,3,{inc:.6f}\n")
        for k in range(n_entrant):
            ent = ent_value(rid, k) if callable(ent_value) else ent_value
            rows.append(f"{rid},{1 + k},entrant,{variant},7,{ent:.6f}\n")
    path.write_text("".join(rows))


def golden_inputs(tmp_path: Path, figure: str) -> list[Path]:
    paths = []
    for variant in VARIANTS:
        for n in (1, 2, 3):
            p = tmp_path / f"{figure}_{variant}_e{n}.csv"
            write_campaign(p, variant, n, n_real=20,
                           inc_value=lambda rid: 37.0 - 0.1 * (rid % 5),
                           ent_value=lambda rid, k: 80.0 - 2.0 * n - k - rid % 7)
            paths.append(p)
    return paths


def test_read_point_derives_entrant_count(tmp_path):
    p = tmp_path / "c.csv"
    write_campaign(p, "laa", 4, n_real=10, inc_value=30.0, ent_value=70.0)
    point = read_point(p)
    assert point.variant == "laa"
    assert point.n_entrant == 4
    assert len(point.values_by_role["incumbent"]) == 10
    assert len(point.values_by_role["entrant"]) == 40


@pytest.mark.parametrize("figure,panel", [("fig3", "median"), ("fig3", "p10"),
                                          ("fig4", "median"), ("fig4", "p10"),
                                          ("fig5", "median"), ("fig5", "p10")])
def test_render_all_figure_families(tmp_path, figure, panel):
    inputs = golden_inputs(tmp_path, figure)
    out = tmp_path / f"{figure}_{panel}.png"
    spec = FigureSpec(figure=figure, panel=panel, inputs=tuple(inputs),
                      output=out, require_all_variants=True)
    image, table = render(spec)
    assert image.exists() and image.stat().st_size > 0
    assert table.read_text().startswith("variant\tn_entrant\tthroughput_mbps")


def test_companion_table_matches_csv_percentiles(tmp_path):
    inputs = golden_inputs(tmp_path, "fig4")
    spec = FigureSpec(figure="fig4", panel="p10", inputs=tuple(inputs),
                      output=tmp_path / "f.png")
    _, table = render(spec)
    lines = table.read_text().splitlines()[1:]
    got = {(row.split("\t")[0], int(row.split("\t")[1])):
           float(row.split("\t")[2]) for row in lines}
    # recompute one cell straight from its CSV
    point = read_point(tmp_path / "fig4_laa_e2.csv")
    expect = nearest_rank(point.values_by_role["entrant"], 10.0)
    assert got[("laa", 2)] == pytest.approx(expect, abs=1e-9)
    assert len(got) == len(VARIANTS) * 3


def test_companion_table_byte_identical(tmp_path):
    inputs = golden_inputs(tmp_path, "fig5")
    spec = FigureSpec(figure="fig5", panel="median", inputs=tuple(inputs),
                      output=tmp_path / "a.png")
    _, t1 = render(spec)
    first = t1.read_bytes()
    spec2 = FigureSpec(figure="fig5", panel="median", inputs=tuple(inputs),
                       output=tmp_path / "a.png")
    _, t2 = render(spec2)
    assert t2.read_bytes() == first


def test_six_series_legend_cardinality(tmp_path):
    inputs = []
    for variant in VARIANTS:
        p = tmp_path / f"one_{variant}.csv"
        write_campaign(p, variant, 1, n_real=5, inc_value=37.0, ent_value=50.0)
        inputs.append(p)
    spec = FigureSpec(figure="fig4", panel="median", inputs=tuple(inputs),
                      output=tmp_path / "six.png")
    series = collect_series(spec)
    assert len(series) == 6


def test_constant_series_is_flat(tmp_path):
    inputs = []
    for n in (1, 2, 3):
        p = tmp_path / f"flat_e{n}.csv"
        write_campaign(p, "laa", n, n_real=8, inc_value=37.0, ent_value=78.0)
        inputs.append(p)
    spec = FigureSpec(figure="fig3", panel="median", inputs=tuple(inputs),
                      output=tmp_path / "flat.png")
    series = collect_series(spec)
    assert [v for _, v in series["laa"]] == [37.0, 37.0, 37.0]


def test_empty_file_is_schema_error(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(SchemaError):
        read_point(p)


def test_wrong_header_is_schema_error(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(SchemaError):
        read_point(p)


def test_missing_variant_series_error(tmp_path):
    p = tmp_path / "only_laa.csv"
    write_campaign(p, "laa", 2, n_real=5, inc_value=30.0, ent_value=70.0)
    spec = FigureSpec(figure="fig4", panel="median", inputs=(p,),
                      output=tmp_path / "x.png", require_all_variants=True)
    with pytest.raises(SchemaError, match="missing variant"):
        render(spec)


def test_cli_round_trip(tmp_path):
    inputs = golden_inputs(tmp_path, "fig5")
    out = tmp_path / "fig5a.png"
    proc = subprocess.run(
        [sys.executable, "-m", "figrepro.cli", "--figure", "fig5",
         "--panel", "median", "--in", str(tmp_path / "fig5_*.csv"),
         "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists() and out.with_suffix(".txt").exists()


def test_cli_empty_input_nonzero_exit(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    proc = subprocess.run(
        [sys.executable, "-m", "figrepro.cli", "--figure", "fig3",
         "--panel", "median", "--in", str(p), "--out",
         str(tmp_path / "o.png")],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "error" in proc.stderr
