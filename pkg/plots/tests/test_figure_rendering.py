"""Unit tests for CSV loading, schema errors, and sidecar rendering."""

import subprocess
import sys

import pytest

from clmp_plots import FIGURES, SchemaError, load_rows, render
from clmp_plots.cli import main

HEADER = "sweep_axis,sweep_value,detector,pmd,err,mean_time_s,median_time_s,trials,seed"


def _csv(tmp_path, rows, header=HEADER, name="r.csv"):
    path = tmp_path / name
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return path


_TWO_SERIES = [
    "n_antennas,20,clmp,0.01,0.9,0.03,0.028,100,1",
    "n_antennas,10,clmp,0.2,0.5,0.031,0.03,100,1",
    "n_antennas,10,cwo,0.25,0.45,0.1,0.09,100,1",
    "n_antennas,20,cwo,0.012,0.88,0.11,0.1,100,1",
]


def test_render_writes_image_and_sorted_sidecar(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    out = tmp_path / "fig.png"
    image, sidecar = render("pmd_vs_antennas", str(csv_path), str(out))
    assert out.exists() and out.stat().st_size > 0
    expected = (
        "figure: pmd_vs_antennas\n"
        "x: n_antennas\n"
        "y: pmd (log scale)\n"
        "series: 2\n"
        "[clmp] points=2\n"
        "10 0.2\n"
        "20 0.01\n"
        "[cwo] points=2\n"
        "10 0.25\n"
        "20 0.012\n"
    )
    assert (tmp_path / "fig.png.txt").read_text(encoding="utf-8") == expected
    assert sidecar.endswith("fig.png.txt")


def test_rerender_is_byte_identical(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    out = tmp_path / "fig.png"
    render("pmd_vs_antennas", str(csv_path), str(out))
    first = (tmp_path / "fig.png.txt").read_bytes()
    render("pmd_vs_antennas", str(csv_path), str(out))
    assert (tmp_path / "fig.png.txt").read_bytes() == first


def test_err_figure_linear_by_default_log_on_request(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    render("err_vs_antennas", str(csv_path), str(tmp_path / "a.png"))
    assert "y: err (linear scale)" in (tmp_path / "a.png.txt").read_text(encoding="utf-8")
    render("err_vs_antennas", str(csv_path), str(tmp_path / "b.png"), log_y=True)
    assert "y: err (log scale)" in (tmp_path / "b.png.txt").read_text(encoding="utf-8")


def test_runtime_figure_plots_mean_time(tmp_path):
    rows = [
        "n_devices,1000,clmp,0.01,0.9,0.034,0.033,5,1",
        "n_devices,2000,clmp,0.01,0.9,0.068,0.067,5,1",
    ]
    csv_path = _csv(tmp_path, rows)
    render("runtime_vs_devices", str(csv_path), str(tmp_path / "t.png"))
    text = (tmp_path / "t.png.txt").read_text(encoding="utf-8")
    assert "1000 0.034" in text and "2000 0.068" in text


def test_empty_file_names_missing_header(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(SchemaError, match="sweep_axis"):
        load_rows(str(path))


def test_missing_column_is_named(tmp_path):
    bad_header = HEADER.replace(",pmd", "")
    csv_path = _csv(tmp_path, ["n_antennas,10,clmp,0.5,0.03,0.03,100,1"], header=bad_header)
    with pytest.raises(SchemaError, match="pmd"):
        load_rows(str(csv_path))


def test_non_numeric_value_names_column_and_line(tmp_path):
    csv_path = _csv(tmp_path, ["n_antennas,10,clmp,oops,0.5,0.03,0.03,100,1"])
    with pytest.raises(SchemaError, match="line 2.*'pmd'"):
        load_rows(str(csv_path))


def test_short_row_rejected(tmp_path):
    csv_path = _csv(tmp_path, ["n_antennas,10,clmp,0.1"])
    with pytest.raises(SchemaError, match="expected 9 fields"):
        load_rows(str(csv_path))


def test_header_only_rejected(tmp_path):
    csv_path = _csv(tmp_path, [])
    with pytest.raises(SchemaError, match="no data rows"):
        load_rows(str(csv_path))


def test_axis_mismatch_rejected(tmp_path):
    csv_path = _csv(tmp_path, ["pilot_len,32,clmp,0.1,0.5,0.03,0.03,100,1"])
    with pytest.raises(SchemaError, match="sweep_axis"):
        render("pmd_vs_antennas", str(csv_path), str(tmp_path / "x.png"))


def test_unknown_figure_rejected(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    with pytest.raises(SchemaError, match="unknown figure"):
        render("pmd_vs_time", str(csv_path), str(tmp_path / "x.png"))


def test_every_figure_definition_renders(tmp_path):
    for name, fig_def in FIGURES.items():
        rows = [
            f"{fig_def.x_axis},10,clmp,0.1,0.5,0.03,0.03,100,1",
            f"{fig_def.x_axis},20,clmp,0.05,0.7,0.06,0.06,100,1",
        ]
        csv_path = _csv(tmp_path, rows, name=f"{name}.csv")
        render(name, str(csv_path), str(tmp_path / f"{name}.png"))
        assert (tmp_path / f"{name}.png.txt").exists()


def test_cli_success_and_schema_failure(tmp_path, capsys):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    out = tmp_path / "cli.png"
    assert main(["--csv", str(csv_path), "--figure", "pmd_vs_antennas", "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out

    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    assert main(["--csv", str(empty), "--figure", "pmd_vs_antennas", "--out", str(out)]) == 2
    assert "sweep_axis" in capsys.readouterr().err


def test_cli_rejects_unknown_figure_name(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    with pytest.raises(SystemExit):
        main(["--csv", str(csv_path), "--figure", "nope", "--out", str(tmp_path / "x.png")])


def test_installed_entry_point_roundtrip(tmp_path):
    csv_path = _csv(tmp_path, _TWO_SERIES)
    out = tmp_path / "ep.png"
    proc = subprocess.run(
        [sys.executable, "-m", "clmp_plots.cli", "--csv", str(csv_path),
         "--figure", "pmd_vs_antennas", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
