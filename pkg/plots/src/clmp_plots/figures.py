"""CSV loading, figure definitions, and rendering with a diffable sidecar.

The input format is the simulation harness CSV:

    sweep_axis,sweep_value,detector,pmd,err,mean_time_s,median_time_s,trials,seed

Each figure name fixes which sweep axis it expects on the x-axis and which
column it plots on the y-axis; rows are grouped into one series per detector
label (labels carry the curve-family tag, e.g. ``clmp(K=10)``).  The sidecar
written next to the image echoes the raw x/y strings straight from the CSV,
never re-formatted floats, so it is diffable and traceable by construction.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_HEADER = (
    "sweep_axis",
    "sweep_value",
    "detector",
    "pmd",
    "err",
    "mean_time_s",
    "median_time_s",
    "trials",
    "seed",
)

_NUMERIC_COLUMNS = ("sweep_value", "pmd", "err", "mean_time_s", "median_time_s")


class SchemaError(ValueError):
    """The CSV does not match the harness schema; the message names the column."""


@dataclass(frozen=True)
class SweepPoint:
    """One CSV row: parsed floats for plotting, raw strings for the sidecar."""

    sweep_axis: str
    detector: str
    x: float
    x_raw: str
    values: dict[str, float]
    raw: dict[str, str]


@dataclass(frozen=True)
class FigureDef:
    x_axis: str  # required sweep_axis value in the CSV
    y_column: str  # CSV column plotted on the y-axis
    x_label: str
    y_label: str
    log_y_default: bool


FIGURES: dict[str, FigureDef] = {
    "pmd_vs_antennas": FigureDef(
        "n_antennas", "pmd", "receive antennas", "misdetection probability", True
    ),
    "err_vs_antennas": FigureDef(
        "n_antennas", "err", "receive antennas", "exact recovery rate", False
    ),
    "pmd_vs_pilot_len": FigureDef(
        "pilot_len", "pmd", "pilot length", "misdetection probability", True
    ),
    "err_vs_pilot_len": FigureDef(
        "pilot_len", "err", "pilot length", "exact recovery rate", False
    ),
    "pmd_vs_snr": FigureDef(
        "snr_db", "pmd", "cell-edge SNR (dB)", "misdetection probability", True
    ),
    "pmd_vs_devices": FigureDef(
        "n_devices", "pmd", "device count", "misdetection probability", True
    ),
    "runtime_vs_devices": FigureDef(
        "n_devices", "mean_time_s", "device count", "mean time per trial (s)", True
    ),
}


def load_rows(csv_path: str) -> list[SweepPoint]:
    """Parse a harness CSV, failing with the offending column named."""
    with open(csv_path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(
                "empty file: missing header row, expected columns "
                + ",".join(EXPECTED_HEADER)
            ) from None
        if tuple(header) != EXPECTED_HEADER:
            missing = [c for c in EXPECTED_HEADER if c not in header]
            extra = [c for c in header if c not in EXPECTED_HEADER]
            parts = []
            if missing:
                parts.append(f"missing column(s) {', '.join(missing)}")
            if extra:
                parts.append(f"unexpected column(s) {', '.join(extra)}")
            if not parts:
                parts.append("columns out of order")
            raise SchemaError("bad header: " + "; ".join(parts))
        points = []
        for lineno, fields in enumerate(reader, start=2):
            if not fields or fields == [""]:
                continue
            if len(fields) != len(EXPECTED_HEADER):
                raise SchemaError(
                    f"line {lineno}: expected {len(EXPECTED_HEADER)} fields, got {len(fields)}"
                )
            raw = dict(zip(EXPECTED_HEADER, fields))
            values = {}
            for col in _NUMERIC_COLUMNS:
                try:
                    values[col] = float(raw[col])
                except ValueError:
                    raise SchemaError(
                        f"line {lineno}: column {col!r} is not numeric: {raw[col]!r}"
                    ) from None
            points.append(
                SweepPoint(
                    sweep_axis=raw["sweep_axis"],
                    detector=raw["detector"],
                    x=values["sweep_value"],
                    x_raw=raw["sweep_value"],
                    values=values,
                    raw=raw,
                )
            )
    if not points:
        raise SchemaError("no data rows after the header")
    return points


def _series(points: list[SweepPoint]) -> dict[str, list[SweepPoint]]:
    out: dict[str, list[SweepPoint]] = {}
    for p in points:
        out.setdefault(p.detector, []).append(p)
    for pts in out.values():
        pts.sort(key=lambda p: p.x)  # stable: CSV order breaks x ties
    return dict(sorted(out.items()))


def _sidecar_text(name: str, fig_def: FigureDef, log_y: bool, series) -> str:
    lines = [
        f"figure: {name}",
        f"x: {fig_def.x_axis}",
        f"y: {fig_def.y_column} ({'log' if log_y else 'linear'} scale)",
        f"series: {len(series)}",
    ]
    for label, pts in series.items():
        lines.append(f"[{label}] points={len(pts)}")
        for p in pts:
            lines.append(f"{p.x_raw} {p.raw[fig_def.y_column]}")
    return "\n".join(lines) + "\n"


def render(
    name: str, csv_path: str, out_path: str, log_y: bool = False
) -> tuple[str, str]:
    """Render one figure and its sidecar; returns (image_path, sidecar_path)."""
    try:
        fig_def = FIGURES[name]
    except KeyError:
        raise SchemaError(
            f"unknown figure {name!r} (known: {', '.join(sorted(FIGURES))})"
        ) from None
    points = load_rows(csv_path)
    axes = {p.sweep_axis for p in points}
    if axes != {fig_def.x_axis}:
        raise SchemaError(
            f"column 'sweep_axis' holds {', '.join(sorted(axes))!s} but figure "
            f"{name!r} plots sweeps over {fig_def.x_axis!r}"
        )
    series = _series(points)
    log_y = log_y or fig_def.log_y_default

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, pts in series.items():
        ax.plot(
            [p.x for p in pts],
            [p.values[fig_def.y_column] for p in pts],
            marker="o",
            markersize=3.5,
            linewidth=1.2,
            label=label,
        )
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(fig_def.x_label)
    ax.set_ylabel(fig_def.y_label)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)

    sidecar_path = out_path + ".txt"
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        fh.write(_sidecar_text(name, fig_def, log_y, series))
    return os.path.abspath(out_path), os.path.abspath(sidecar_path)
