#    Copyright 2024 crossdiff developers
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at

#         http://www.apache.org/licenses/LICENSE-2.0

#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""CSV and SVG artifacts written by the experiment runner.

All numbers go through :func:`crossdiff.repr_utils.format_float` (CSV) or a
fixed-precision format (SVG), so identical results give identical bytes.
"""

from __future__ import annotations

import csv
import pathlib
import typing
from typing import TYPE_CHECKING
from typing import Any

from crossdiff.exceptions import ArtifactError
from crossdiff.repr_utils import format_float

if TYPE_CHECKING:
    from collections.abc import Iterable
    from collections.abc import Sequence

    from crossdiff.dynamics import Trajectory
    from crossdiff.grid import DensityPair
    from crossdiff.minimise import DescentTrace
    from crossdiff.transport import JKORun

__all__ = (
    "PlotStyle",
    "emit_plot",
    "read_series_csv",
    "write_descent_trace",
    "write_jko_run",
    "write_pair_csv",
    "write_rows",
    "write_trajectory",
)

PathLike = typing.Union[str, pathlib.Path]


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> pathlib.Path:
    """Write a CSV file with ``\\n`` line endings and stable float text.

    :param path: target file
    :type path: str | pathlib.Path
    :param header: column names
    :type header: Sequence[str]
    :param rows: data rows
    :type rows: Iterable[Sequence[Any]]
    :return: written path
    :rtype: pathlib.Path
    """
    target = pathlib.Path(path)
    with target.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return target


def write_pair_csv(pair: DensityPair, path: PathLike) -> pathlib.Path:
    """Snapshot file ``x,rho,eta,sigma``."""
    rho, eta = pair.rho.values, pair.eta.values
    return write_rows(
        path,
        ("x", "rho", "eta", "sigma"),
        ((float(x), float(r), float(e), float(r + e)) for x, r, e in zip(pair.grid.centers, rho, eta)),
    )


def write_trajectory(trajectory: Trajectory, out_dir: PathLike, prefix: str = "snapshot") -> list[pathlib.Path]:
    """One snapshot CSV per output time plus ``trace.csv``.

    Snapshots are numbered in time order (``snapshot_000.csv``...); the time
    of each is in ``snapshots.csv``.

    :param trajectory: run result
    :type trajectory: Trajectory
    :param out_dir: existing directory
    :type out_dir: str | pathlib.Path
    :param prefix: snapshot file prefix
    :type prefix: str
    :return: written paths, snapshots first
    :rtype: list[pathlib.Path]
    """
    folder = pathlib.Path(out_dir)
    written: list[pathlib.Path] = []
    index_rows: list[tuple[int, float, str]] = []
    for k, (t, pair) in enumerate(trajectory.snapshots):
        name = f"{prefix}_{k:03d}.csv"
        written.append(write_pair_csv(pair, folder / name))
        index_rows.append((k, float(t), name))
    written.append(write_rows(folder / f"{prefix}s.csv", ("index", "t", "file"), index_rows))
    written.append(
        write_rows(
            folder / "trace.csv",
            ("t", "energy", "mass_rho", "mass_eta", "overlap"),
            (rec[:5] for rec in trajectory.energy_trace),
        )
    )
    return written


def write_descent_trace(trace: DescentTrace, path: PathLike) -> pathlib.Path:
    """Descent trace ``iter,energy,step_size,overlap,gap``."""
    return write_rows(path, ("iter", "energy", "step_size", "overlap", "gap"), trace.records)


def write_jko_run(run: JKORun, out_dir: PathLike) -> list[pathlib.Path]:
    """Per-step snapshot CSVs and ``objective.csv``."""
    folder = pathlib.Path(out_dir)
    written = [write_pair_csv(pair, folder / f"jko_{k:03d}.csv") for k, (_, pair) in enumerate(run.snapshots)]
    written.append(
        write_rows(
            folder / "objective.csv",
            ("step", "t", "objective", "energy", "overlap", "iterations"),
            run.records,
        )
    )
    return written


def read_series_csv(path: PathLike) -> tuple[list[str], list[list[float]]]:
    """Read a numeric CSV into its header and columns.

    :param path: CSV file with a header row
    :type path: str | pathlib.Path
    :return: (header, columns)
    :rtype: tuple[list[str], list[list[float]]]
    :raises ArtifactError: missing header, ragged rows or non-numeric cells
    """
    with pathlib.Path(path).open(newline="", encoding="utf-8") as stream:
        rows = list(csv.reader(stream))
    if not rows or len(rows[0]) < 2:
        raise ArtifactError(f"{path!s}: expected a header with at least two columns")
    header = rows[0]
    columns: list[list[float]] = [[] for _ in header]
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ArtifactError(f"{path!s}:{number}: expected {len(header)} cells, got {len(row)}")
        try:
            for column, cell in zip(columns, row):
                column.append(float(cell))
        except ValueError:
            raise ArtifactError(f"{path!s}:{number}: non-numeric cell in {row!r}") from None
    return header, columns


class PlotStyle(typing.NamedTuple):
    """Static line plot appearance."""

    width: int = 640
    height: int = 400
    margin: int = 50
    colors: tuple[str, ...] = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    title: str = ""


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def _label(value: float) -> str:
    return f"{value:.4g}"


def emit_plot(
    csv_paths: Sequence[PathLike],
    svg_path: PathLike,
    style: PlotStyle | None = None,
    columns: Sequence[str] | None = None,
) -> pathlib.Path:
    """Draw every numeric column against the first one as polylines.

    :param csv_paths: CSV files sharing the same layout (first column is x)
    :type csv_paths: Sequence[str | pathlib.Path]
    :param svg_path: target file
    :type svg_path: str | pathlib.Path
    :param style: appearance
    :type style: PlotStyle | None
    :param columns: restrict to these y columns
    :type columns: Sequence[str] | None
    :return: written path
    :rtype: pathlib.Path
    :raises ArtifactError: malformed CSV or nothing to draw
    """
    style = PlotStyle() if style is None else style
    series: list[tuple[str, list[float], list[float]]] = []
    for path in csv_paths:
        header, data = read_series_csv(path)
        for name, values in zip(header[1:], data[1:]):
            if columns is None or name in columns:
                label = name if len(csv_paths) == 1 else f"{pathlib.Path(path).stem}:{name}"
                series.append((label, data[0], values))
    if not series or any(not xs for _, xs, _ in series):
        raise ArtifactError("nothing to plot: empty series")

    x_lo = min(min(xs) for _, xs, _ in series)
    x_hi = max(max(xs) for _, xs, _ in series)
    y_lo = min(0.0, min(min(ys) for _, _, ys in series))
    y_hi = max(max(ys) for _, _, ys in series)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    left, top = style.margin, style.margin
    right, bottom = style.width - style.margin, style.height - style.margin

    def to_px(x: float, y: float) -> str:
        px = left + (x - x_lo) / (x_hi - x_lo) * (right - left)
        py = bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)
        return f"{_fmt(px)},{_fmt(py)}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">',
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{left}" y="{bottom + 16}" font-size="11" text-anchor="middle">{_label(x_lo)}</text>',
        f'<text x="{right}" y="{bottom + 16}" font-size="11" text-anchor="middle">{_label(x_hi)}</text>',
        f'<text x="{left - 4}" y="{bottom}" font-size="11" text-anchor="end">{_label(y_lo)}</text>',
        f'<text x="{left - 4}" y="{top + 4}" font-size="11" text-anchor="end">{_label(y_hi)}</text>',
    ]
    if style.title:
        lines.append(
            f'<text x="{style.width // 2}" y="{top // 2}" font-size="14" text-anchor="middle">{style.title}</text>'
        )
    for k, (label, xs, ys) in enumerate(series):
        color = style.colors[k % len(style.colors)]
        points = " ".join(to_px(x, y) for x, y in zip(xs, ys))
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        lines.append(
            f'<text x="{right - 4}" y="{top + 14 * (k + 1)}" font-size="11" text-anchor="end" fill="{color}">'
            f"{label}</text>"
        )
    lines.append("</svg>")
    target = pathlib.Path(svg_path)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target
