"""Render qbc experiment CSVs into charts.

Four CSV schemas are understood, keyed by their exact header:

- ``errors,count``                      attack histogram -> bar chart
- ``run,errors``                        raw attack records -> bar chart
                                        (error counts aggregated)
- ``strategy,n_bits,correct_rate``      match-rate curves -> one line per
                                        strategy
- ``length,avg_err_rate,p_x,x``         length sweep -> one line per
                                        threshold plus the error-rate line

Rendering never modifies its inputs, and with fixed inputs and style the
output image is byte-stable.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KIND_HISTOGRAM = "hist"
KIND_LINE = "line"

_SCHEMA_KINDS = {
    ("errors", "count"): KIND_HISTOGRAM,
    ("run", "errors"): KIND_HISTOGRAM,
    ("strategy", "n_bits", "correct_rate"): KIND_LINE,
    ("length", "avg_err_rate", "p_x", "x"): KIND_LINE,
}

_DEFAULT_LABELS = {
    ("errors", "count"): ("Errors", "Count"),
    ("run", "errors"): ("Errors", "Count"),
    ("strategy", "n_bits", "correct_rate"): ("Transmitted bits", "Correct rate"),
    ("length", "avg_err_rate", "p_x", "x"): ("Message length", "Rate"),
}


class SchemaMismatchError(ValueError):
    """The CSV header does not fit the requested chart kind."""


@dataclass(frozen=True)
class PlotSpec:
    """What to read, which chart to draw, and where to write it."""

    input_csv: str | Path
    kind: str
    output_path: str | Path
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None
    dpi: int = 120


@dataclass
class RenderResult:
    """Parsed chart content, returned for inspection alongside the image."""

    kind: str
    header: tuple[str, ...]
    bars: list[tuple[int, int]] = field(default_factory=list)
    series: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    output_path: Path = Path()


def _read_rows(path: Path) -> tuple[tuple[str, ...], list[list[str]]]:
    if not path.exists():
        raise FileNotFoundError(f"no such CSV: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaMismatchError(f"{path} is empty, expected a header row") from None
        rows = [row for row in reader if row]
    width = len(header)
    for i, row in enumerate(rows, start=2):
        if len(row) != width:
            raise SchemaMismatchError(f"{path} line {i}: expected {width} fields, got {len(row)}")
    return header, rows


def _bars_from_rows(header: tuple[str, ...], rows: list[list[str]]) -> list[tuple[int, int]]:
    if header == ("errors", "count"):
        return [(int(errors), int(count)) for errors, count in rows]
    counter = Counter(int(errors) for _, errors in rows)
    return sorted(counter.items())


def _series_from_rows(
    header: tuple[str, ...], rows: list[list[str]]
) -> dict[str, list[tuple[float, float]]]:
    series: dict[str, list[tuple[float, float]]] = {}
    if header == ("strategy", "n_bits", "correct_rate"):
        for strategy, n_bits, rate in rows:
            series.setdefault(strategy, []).append((float(n_bits), float(rate)))
    else:
        for length, avg_rate, p_x, x in rows:
            series.setdefault(f"P(x={x})", []).append((float(length), float(p_x)))
            series.setdefault("avg_err_rate", []).append((float(length), float(avg_rate)))
        # the error-rate line repeats once per threshold; deduplicate
        series["avg_err_rate"] = sorted(set(series["avg_err_rate"]))
    for points in series.values():
        points.sort()
    return series


def render(spec: PlotSpec) -> RenderResult:
    """Draw the chart described by ``spec`` and write the image file.

    Raises :class:`SchemaMismatchError` when the CSV header is unknown or
    belongs to the other chart kind.  An empty body renders empty axes.
    """
    header, rows = _read_rows(Path(spec.input_csv))
    expected_kind = _SCHEMA_KINDS.get(header)
    if expected_kind is None:
        raise SchemaMismatchError(f"unrecognized CSV header {','.join(header)!r}")
    if spec.kind != expected_kind:
        raise SchemaMismatchError(
            f"header {','.join(header)!r} renders as {expected_kind!r}, not {spec.kind!r}"
        )
    xlabel, ylabel = _DEFAULT_LABELS[header]
    result = RenderResult(kind=spec.kind, header=header, output_path=Path(spec.output_path))

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        if spec.kind == KIND_HISTOGRAM:
            result.bars = _bars_from_rows(header, rows)
            if result.bars:
                ax.bar(
                    [x for x, _ in result.bars],
                    [count for _, count in result.bars],
                    width=1.0,
                    edgecolor="black",
                    linewidth=0.4,
                )
        else:
            result.series = _series_from_rows(header, rows)
            for label, points in sorted(result.series.items()):
                ax.plot(
                    [x for x, _ in points],
                    [y for _, y in points],
                    marker=".",
                    label=label,
                )
            if result.series:
                ax.legend(loc="best", fontsize=8)
        ax.set_xlabel(spec.xlabel or xlabel)
        ax.set_ylabel(spec.ylabel or ylabel)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(result.output_path, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return result
