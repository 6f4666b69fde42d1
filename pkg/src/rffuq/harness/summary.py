"""Boxplot statistics over trials: linear-interpolation quartiles, Tukey fences."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import EmptyInput, InvalidConfig
from .experiment import results_rows

__all__ = ["BoxplotSummary", "SUMMARY_HEADER", "box_stats", "summarize", "format_summary", "write_summary", "read_summary"]

SUMMARY_HEADER = ("j", "dim", "type", "min", "q1", "median", "q3", "max", "n_outliers")


@dataclass(frozen=True)
class BoxplotSummary:
    j: int
    dim: int  # 1-based
    type: str
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: tuple[float, ...]

    @property
    def n_outliers(self) -> int:
        return len(self.outliers)


def box_stats(values):
    """``(min, q1, median, q3, max, outliers)`` of a 1-d sample.

    Quartiles interpolate linearly at index ``q*(n-1)`` of the sorted values.
    Points beyond ``1.5*IQR`` outside the quartiles are outliers; the
    whiskers span the remaining points, clamped so that ``min <= q1`` and
    ``q3 <= max`` (a lone point just inside a quartile can otherwise fall
    past the fence when n is tiny).
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise EmptyInput("no values to summarize")
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo) & (v <= hi)]
    outliers = tuple(float(x) for x in v[(v < lo) | (v > hi)])
    wmin = min(float(inside.min()), q1) if inside.size else q1
    wmax = max(float(inside.max()), q3) if inside.size else q3
    return float(wmin), float(q1), float(med), float(q3), float(wmax), outliers


def summarize(results) -> list[BoxplotSummary]:
    """Group by ``(j, dim, type)`` across trials.

    ``results`` is a sequence of :class:`TrialResult` or of long-format rows
    ``(trial, j, dim, type, value)`` as read from a results file.
    """
    results = list(results)
    if not results:
        raise EmptyInput("no results to summarize")
    rows = results if isinstance(results[0], tuple) else results_rows(results)
    groups = defaultdict(list)
    for _, j, dim, kind, value in rows:
        groups[(int(j), int(dim), kind)].append(value)
    return [BoxplotSummary(j, dim, kind, *box_stats(vals)) for (j, dim, kind), vals in sorted(groups.items())]


def format_summary(summaries, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for s in summaries:
            stats = [f"{x:.9g}" for x in (s.min, s.q1, s.median, s.q3, s.max)]
            writer.writerow([s.j, s.dim, s.type, *stats, s.n_outliers])
        return buf.getvalue()
    if fmt == "json":
        records = [
            {
                "j": s.j,
                "dim": s.dim,
                "type": s.type,
                "min": s.min,
                "q1": s.q1,
                "median": s.median,
                "q3": s.q3,
                "max": s.max,
                "n_outliers": s.n_outliers,
                "outliers": list(s.outliers),
            }
            for s in summaries
        ]
        return json.dumps(records, indent=1) + "\n"
    raise InvalidConfig(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def write_summary(summaries, path, fmt: str = "csv") -> Path:
    path = Path(path)
    path.write_text(format_summary(summaries, fmt))
    return path


def read_summary(path) -> list[BoxplotSummary]:
    """Load a summary file. CSV keeps only outlier counts, so outlier values come back as NaN."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return [
            BoxplotSummary(
                int(r["j"]), int(r["dim"]), str(r["type"]),
                float(r["min"]), float(r["q1"]), float(r["median"]), float(r["q3"]), float(r["max"]),
                tuple(float(x) for x in r.get("outliers", [])),
            )
            for r in json.loads(text)
        ]  # fmt: skip
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader, ()))
    if header != SUMMARY_HEADER:
        raise InvalidConfig(f"{path}: expected header {','.join(SUMMARY_HEADER)}, got {','.join(header)}")
    out = []
    for rec in reader:
        if not rec:
            continue
        j, dim, kind, *stats, n_out = rec
        out.append(BoxplotSummary(int(j), int(dim), kind, *map(float, stats), (float("nan"),) * int(n_out)))
    return out
