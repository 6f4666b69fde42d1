"""Static SVG boxplots: one file per uncertainty type, one panel per output.

Hand-written markup keeps the bytes a pure function of the input (no
timestamps, no backend-dependent ids). Boxes are ``<rect class="box">``,
medians ``<line class="median">``, whiskers ``<line class="whisker">`` and
outliers ``<circle class="outlier">``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path
from xml.sax.saxutils import escape

from ..errors import EmptyInput, IoError

__all__ = ["render_boxplots", "boxplot_svg"]

_PANEL_W, _PANEL_H = 240, 260
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56, 16, 40, 44
_BOX_FRAC = 0.6


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:.3g}"


def _nice_ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    n = int(round((stop - start) / step))
    return start, stop, [start + k * step for k in range(n + 1)]


def _panel(parts, x0, dim, group, kind):
    """Append one panel's markup; ``group`` is the list of summaries for this dim, sorted by j."""
    values = []
    for s in group:
        values += [s.min, s.max] + [v for v in s.outliers if math.isfinite(v)]
    lo, hi, ticks = _nice_ticks(min(values), max(values))
    top, bottom = _MARGIN_T, _PANEL_H - _MARGIN_B
    left, right = x0 + _MARGIN_L, x0 + _PANEL_W - _MARGIN_R

    def y(v):
        return bottom - (v - lo) / (hi - lo) * (bottom - top)

    parts.append(f'<g class="panel" data-dim="{dim}">')
    parts.append(
        f'<text x="{_fmt((left + right) / 2)}" y="{top - 14}" text-anchor="middle" '
        f'font-size="13">{escape(kind)}: y{dim}</text>'
    )
    parts.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000"/>')
    parts.append(f'<line class="axis" x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000"/>')
    for t in ticks:
        ty = _fmt(y(t))
        parts.append(f'<line x1="{left - 4}" y1="{ty}" x2="{left}" y2="{ty}" stroke="#000"/>')
        parts.append(f'<text x="{left - 6}" y="{ty}" text-anchor="end" dominant-baseline="middle" font-size="10">{_label(t)}</text>')

    slot = (right - left) / len(group)
    half = slot * _BOX_FRAC / 2
    for k, s in enumerate(group):
        cx = left + slot * (k + 0.5)
        a, b = _fmt(cx - half), _fmt(cx + half)
        yq1, yq3, ymed = y(s.q1), y(s.q3), y(s.median)
        parts.append(f'<line class="whisker" x1="{_fmt(cx)}" y1="{_fmt(y(s.max))}" x2="{_fmt(cx)}" y2="{_fmt(yq3)}" stroke="#000"/>')
        parts.append(f'<line class="whisker" x1="{_fmt(cx)}" y1="{_fmt(yq1)}" x2="{_fmt(cx)}" y2="{_fmt(y(s.min))}" stroke="#000"/>')
        for cap in (s.min, s.max):
            yc = _fmt(y(cap))
            parts.append(f'<line class="cap" x1="{_fmt(cx - half / 2)}" y1="{yc}" x2="{_fmt(cx + half / 2)}" y2="{yc}" stroke="#000"/>')
        parts.append(
            f'<rect class="box" x="{a}" y="{_fmt(yq3)}" width="{_fmt(2 * half)}" '
            f'height="{_fmt(max(yq1 - yq3, 0.0))}" fill="#9ecae1" stroke="#000"/>'
        )
        parts.append(f'<line class="median" x1="{a}" y1="{_fmt(ymed)}" x2="{b}" y2="{_fmt(ymed)}" stroke="#d62728" stroke-width="2"/>')
        for v in s.outliers:
            if math.isfinite(v):
                parts.append(f'<circle class="outlier" cx="{_fmt(cx)}" cy="{_fmt(y(v))}" r="3" fill="none" stroke="#000"/>')
        parts.append(f'<text x="{_fmt(cx)}" y="{bottom + 16}" text-anchor="middle" font-size="10">{s.j}</text>')
    parts.append(f'<text x="{_fmt((left + right) / 2)}" y="{bottom + 34}" text-anchor="middle" font-size="11">J</text>')
    parts.append("</g>")


def boxplot_svg(summaries, kind: str) -> str:
    """SVG document for the summaries of one uncertainty type."""
    by_dim = defaultdict(list)
    for s in summaries:
        if s.type == kind:
            by_dim[s.dim].append(s)
    if not by_dim:
        raise EmptyInput(f"no summaries of type {kind!r}")
    dims = sorted(by_dim)
    width, height = _PANEL_W * len(dims), _PANEL_H
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect class="background" x="0" y="0" width="{width}" height="{height}" fill="#fff"/>',
    ]
    for k, dim in enumerate(dims):
        _panel(parts, k * _PANEL_W, dim, sorted(by_dim[dim], key=lambda s: s.j), kind)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_boxplots(summaries, path) -> list[Path]:
    """Write ``boxplot_<type>.svg`` into directory ``path``; returns the files written.

    Nothing is created when ``summaries`` is empty.
    """
    summaries = list(summaries)
    if not summaries:
        raise EmptyInput("no summaries to plot")
    kinds = sorted({s.type for s in summaries})
    docs = {kind: boxplot_svg(summaries, kind) for kind in kinds}
    out_dir = Path(path)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for kind, doc in docs.items():
            target = out_dir / f"boxplot_{kind}.svg"
            target.write_text(doc)
            written.append(target)
    except OSError as exc:
        raise IoError(f"cannot write boxplots to {out_dir}: {exc}") from exc
    return written
