"""CSV and SVG writers with byte-deterministic output."""

from __future__ import annotations

import csv
import io
import math
import os
from pathlib import Path

__all__ = ["emit_csv", "csv_text", "emit_svg_lineplot", "svg_lineplot_text", "OutputError"]

WIDTH, HEIGHT = 800, 500
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 50}
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


class OutputError(OSError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float) or hasattr(value, "dtype"):
        value = float(value)
        return repr(value) if math.isfinite(value) else ("nan" if math.isnan(value) else ("inf" if value > 0 else "-inf"))
    return str(value)


def csv_text(columns) -> str:
    """CSV text for a mapping {header: column}; all columns must have the same length."""
    headers = list(columns)
    cols = [list(columns[h]) for h in headers]
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths {sorted(lengths)}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in zip(*cols):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {os.fspath(path)}: {exc}") from exc
    return path


def emit_csv(columns, path) -> Path:
    return _write(path, csv_text(columns))


def _nice_ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def svg_lineplot_text(series, title: str = "", xlabel: str = "x", ylabel: str = "y") -> str:
    """SVG text of line series.

    Each series is a mapping with keys ``x``, ``y`` and optional ``label``,
    ``color`` and ``dashed``.
    """
    series = [s for s in series]
    xs = [float(v) for s in series for v in s["x"] if math.isfinite(float(v))]
    ys = [float(v) for s in series for v in s["y"] if math.isfinite(float(v))]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return top + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g stroke="black" stroke-width="1"><line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}"/></g>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        out.append(
            f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 5}" stroke="black"/>'
            f'<text x="{px(t):.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">{t:g}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        out.append(
            f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>'
            f'<text x="{left - 8}" y="{py(t) + 4:.2f}" font-size="11" text-anchor="end">{t:g}</text>'
        )
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" font-size="13" text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{_esc(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="24" font-size="15" text-anchor="middle">{_esc(title)}</text>')

    for i, s in enumerate(series):
        color = s.get("color", PALETTE[i % len(PALETTE)])
        dash = ' stroke-dasharray="2,3"' if s.get("dashed") else ""
        pts = " ".join(
            f"{px(float(a)):.2f},{py(float(b)):.2f}"
            for a, b in zip(s["x"], s["y"])
            if math.isfinite(float(a)) and math.isfinite(float(b))
        )
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        if s.get("label"):
            ly = top + 16 + 16 * i
            out.append(
                f'<line x1="{left + pw - 140}" y1="{ly - 4}" x2="{left + pw - 115}" y2="{ly - 4}" stroke="{color}"{dash}/>'
                f'<text x="{left + pw - 110}" y="{ly}" font-size="11">{_esc(s["label"])}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg_lineplot(series, path, title: str = "", xlabel: str = "x", ylabel: str = "y") -> Path:
    return _write(path, svg_lineplot_text(series, title, xlabel, ylabel))
