"""Dependency-free SVG rendering of result tables.

Output is a pure function of the table, so identical tables give identical
bytes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError

WIDTH, HEIGHT = 800, 600
_MARGIN = dict(left=80, right=30, top=40, bottom=60)
_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _column(table, name):
    try:
        k = list(table.header).index(name)
    except ValueError:
        raise InputError(f"no column named {name!r}") from None
    try:
        col = np.array([float(row[k]) for row in table.rows])
    except (TypeError, ValueError):
        raise InputError(f"column {name!r} is not numeric") from None
    return col


def _nice_ticks(lo, hi, n=6):
    if not np.isfinite(lo) or not np.isfinite(hi):
        raise InputError("cannot plot non-finite values")
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        if t >= lo - 1e-9 * step:
            ticks.append(round(t, 12))
        t += step
    return lo, hi, ticks


def _fmt(v):
    return f"{v:.6g}"


def _escape(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _frame(x_lo, x_hi, xt, y_lo, y_hi, yt, xlabel, ylabel, title):
    m = _MARGIN
    pw = WIDTH - m["left"] - m["right"]
    ph = HEIGHT - m["top"] - m["bottom"]

    def sx(x):
        return m["left"] + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return m["top"] + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{m["left"]}" y="{m["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in xt:
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{m["top"] + ph}" x2="{X:.2f}" y2="{m["top"] + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X:.2f}" y="{m["top"] + ph + 20}" font-size="12" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in yt:
        Y = sy(t)
        out.append(f'<line x1="{m["left"] - 5}" y1="{Y:.2f}" x2="{m["left"]}" y2="{Y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{m["left"] - 8}" y="{Y + 4:.2f}" font-size="12" text-anchor="end">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{m["left"] + pw / 2:.1f}" y="{HEIGHT - 15}" font-size="14" '
        f'text-anchor="middle">{_escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{m["top"] + ph / 2:.1f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 20 {m["top"] + ph / 2:.1f})">{_escape(ylabel)}</text>'
    )
    if title:
        out.append(
            f'<text x="{WIDTH / 2:.1f}" y="24" font-size="16" text-anchor="middle">{_escape(title)}</text>'
        )
    return out, sx, sy


def line_svg(table, x=None, y=None, title=None) -> str:
    header = list(table.header)
    x = header[0] if x is None else x
    ys = [h for h in header if h != x] if y is None else list(y)
    if not table.rows:
        raise InputError("empty table")
    xs = _column(table, x)
    series = [(_column(table, name), name) for name in ys]
    allv = np.concatenate([s for s, _ in series])
    x_lo, x_hi, xt = _nice_ticks(xs.min(), xs.max())
    y_lo, y_hi, yt = _nice_ticks(allv.min(), allv.max())
    out, sx, sy = _frame(x_lo, x_hi, xt, y_lo, y_hi, yt, x, ", ".join(ys) if len(ys) <= 3 else "value", title)
    for k, (vals, name) in enumerate(series):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, vals))
        color = _PALETTE[k % len(_PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if len(series) <= 10:
            ly = _MARGIN["top"] + 16 + 16 * k
            lx = WIDTH - _MARGIN["right"] - 120
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{lx + 25}" y="{ly}" font-size="12">{_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap_svg(table, value=None, title=None) -> str:
    header = list(table.header)
    if "i" not in header or "j" not in header:
        raise InputError("heatmap needs 'i' and 'j' columns")
    value = [h for h in header if h not in ("i", "j")][0] if value is None else value
    ii = _column(table, "i").astype(int)
    jj = _column(table, "j").astype(int)
    vals = _column(table, value)
    if not np.all(np.isfinite(vals)):
        raise InputError("cannot plot non-finite values")
    ni, nj = ii.max() - ii.min() + 1, jj.max() - jj.min() + 1
    x_lo, x_hi = ii.min() - 0.5, ii.max() + 0.5
    # rows grow downward so row 1 is drawn at the top
    out, sx, _ = _frame(x_lo, x_hi, [], 0, 1, [], "i", "j", title)
    m = _MARGIN
    ph = HEIGHT - m["top"] - m["bottom"]
    cw = (WIDTH - m["left"] - m["right"]) / ni
    ch = ph / nj
    vmax = vals.max() if vals.max() > 0 else 1.0
    for a, b, v in zip(ii, jj, vals):
        level = max(0.0, min(1.0, v / vmax))
        shade = int(round(255 * (1 - level)))
        X = m["left"] + (a - ii.min()) * cw
        Y = m["top"] + (b - jj.min()) * ch
        out.append(
            f'<rect x="{X:.2f}" y="{Y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
            f'fill="rgb(255,{shade},{shade})"/>'
        )
    for t in sorted({int(ii.min()), int(ii.max())}):
        X = m["left"] + (t - ii.min() + 0.5) * cw
        out.append(f'<text x="{X:.2f}" y="{m["top"] + ph + 20}" font-size="12" text-anchor="middle">{t}</text>')
    for t in sorted({int(jj.min()), int(jj.max())}):
        Y = m["top"] + (t - jj.min() + 0.5) * ch
        out.append(f'<text x="{m["left"] - 8}" y="{Y + 4:.2f}" font-size="12" text-anchor="end">{t}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(table, kind: str = "line", **kwargs) -> str:
    if not table.rows:
        raise InputError("empty table")
    if kind == "line":
        return line_svg(table, **kwargs)
    if kind == "heatmap":
        return heatmap_svg(table, **kwargs)
    raise InputError(f"unknown plot kind {kind!r}")
