"""Deterministic JSON, CSV and SVG output for theorem reports."""

from __future__ import annotations

import json
import math

import numpy as np

CSV_COLUMNS = ("n", "diff_grand_norm", "argmax_eps")
PLOT_FLOOR = 1e-16


def _clean(obj):
    # JSON has no infinity; encode it as a string
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def to_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _g17(x: float) -> str:
    return "inf" if math.isinf(x) else format(x, ".17g")


def convergence_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(f"{int(r.n)},{_g17(r.diff_grand_norm)},{_g17(r.argmax_eps)}")
    return "\n".join(lines) + "\n"


def render_convergence_svg(rows, width: int = 640, height: int = 420) -> str:
    """Log-log plot of the difference norm against ``n`` with a ``C/n`` guide.

    ``rows`` holds ``(n, value)`` pairs or objects with ``n`` and
    ``diff_grand_norm``. Zero values are drawn at 1e-16.
    """
    pts = []
    for r in rows:
        n, v = (r.n, r.diff_grand_norm) if hasattr(r, "n") else (r[0], r[1])
        pts.append((float(n), float(v)))
    if len(pts) < 2:
        raise ValueError("a convergence plot needs at least two rows")
    if any(n <= 0 for n, _ in pts):
        raise ValueError("n must be positive on a log axis")
    if any(not math.isfinite(v) for _, v in pts):
        raise ValueError("cannot plot infinite norms")
    xs = [math.log10(n) for n, _ in pts]
    ys = [math.log10(max(v, PLOT_FLOOR)) for _, v in pts]

    n0, v0 = pts[0]
    c = max(v0, PLOT_FLOOR) * n0
    guide = [(x, math.log10(max(c / 10**x, PLOT_FLOOR))) for x in (xs[0], xs[-1])]

    x_lo, x_hi = math.floor(min(xs)), math.ceil(max(xs))
    all_y = ys + [g[1] for g in guide]
    y_lo, y_hi = math.floor(min(all_y)), math.ceil(max(all_y))
    if x_hi == x_lo:
        x_hi += 1
    if y_hi == y_lo:
        y_hi += 1

    left, right, top, bottom = 80, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    ystep = max(1, (y_hi - y_lo) // 8)
    for k in range(x_lo, x_hi + 1):
        out.append(f'<line x1="{sx(k):.2f}" y1="{top + ph}" x2="{sx(k):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(k):.2f}" y="{top + ph + 18}" font-size="11" text-anchor="middle">1e{k}</text>')
    for k in range(y_lo, y_hi + 1, ystep):
        out.append(f'<line x1="{left - 5}" y1="{sy(k):.2f}" x2="{left}" y2="{sy(k):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{sy(k) + 4:.2f}" font-size="11" text-anchor="end">1e{k}</text>')
    gl = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in guide)
    out.append(f'<polyline points="{gl}" fill="none" stroke="gray" stroke-dasharray="6,4"/>')
    pl = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pl}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="steelblue"/>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" font-size="13" text-anchor="middle">n</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.2f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2:.2f})">grand norm of f_av - A_n f</text>'
    )
    out.append(f'<text x="{left + pw - 4}" y="{top + 16}" font-size="11" text-anchor="end" fill="gray">dashed: C/n</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
