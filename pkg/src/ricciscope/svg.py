"""Minimal SVG 1.1 renderer for scan rows: region fill for grid scans,
scatter for point clouds, with a color key."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#4c72b0",
    "#dd8452",
    "#55a868",
    "#c44e52",
    "#8172b3",
    "#937860",
    "#da8bc3",
    "#8c8c8c",
    "#ccb974",
    "#64b5cd",
)
FIXED = {
    "GlobalMaxGuaranteed": "#4d4d4d",
    "Inconclusive": "#e8e8e8",
    "LocalMax": "#55a868",
    "DegenerateCandidate": "#c44e52",
    "error": "#ffffff",
}

WIDTH, HEIGHT, PAD = 640, 560, 60


def default_key(row):
    if row.error:
        return "error"
    return row.classification or row.verdict or row.space


def _colors(keys):
    out = {}
    free = iter(PALETTE)
    for k in keys:
        if k not in out:
            out[k] = FIXED.get(k) or next(free, "#000000")
    return out


def render(rows, key=default_key, title="", xlabel="u", ylabel="v", cell=None, bounds=None):
    """SVG text for ``rows``.

    ``cell`` = (du, dv) draws each row as a filled rectangle of that size
    (region maps); without it rows are drawn as dots.
    """
    rows = list(rows)
    keys = [key(r) for r in rows]
    colors = _colors(sorted(set(keys), key=keys.index))
    if bounds is None:
        if rows:
            us = np.array([r.u for r in rows])
            vs = np.array([r.v for r in rows])
            pu = cell[0] / 2 if cell else 0.0
            pv = cell[1] / 2 if cell else 0.0
            bounds = (us.min() - pu, us.max() + pu, vs.min() - pv, vs.max() + pv)
        else:
            bounds = (0.0, 1.0, 0.0, 1.0)
    u0, u1, v0, v1 = bounds
    su = (WIDTH - 2 * PAD) / ((u1 - u0) or 1.0)
    sv = (HEIGHT - 2 * PAD) / ((v1 - v0) or 1.0)
    X = lambda u: PAD + (u - u0) * su
    Y = lambda v: HEIGHT - PAD - (v - v0) * sv

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT + 20 * len(colors)}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT + 20 * len(colors)}" fill="white"/>',
    ]
    for r, k in zip(rows, keys):
        c = colors[k]
        if cell:
            w, h = cell[0] * su, cell[1] * sv
            out.append(f'<rect x="{X(r.u) - w / 2:.2f}" y="{Y(r.v) - h / 2:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{c}"/>')
        else:
            out.append(f'<circle cx="{X(r.u):.2f}" cy="{Y(r.v):.2f}" r="1" fill="{c}"/>')
    out.append(
        f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}" fill="none" stroke="black"/>'
    )
    for t in np.linspace(0, 1, 5):
        u = u0 + t * (u1 - u0)
        v = v0 + t * (v1 - v0)
        out.append(f'<text x="{X(u):.2f}" y="{HEIGHT - PAD + 16}" font-size="11" text-anchor="middle">{u:.3g}</text>')
        out.append(f'<text x="{PAD - 6}" y="{Y(v) + 4:.2f}" font-size="11" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - PAD + 36}" font-size="13" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{HEIGHT / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {HEIGHT / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="{PAD / 2}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    for i, (k, c) in enumerate(colors.items()):
        y = HEIGHT + 20 * i
        out.append(f'<rect x="{PAD}" y="{y - 10}" width="12" height="12" fill="{c}" stroke="black"/>')
        out.append(f'<text x="{PAD + 18}" y="{y}" font-size="12">{escape(k)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
