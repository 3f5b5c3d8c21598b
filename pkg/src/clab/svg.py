"""Deterministic SVG phase portraits.

The region ``[umin, umax] x [vmin, vmax]`` maps to a fixed 800 x 800 viewBox
with ``v`` pointing up.  Palette:

==================  ==========================================
branch-1 leaves     solid, ``#1f5fa8``
branch-2 leaves     dashed, ``#2e8b57``
discriminant        red ``#d62728``, wider stroke
parabolic curve     grey ``#7f7f7f`` (the torsal discriminant)
singular set of n   black ``#000000``
singular points     glyph per label plus a text label
==================  ==========================================
"""
import os

import numpy as np

SIZE = 800.0
MARGIN = 20.0
BRANCH_STYLE = {
    1: 'stroke="#1f5fa8" stroke-width="1"',
    2: 'stroke="#2e8b57" stroke-width="1" stroke-dasharray="4 3"',
}
LOCUS_STYLE = {
    "Discriminant": 'stroke="#d62728" stroke-width="2"',
    "Parabolic": 'stroke="#7f7f7f" stroke-width="2"',
    "SigmaN": 'stroke="#000000" stroke-width="2.5"',
}
GLYPHS = {
    "FoldedSaddle": "cross",
    "FoldedNode": "circle",
    "FoldedFocus": "disc",
    "Lemon": "diamond",
    "Star": "star",
    "Monstar": "triangle",
    "CuspFamily": "square",
    "SigmaFold": "square",
    "SigmaCusp": "square",
    "Degenerate": "circle",
}


class Viewport:
    def __init__(self, region):
        self.umin, self.umax, self.vmin, self.vmax = (float(t) for t in region)
        w = SIZE - 2 * MARGIN
        self.scale = w / max(self.umax - self.umin, self.vmax - self.vmin)

    def __call__(self, u, v):
        x = MARGIN + (np.asarray(u) - self.umin) * self.scale
        y = SIZE - MARGIN - (np.asarray(v) - self.vmin) * self.scale
        return x, y


def _polyline(xs, ys, style):
    pts = " ".join(f"{x:.4f},{y:.4f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" {style} points="{pts}"/>'


def _runs(branches):
    """Index ranges with a constant branch label; neighbouring runs share
    their boundary vertex so the curve stays connected."""
    out = []
    start = 0
    for i in range(1, len(branches)):
        if branches[i] != branches[i - 1]:
            out.append((start, i + 1, int(branches[start])))
            start = i
    out.append((start, len(branches), int(branches[start])))
    return out


def _locus_style(kind, lens):
    if kind == "SigmaN":
        return LOCUS_STYLE["SigmaN"]
    if kind.startswith("Discriminant") and lens == "Q3":
        return LOCUS_STYLE["Parabolic"]
    if kind.startswith("Parabolic"):
        return LOCUS_STYLE["Parabolic"]
    return LOCUS_STYLE["Discriminant"]


def _glyph(kind, x, y, r=5.0):
    if kind == "cross":
        return (f'<path d="M {x - r:.4f},{y - r:.4f} L {x + r:.4f},{y + r:.4f} '
                f'M {x - r:.4f},{y + r:.4f} L {x + r:.4f},{y - r:.4f}" stroke="#000000" stroke-width="2"/>')
    if kind == "circle":
        return f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{r:.4f}" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>'
    if kind == "disc":
        return f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{r:.4f}" fill="#000000"/>'
    if kind == "square":
        return (f'<rect x="{x - r:.4f}" y="{y - r:.4f}" width="{2 * r:.4f}" height="{2 * r:.4f}" '
                f'fill="#ffffff" stroke="#000000" stroke-width="1.5"/>')
    if kind == "diamond":
        pts = [(x, y - r), (x + r, y), (x, y + r), (x - r, y)]
    elif kind == "triangle":
        pts = [(x, y - r), (x + r, y + r), (x - r, y + r)]
    else:  # star
        ang = np.pi / 2 + np.arange(10) * np.pi / 5
        rad = np.where(np.arange(10) % 2 == 0, r * 1.4, r * 0.6)
        pts = list(zip(x + rad * np.cos(ang), y - rad * np.sin(ang)))
    s = " ".join(f"{a:.4f},{b:.4f}" for a, b in pts)
    return f'<polygon points="{s}" fill="#ffd700" stroke="#000000" stroke-width="1"/>'


def render_svg(portrait, region, reports=(), title=None):
    """SVG text for a portrait; identical inputs give identical bytes."""
    vp = Viewport(region)
    lens = portrait.lens
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE:.0f} {SIZE:.0f}" '
        f'width="{SIZE:.0f}" height="{SIZE:.0f}">',
        f'<rect x="0" y="0" width="{SIZE:.0f}" height="{SIZE:.0f}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    x0, y1 = vp(vp.umin, vp.vmin)
    x1, y0 = vp(vp.umax, vp.vmax)
    out.append(f'<rect x="{x0:.4f}" y="{y0:.4f}" width="{x1 - x0:.4f}" height="{y1 - y0:.4f}" '
               'fill="none" stroke="#cccccc" stroke-width="1"/>')
    out.append('<g id="leaves">')
    for c in portrait.curves:
        xs, ys = vp(c.points[:, 0], c.points[:, 1])
        branches = c.branches if c.branches is not None else np.full(len(c.points), c.branch)
        for a, b, br in _runs(branches):
            if b - a >= 2:
                out.append(_polyline(xs[a:b], ys[a:b], BRANCH_STYLE[br]))
    out.append("</g>")
    out.append('<g id="loci">')
    for loc in portrait.loci:
        if len(loc.points) < 2:
            continue
        xs, ys = vp(loc.points[:, 0], loc.points[:, 1])
        kind = loc.kind.split(":")[0]
        out.append(f'<!-- {_escape(loc.kind)} -->')
        out.append(_polyline(xs, ys, _locus_style(kind, lens)))
    out.append("</g>")
    out.append('<g id="singular-points">')
    stacked = {}
    for r in reports:
        x, y = vp(r.at[0], r.at[1])
        # several reports at one point: stack their labels
        key = (round(float(x), 1), round(float(y), 1))
        k = stacked[key] = stacked.get(key, -1) + 1
        if k == 0:
            out.append(_glyph(GLYPHS.get(r.label, "circle"), float(x), float(y)))
        out.append(f'<text x="{x + 7:.4f}" y="{y - 7 - 14 * k:.4f}" font-family="sans-serif" font-size="12">'
                   f"{_escape(r.label)} ({_escape(r.lens)})</text>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_svg(portrait, region, path, reports=(), title=None):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(render_svg(portrait, region, reports, title))
    return path
