"""Quadrant of opportunities: consumption vs footprint intensity, split at the medians.

Points above and right of both medians combine large spend with high
intensity. Dashed iso-share curves ``intensity = share * total / consumption``
mark where a category reaches a given share of the total footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import InputError

UPPER_LEFT = "upper-left"
UPPER_RIGHT = "upper-right"
LOWER_LEFT = "lower-left"
LOWER_RIGHT = "lower-right"

DEFAULT_SHARES = (0.01, 0.05, 0.10)


@dataclass(frozen=True)
class QuadrantDatum:
    category: str
    consumption: float
    intensity: float
    share: float
    quadrant: str

    @property
    def footprint(self) -> float:
        return self.consumption * self.intensity


@dataclass(frozen=True)
class QuadrantData:
    kind: str                     # "bde" or "co2e"
    points: tuple[QuadrantDatum, ...]
    median_consumption: float
    median_intensity: float
    total_footprint: float

    def iso_share(self, share: float, consumption) -> np.ndarray:
        """Intensity at which a category of the given consumption holds ``share`` of the total."""
        return share * self.total_footprint / np.asarray(consumption, dtype=float)


def _label(c, m, mc, mm) -> str:
    right = c > mc
    upper = m > mm
    if upper:
        return UPPER_RIGHT if right else UPPER_LEFT
    return LOWER_RIGHT if right else LOWER_LEFT


def quadrant_data(categories: Sequence, kind: str = "bde",
                  total_footprint: float | None = None) -> QuadrantData:
    """Build quadrant points from (name, consumption, intensity) triples or CategoryFootprint objects.

    Categories without positive consumption or intensity cannot be placed on the
    log axes and are left out; ``total_footprint`` defaults to the sum over the
    placed points.
    """
    triples = []
    for c in categories:
        if isinstance(c, tuple):
            triples.append((str(c[0]), float(c[1]), float(c[2])))
        else:
            inten = c.bde_intensity if kind == "bde" else c.co2e_intensity
            if inten is not None:
                triples.append((c.category, c.consumption_eur, inten))
    triples = [t for t in triples if t[1] > 0]
    if not triples:
        raise InputError("quadrant needs at least one category with positive consumption")
    cons = np.array([t[1] for t in triples])
    inten = np.array([t[2] for t in triples])
    mc = float(np.median(cons))
    mm = float(np.median(inten))
    total = float((cons * inten).sum()) if total_footprint is None else float(total_footprint)
    points = tuple(
        QuadrantDatum(name, c, m, (c * m / total) if total else 0.0, _label(c, m, mc, mm))
        for name, c, m in triples
    )
    return QuadrantData(kind, points, mc, mm, total)


# --------------------------------------------------------------------------- SVG

_UNITS = {"bde": "pBDe/EUR", "co2e": "kgCO2e/EUR"}
_SCALE = {"bde": 1e12, "co2e": 1.0}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _decades(lo: float, hi: float) -> tuple[float, float]:
    return math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + (1 if lo == hi else 0)


def _panel(data: QuadrantData, x0: float, y0: float, w: float, h: float,
           shares: Sequence[float], title: str) -> list[str]:
    pts = [p for p in data.points if p.intensity > 0]
    scale = _SCALE.get(data.kind, 1.0)
    out = [f'<g class="panel" data-kind="{escape(data.kind)}">']
    out.append(f'<text x="{_fmt(x0)}" y="{_fmt(y0 - 8)}" font-size="13" font-weight="bold">{escape(title)}</text>')
    out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" '
               f'fill="none" stroke="#333"/>')
    if not pts:
        out.append("</g>")
        return out
    xs = [p.consumption for p in pts]
    ys = [p.intensity * scale for p in pts]
    xl, xh = _decades(min(xs), max(xs))
    yl, yh = _decades(min(ys), max(ys))

    def px(c):
        return x0 + (math.log10(c) - xl) / (xh - xl) * w

    def py(m):
        return y0 + h - (math.log10(m) - yl) / (yh - yl) * h

    for d in range(xl, xh + 1):
        out.append(f'<text x="{_fmt(px(10.0 ** d))}" y="{_fmt(y0 + h + 14)}" font-size="9" '
                   f'text-anchor="middle">1e{d}</text>')
    for d in range(yl, yh + 1):
        out.append(f'<text x="{_fmt(x0 - 4)}" y="{_fmt(py(10.0 ** d) + 3)}" font-size="9" '
                   f'text-anchor="end">1e{d}</text>')
    out.append(f'<text x="{_fmt(x0 + w / 2)}" y="{_fmt(y0 + h + 30)}" font-size="11" '
               f'text-anchor="middle">Consumption (EUR)</text>')
    out.append(f'<text x="{_fmt(x0 - 40)}" y="{_fmt(y0 + h / 2)}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 {_fmt(x0 - 40)} {_fmt(y0 + h / 2)})">'
               f'Intensity ({_UNITS.get(data.kind, "")})</text>')
    out.append(f'<clipPath id="clip-{escape(data.kind)}"><rect x="{_fmt(x0)}" y="{_fmt(y0)}" '
               f'width="{_fmt(w)}" height="{_fmt(h)}"/></clipPath>')
    # iso-share curves are straight lines on log-log axes
    for s in shares:
        c_lo, c_hi = 10.0 ** xl, 10.0 ** xh
        m_lo, m_hi = data.iso_share(s, [c_lo, c_hi]) * scale
        out.append(f'<line class="iso-share" data-share="{s:g}" x1="{_fmt(px(c_lo))}" y1="{_fmt(py(m_lo))}" '
                   f'x2="{_fmt(px(c_hi))}" y2="{_fmt(py(m_hi))}" stroke="#888" stroke-dasharray="4 3" '
                   f'clip-path="url(#clip-{escape(data.kind)})"/>')
        out.append(f'<text class="iso-label" x="{_fmt(px(c_hi) - 2)}" y="{_fmt(py(m_hi) - 2)}" font-size="8" '
                   f'fill="#666" text-anchor="end" clip-path="url(#clip-{escape(data.kind)})">{s * 100:g}%</text>')
    mx = px(data.median_consumption)
    my = py(data.median_intensity * scale) if data.median_intensity > 0 else y0 + h
    out.append(f'<line class="median" data-axis="consumption" x1="{_fmt(mx)}" y1="{_fmt(y0)}" '
               f'x2="{_fmt(mx)}" y2="{_fmt(y0 + h)}" stroke="#c33"/>')
    out.append(f'<line class="median" data-axis="intensity" x1="{_fmt(x0)}" y1="{_fmt(my)}" '
               f'x2="{_fmt(x0 + w)}" y2="{_fmt(my)}" stroke="#c33"/>')
    for p in pts:
        cx, cy = px(p.consumption), py(p.intensity * scale)
        out.append(f'<circle class="point" data-quadrant="{p.quadrant}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                   f'r="4" fill="#2b6cb0"/>')
        out.append(f'<text class="point-label" x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}" font-size="9">'
                   f'{escape(p.category)}</text>')
    out.append("</g>")
    return out


def render_quadrant(data: QuadrantData | Sequence[QuadrantData], shares: Sequence[float] = DEFAULT_SHARES,
                    titles: Sequence[str] | None = None, panel_width: float = 420,
                    panel_height: float = 320) -> str:
    """Static SVG, one panel per QuadrantData, identical bytes for identical input."""
    panels = [data] if isinstance(data, QuadrantData) else list(data)
    if titles is None:
        titles = [f"{chr(65 + i)}: {'Biodiversity' if d.kind == 'bde' else 'Carbon'} footprint"
                  for i, d in enumerate(panels)]
    margin_l, margin_t, gap = 70, 30, 90
    width = margin_l + len(panels) * (panel_width + gap)
    height = margin_t + panel_height + 50
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.0f} {height:.0f}" font-family="sans-serif">']
    for i, (d, t) in enumerate(zip(panels, titles)):
        x0 = margin_l + i * (panel_width + gap)
        out.extend(_panel(d, x0, margin_t, panel_width, panel_height, shares, t))
    out.append("</svg>")
    return "\n".join(out) + "\n"
