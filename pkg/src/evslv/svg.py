"""Minimal deterministic SVG line plots: axes, polylines, labels. No plotting dependency."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _range(arrays) -> tuple[float, float]:
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays]) if arrays else np.array([])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-300:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None
    markers: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)

    def add(self, x, y, label="", color=None, markers=False):
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, color, markers))
        return self

    def render(self, x0: float, y0: float, w: float, h: float) -> list[str]:
        ml, mr, mt, mb = 62.0, 12.0, 26.0, 40.0
        px, py, pw, ph = x0 + ml, y0 + mt, w - ml - mr, h - mt - mb
        xlo, xhi = _range([s.x for s in self.series])
        ylo, yhi = _range([s.y for s in self.series])

        def sx(v):
            return px + (v - xlo) / (xhi - xlo) * pw

        def sy(v):
            return py + ph - (v - ylo) / (yhi - ylo) * ph

        out = [
            f'<rect x="{_f(px)}" y="{_f(py)}" width="{_f(pw)}" height="{_f(ph)}" fill="none" stroke="#333"/>',
            f'<text x="{_f(x0 + w / 2)}" y="{_f(y0 + 16)}" text-anchor="middle" font-size="13">{escape(self.title)}</text>',
            f'<text x="{_f(px + pw / 2)}" y="{_f(y0 + h - 6)}" text-anchor="middle" font-size="11">{escape(self.xlabel)}</text>',
            f'<text x="{_f(x0 + 12)}" y="{_f(py + ph / 2)}" text-anchor="middle" font-size="11" '
            f'transform="rotate(-90 {_f(x0 + 12)} {_f(py + ph / 2)})">{escape(self.ylabel)}</text>',
        ]
        for t in _ticks(xlo, xhi):
            out.append(f'<line x1="{_f(sx(t))}" y1="{_f(py + ph)}" x2="{_f(sx(t))}" y2="{_f(py + ph + 4)}" stroke="#333"/>')
            out.append(f'<text x="{_f(sx(t))}" y="{_f(py + ph + 15)}" text-anchor="middle" font-size="9">{t:.3g}</text>')
        for t in _ticks(ylo, yhi):
            out.append(f'<line x1="{_f(px - 4)}" y1="{_f(sy(t))}" x2="{_f(px)}" y2="{_f(sy(t))}" stroke="#333"/>')
            out.append(f'<text x="{_f(px - 6)}" y="{_f(sy(t) + 3)}" text-anchor="end" font-size="9">{t:.3g}</text>')
        for k, s in enumerate(self.series):
            color = s.color or PALETTE[k % len(PALETTE)]
            for seg in _segments(s.x, s.y):
                pts = " ".join(f"{_f(sx(a))},{_f(sy(b))}" for a, b in seg)
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
                if s.markers:
                    out.extend(f'<circle cx="{_f(sx(a))}" cy="{_f(sy(b))}" r="2.5" fill="{color}"/>' for a, b in seg)
            if s.label:
                ly = py + 12 + 13 * k
                out.append(f'<line x1="{_f(px + pw - 70)}" y1="{_f(ly - 4)}" x2="{_f(px + pw - 55)}" y2="{_f(ly - 4)}" stroke="{color}" stroke-width="2"/>')
                out.append(f'<text x="{_f(px + pw - 50)}" y="{_f(ly)}" font-size="10">{escape(s.label)}</text>')
        return out


def _segments(x, y):
    """Split a polyline at non-finite points."""
    seg = []
    for a, b in zip(x, y):
        if math.isfinite(a) and math.isfinite(b):
            seg.append((a, b))
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg


def figure(panels, cols: int = 2, panel_w: float = 380, panel_h: float = 280, title: str = "") -> str:
    rows = math.ceil(len(panels) / cols)
    top = 28.0 if title else 0.0
    W, H = cols * panel_w, rows * panel_h + top
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(W)}" height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}" font-family="sans-serif">',
        f'<rect width="{_f(W)}" height="{_f(H)}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_f(W / 2)}" y="20" text-anchor="middle" font-size="15">{escape(title)}</text>')
    for k, p in enumerate(panels):
        r, c = divmod(k, cols)
        out.extend(p.render(c * panel_w, top + r * panel_h, panel_w, panel_h))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _iso(states):
    # fixed oblique projection of (E, V, S) onto the page
    E, V, S = states[:, 0], states[:, 1], states[:, 2]
    return E - 0.5 * V * math.cos(math.pi / 6), S - 0.5 * V * math.sin(math.pi / 6)


def phase_svg(traj, title: str = "") -> str:
    """EV, ES and VS projections plus an oblique 3D view of one trajectory."""
    s = traj.states
    names = traj.labels
    panels = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        panels.append(Panel(f"{names[i]}{names[j]} projection", names[i], names[j]).add(s[:, i], s[:, j]))
    px, py = _iso(s)
    panels.append(Panel("EVS (oblique 3D)", "E - V/2 cos30", "S - V/2 sin30").add(px, py, color="#444"))
    return figure(panels, cols=2, title=title)


def timeseries_svg(traj, title: str = "") -> str:
    panels = [
        Panel(f"{name}(t)", "t", name).add(traj.times, traj.states[:, k], color=PALETTE[k % len(PALETTE)])
        for k, name in enumerate(traj.labels)
    ]
    return figure(panels, cols=min(3, len(panels)), panel_w=320, title=title)


def sweep_svg(result, title: str = "") -> str:
    """Small multiples: window mean with min/max envelope for E, V, S, then final states."""
    x = result.params
    # diverged rows reach ~1e300 before failing; drop their runaway entries from the axes
    blown = np.array([row.blowup_time is not None for row in result.rows])

    def col(d, stat):
        c = result.column(d, stat)
        if not blown.any() or blown.all():
            return np.where(blown, np.nan, c)
        cap = 10.0 * np.nanmax(np.abs(c[~blown]))
        return np.where(blown & ~(np.abs(c) <= cap), np.nan, c)

    panels = []
    for k, d in enumerate(("E", "V", "S")):
        p = Panel(f"{d} vs {result.target}", result.target, d)
        p.add(x, col(d, "max"), "max", "#bbbbbb")
        p.add(x, col(d, "min"), "min", "#888888")
        p.add(x, col(d, "mean"), "mean", PALETTE[k], markers=True)
        panels.append(p)
    p = Panel(f"final state vs {result.target}", result.target, "x(T)")
    for k, d in enumerate(("E", "V", "S")):
        p.add(x, col(d, "final"), d, PALETTE[k], markers=True)
    panels.append(p)
    return figure(panels, cols=2, title=title)
