"""Minimal SVG 1.1 charts: line plots and histograms, no renderer needed."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
    'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">\n'
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    return np.linspace(lo, hi, n)


class _Panel:
    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim = xlim
        lo, hi = ylim
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        self.ylim = (lo, hi)

    def px(self, x):
        lo, hi = self.xlim
        span = (hi - lo) or 1.0
        return self.x0 + (np.asarray(x, dtype=float) - lo) / span * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (np.asarray(y, dtype=float) - lo) / (hi - lo) * self.h

    def axes(self, title, xlabel, ylabel) -> list[str]:
        out = [
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{_fmt(self.w)}" '
            f'height="{_fmt(self.h)}" fill="none" stroke="#333"/>',
            f'<text x="{_fmt(self.x0 + self.w / 2)}" y="{_fmt(self.y0 - 8)}" '
            f'text-anchor="middle" font-size="13">{escape(title)}</text>',
            f'<text x="{_fmt(self.x0 + self.w / 2)}" y="{_fmt(self.y0 + self.h + 32)}" '
            f'text-anchor="middle">{escape(xlabel)}</text>',
            f'<text transform="translate({_fmt(self.x0 - 52)},{_fmt(self.y0 + self.h / 2)}) rotate(-90)" '
            f'text-anchor="middle">{escape(ylabel)}</text>',
        ]
        for v in _ticks(*self.ylim):
            y = float(self.py(v))
            out.append(f'<line x1="{_fmt(self.x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(self.x0)}" y2="{_fmt(y)}" stroke="#333"/>')
            out.append(f'<text x="{_fmt(self.x0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end">{v:.4g}</text>')
        for v in _ticks(*self.xlim):
            x = float(self.px(v))
            out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(self.y0 + self.h)}" x2="{_fmt(x)}" y2="{_fmt(self.y0 + self.h + 4)}" stroke="#333"/>')
            out.append(f'<text x="{_fmt(x)}" y="{_fmt(self.y0 + self.h + 16)}" text-anchor="middle">{v:.4g}</text>')
        return out

    def polyline(self, xs, ys, color, width=1.2) -> str:
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(self.px(xs), self.py(ys)))
        return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'

    def legend(self, labels) -> list[str]:
        out = []
        for i, label in enumerate(labels):
            y = self.y0 + 14 + 14 * i
            color = PALETTE[i % len(PALETTE)]
            out.append(f'<line x1="{_fmt(self.x0 + 8)}" y1="{_fmt(y - 4)}" x2="{_fmt(self.x0 + 26)}" y2="{_fmt(y - 4)}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{_fmt(self.x0 + 30)}" y="{_fmt(y)}">{escape(label)}</text>')
        return out


def _line_panel(panel_box, lines, title, xlabel, ylabel, markers=False) -> list[str]:
    xs_all = np.concatenate([np.asarray(x, dtype=float) for _, x, _ in lines])
    ys_all = np.concatenate([np.asarray(y, dtype=float) for _, _, y in lines])
    panel = _Panel(*panel_box, (float(xs_all.min()), float(xs_all.max())),
                   (float(ys_all.min()), float(ys_all.max())))
    out = panel.axes(title, xlabel, ylabel)
    for i, (_, x, y) in enumerate(lines):
        color = PALETTE[i % len(PALETTE)]
        out.append(panel.polyline(x, y, color))
        if markers:
            for a, b in zip(panel.px(x), panel.py(y)):
                out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="2.5" fill="{color}"/>')
    out += panel.legend([label for label, _, _ in lines])
    return out


def _hist_panel(panel_box, values, bins, title, xlabel) -> list[str]:
    values = np.asarray(values, dtype=float)
    counts, edges = np.histogram(values, bins=bins)
    panel = _Panel(*panel_box, (float(edges[0]), float(edges[-1])), (0.0, float(max(counts.max(), 1))))
    out = panel.axes(title, xlabel, "count")
    for c, a, b in zip(counts, edges[:-1], edges[1:]):
        x0, x1 = float(panel.px(a)), float(panel.px(b))
        y = float(panel.py(c))
        out.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(max(x1 - x0 - 1, 0.5))}" '
            f'height="{_fmt(panel.y0 + panel.h - y)}" fill="{PALETTE[0]}" fill-opacity="0.75"/>'
        )
    return out


def line_chart(lines, title="", xlabel="", ylabel="", width=720, height=400, markers=False) -> str:
    """``lines`` is a list of ``(label, xs, ys)``."""
    body = _line_panel((80, 40, width - 110, height - 100), lines, title, xlabel, ylabel, markers)
    return HEADER.format(w=width, h=height) + "\n".join(body) + "\n</svg>\n"


def prediction_figure(targets, predictions, title="", bins=30, width=900, height=760) -> str:
    """Target vs prediction curve above a histogram of prediction errors."""
    targets = np.asarray(targets, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    t = np.arange(targets.size)
    top = _line_panel(
        (80, 40, width - 110, height / 2 - 90),
        [("target", t, targets), ("prediction", t, predictions)],
        title, "sample", "price",
    )
    bottom = _hist_panel(
        (80, height / 2 + 40, width - 110, height / 2 - 100),
        targets - predictions, bins, "prediction error", "error",
    )
    return HEADER.format(w=width, h=height) + "\n".join(top + bottom) + "\n</svg>\n"
