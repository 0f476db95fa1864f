"""Minimal deterministic SVG plotting (lines, bars, error bars, insets).

Rendering is self-contained on purpose: experiment figures must be
byte-reproducible, so no external plotting stack and no timestamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

FONT = "font-family='Helvetica,Arial,sans-serif'"


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def nice_ticks(lo: float, hi: float, n: int = 5) -> list:
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


@dataclass
class Axes:
    x0: float
    y0: float
    width: float
    height: float
    xlim: tuple
    ylim: tuple
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    log_y: bool = False
    elements: list = field(default_factory=list)
    legend_entries: list = field(default_factory=list)

    def _tx(self, x: float) -> float:
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * self.width

    def _ty(self, y: float) -> float:
        lo, hi = self.ylim
        if self.log_y:
            y = math.log10(max(y, 1e-300))
            lo, hi = math.log10(lo), math.log10(hi)
        return self.y0 + self.height - (y - lo) / (hi - lo) * self.height

    def plot(self, xs, ys, color: str, label: str = "", width: float = 1.5, dash: str = ""):
        pts = " ".join(f"{_fmt(self._tx(x))},{_fmt(self._ty(y))}" for x, y in zip(xs, ys))
        dash_attr = f" stroke-dasharray='{dash}'" if dash else ""
        self.elements.append(
            f"<polyline points='{pts}' fill='none' stroke='{color}' "
            f"stroke-width='{width}'{dash_attr}/>"
        )
        if label:
            self.legend_entries.append((label, color))

    def scatter(self, xs, ys, color: str, label: str = "", radius: float = 2.5):
        for x, y in zip(xs, ys):
            self.elements.append(
                f"<circle cx='{_fmt(self._tx(x))}' cy='{_fmt(self._ty(y))}' "
                f"r='{radius}' fill='{color}'/>"
            )
        if label:
            self.legend_entries.append((label, color))

    def bar(self, x: float, height: float, width: float, color: str, yerr: float = 0.0):
        x_left = self._tx(x - width / 2.0)
        x_right = self._tx(x + width / 2.0)
        y_top = self._ty(height)
        y_base = self._ty(self.ylim[0])
        self.elements.append(
            f"<rect x='{_fmt(x_left)}' y='{_fmt(min(y_top, y_base))}' "
            f"width='{_fmt(x_right - x_left)}' height='{_fmt(abs(y_base - y_top))}' "
            f"fill='{color}'/>"
        )
        if yerr > 0.0:
            cx = self._tx(x)
            y_lo = self._ty(max(height - yerr, self.ylim[0]))
            y_hi = self._ty(height + yerr)
            cap = (x_right - x_left) * 0.25
            for y in (y_lo, y_hi):
                self.elements.append(
                    f"<line x1='{_fmt(cx - cap)}' y1='{_fmt(y)}' x2='{_fmt(cx + cap)}' "
                    f"y2='{_fmt(y)}' stroke='black' stroke-width='1'/>"
                )
            self.elements.append(
                f"<line x1='{_fmt(cx)}' y1='{_fmt(y_lo)}' x2='{_fmt(cx)}' "
                f"y2='{_fmt(y_hi)}' stroke='black' stroke-width='1'/>"
            )

    def errorbar(self, xs, ys, yerrs, color: str, label: str = ""):
        self.plot(xs, ys, color, label)
        for x, y, e in zip(xs, ys, yerrs):
            cx = self._tx(x)
            self.elements.append(
                f"<line x1='{_fmt(cx)}' y1='{_fmt(self._ty(y - e))}' x2='{_fmt(cx)}' "
                f"y2='{_fmt(self._ty(y + e))}' stroke='{color}' stroke-width='1'/>"
            )

    def _frame(self, xticks, yticks, xtick_labels=None) -> list:
        parts = [
            f"<rect x='{_fmt(self.x0)}' y='{_fmt(self.y0)}' width='{_fmt(self.width)}' "
            f"height='{_fmt(self.height)}' fill='none' stroke='black' stroke-width='1'/>"
        ]
        if xtick_labels is None:
            xtick_labels = [_fmt(t) for t in xticks]
        y_base = self.y0 + self.height
        for t, lab in zip(xticks, xtick_labels):
            cx = self._tx(t)
            parts.append(
                f"<line x1='{_fmt(cx)}' y1='{_fmt(y_base)}' x2='{_fmt(cx)}' "
                f"y2='{_fmt(y_base + 4)}' stroke='black' stroke-width='1'/>"
            )
            parts.append(
                f"<text x='{_fmt(cx)}' y='{_fmt(y_base + 16)}' {FONT} font-size='10' "
                f"text-anchor='middle'>{lab}</text>"
            )
        for t in yticks:
            cy = self._ty(t)
            parts.append(
                f"<line x1='{_fmt(self.x0 - 4)}' y1='{_fmt(cy)}' x2='{_fmt(self.x0)}' "
                f"y2='{_fmt(cy)}' stroke='black' stroke-width='1'/>"
            )
            label = f"{t:.3g}"
            parts.append(
                f"<text x='{_fmt(self.x0 - 6)}' y='{_fmt(cy + 3)}' {FONT} font-size='10' "
                f"text-anchor='end'>{label}</text>"
            )
        if self.xlabel:
            parts.append(
                f"<text x='{_fmt(self.x0 + self.width / 2)}' y='{_fmt(y_base + 32)}' "
                f"{FONT} font-size='11' text-anchor='middle'>{self.xlabel}</text>"
            )
        if self.ylabel:
            cx, cy = self.x0 - 38, self.y0 + self.height / 2
            parts.append(
                f"<text x='{_fmt(cx)}' y='{_fmt(cy)}' {FONT} font-size='11' "
                f"text-anchor='middle' transform='rotate(-90 {_fmt(cx)} {_fmt(cy)})'>"
                f"{self.ylabel}</text>"
            )
        if self.title:
            parts.append(
                f"<text x='{_fmt(self.x0 + self.width / 2)}' y='{_fmt(self.y0 - 8)}' "
                f"{FONT} font-size='12' text-anchor='middle'>{self.title}</text>"
            )
        return parts

    def render(self, xticks=None, yticks=None, xtick_labels=None, legend: bool = True) -> str:
        if xticks is None:
            xticks = nice_ticks(*self.xlim)
        if yticks is None:
            if self.log_y:
                lo = math.floor(math.log10(self.ylim[0]))
                hi = math.ceil(math.log10(self.ylim[1]))
                yticks = [10.0**e for e in range(int(lo), int(hi) + 1)]
            else:
                yticks = nice_ticks(*self.ylim)
        parts = self._frame(xticks, yticks, xtick_labels) + self.elements
        if legend and self.legend_entries:
            lx = self.x0 + self.width - 104
            ly = self.y0 + 10
            for i, (label, color) in enumerate(self.legend_entries):
                y = ly + 14 * i
                parts.append(
                    f"<line x1='{_fmt(lx)}' y1='{_fmt(y)}' x2='{_fmt(lx + 16)}' "
                    f"y2='{_fmt(y)}' stroke='{color}' stroke-width='2'/>"
                )
                parts.append(
                    f"<text x='{_fmt(lx + 20)}' y='{_fmt(y + 3)}' {FONT} font-size='10' "
                    f"text-anchor='start'>{label}</text>"
                )
        return "".join(parts)


def document(width: float, height: float, body: str) -> str:
    return (
        "<?xml version='1.0' encoding='UTF-8'?>"
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{_fmt(width)}' "
        f"height='{_fmt(height)}' viewBox='0 0 {_fmt(width)} {_fmt(height)}'>"
        f"<rect width='100%' height='100%' fill='white'/>{body}</svg>"
    )
