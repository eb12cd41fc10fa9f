"""
Static SVG figures for the analysis report (no GUI toolkit involved).
"""

import math
from xml.sax.saxutils import escape

from .helper import to_mbits

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 50


class SVG:
    def __init__(self, width=WIDTH, height=HEIGHT):
        self.width = width
        self.height = height
        self.commands = []

    def line(self, x1, y1, x2, y2, color="#000000", width=1.0, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.commands.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"{extra}/>'
        )

    def polyline(self, points, color="#000000", width=1.5):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.commands.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def circle(self, x, y, radius=3.0, color="#000000"):
        self.commands.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{color}"/>')

    def rect(self, x, y, width, height, fill):
        self.commands.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{max(width, 0.0):.2f}" height="{max(height, 0.0):.2f}" fill="{fill}"/>'
        )

    def text(self, x, y, string, size=11, anchor="middle", color="#333333", rotate=None):
        transform = f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate is not None else ""
        self.commands.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}" fill="{color}"{transform}>{escape(str(string))}</text>'
        )

    def get_svg(self):
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.commands) + "\n</svg>\n"


class Frame:
    """Maps data coordinates onto the plotting area of an SVG."""

    def __init__(self, svg, x_range, y_range):
        self.svg = svg
        self.x0, self.x1 = _padded(*x_range)
        self.y0, self.y1 = _padded(*y_range)
        self.left = MARGIN_LEFT
        self.right = svg.width - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = svg.height - MARGIN_BOTTOM

    def x(self, value):
        return self.left + (value - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def y(self, value):
        return self.bottom - (value - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def axes(self, title, x_label, y_label, ticks=5):
        svg = self.svg
        svg.text(svg.width / 2, 22, title, size=14)
        svg.line(self.left, self.bottom, self.right, self.bottom)
        svg.line(self.left, self.top, self.left, self.bottom)
        for step in range(ticks + 1):
            value = self.y0 + (self.y1 - self.y0) * step / ticks
            svg.line(self.left - 4, self.y(value), self.left, self.y(value))
            svg.text(self.left - 8, self.y(value) + 4, f"{value:.3g}", size=10, anchor="end")
            xv = self.x0 + (self.x1 - self.x0) * step / ticks
            svg.line(self.x(xv), self.bottom, self.x(xv), self.bottom + 4)
            svg.text(self.x(xv), self.bottom + 18, f"{xv:.4g}", size=10)
        svg.text((self.left + self.right) / 2, svg.height - 10, x_label, size=12)
        svg.text(16, (self.top + self.bottom) / 2, y_label, size=12, rotate=-90)
        if self.y0 < 0 < self.y1:
            svg.line(self.left, self.y(0), self.right, self.y(0), color="#999999", dash="4 3")


def _padded(low, high):
    low, high = float(low), float(high)
    if high == low:
        pad = abs(low) * 0.1 or 1.0
        return low - pad, high + pad
    pad = (high - low) * 0.05
    return low - pad, high + pad


def line_chart(x, series, title, x_label, y_label):
    """One polyline per named series sharing the x values."""
    svg = SVG()
    values = [value for ys in series.values() for value in ys]
    frame = Frame(svg, (min(x), max(x)), (min(values), max(values)))
    frame.axes(title, x_label, y_label)
    for index, (name, ys) in enumerate(series.items()):
        color = PALETTE[index % len(PALETTE)]
        points = [(frame.x(a), frame.y(b)) for a, b in zip(x, ys)]
        svg.polyline(points, color=color)
        for px, py in points:
            svg.circle(px, py, radius=2.5, color=color)
        svg.text(frame.right - 4, frame.top + 14 * (index + 1), name, size=10, anchor="end", color=color)
    return svg.get_svg()


def bar_chart(labels, values, title, x_label, y_label):
    svg = SVG()
    frame = Frame(svg, (0, len(values) + 1), (min(0.0, min(values)), max(0.0, max(values))))
    frame.axes(title, x_label, y_label)
    width = (frame.right - frame.left) / (len(values) + 1) * 0.6
    for position, (label, value) in enumerate(zip(labels, values), start=1):
        top = frame.y(max(value, 0.0))
        bottom = frame.y(min(value, 0.0))
        svg.rect(frame.x(position) - width / 2, top, width, bottom - top, fill=PALETTE[0])
        svg.text(frame.x(position), frame.bottom - 4, label, size=9)
    return svg.get_svg()


def scatter_with_fit(x, y, slope, intercept, title, x_label, y_label):
    svg = SVG()
    frame = Frame(svg, (min(x), max(x)), (min(y), max(y)))
    frame.axes(title, x_label, y_label)
    for a, b in zip(x, y):
        svg.circle(frame.x(a), frame.y(b), color=PALETTE[0])
    low, high = min(x), max(x)
    svg.line(
        frame.x(low), frame.y(intercept + slope * low),
        frame.x(high), frame.y(intercept + slope * high),
        color=PALETTE[1], width=1.5,
    )
    svg.text(frame.right - 4, frame.top + 14, f"slope H = {slope:.4f}", size=11, anchor="end", color=PALETTE[1])
    return svg.get_svg()


def render_figures(report):
    """SVG documents keyed by file name for the sections present in ``report``."""

    years = [row.year for row in report.national]
    figures = {
        "synergy_by_year.svg": line_chart(
            years,
            {"national": [to_mbits(row.synergy_bits) for row in report.national]},
            "Synergy by year", "year", "T (mbits)",
        ),
        "tau_by_year.svg": line_chart(
            years,
            {"national": [row.tau * 100.0 for row in report.national]},
            "Transmission power by year", "year", "tau x 100",
        ),
    }
    if report.spectra and report.spectra.aggregate.components:
        components = report.spectra.aggregate.components
        figures["spectrum.svg"] = bar_chart(
            [f"{item.l}w" for item in components],
            [to_mbits(item.c_bits) for item in components],
            "Fourier coefficient moduli", "frequency", "C (mbits)",
        )
    if report.hurst:
        figures["rs_loglog.svg"] = scatter_with_fit(
            [math.log(point.t) for point in report.hurst.points],
            [math.log(point.rs) for point in report.hurst.points],
            report.hurst.h, report.hurst.intercept,
            "R/S analysis", "ln t", "ln (R/S)",
        )
    return figures
