"""Tiny deterministic SVG writer for the CLI figures.

Hand-rolled on purpose: output contains no timestamps or library version
strings, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

__all__ = ["SvgPlot"]

_COLORS = ("#d62728", "#000000", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


class SvgPlot:
    def __init__(self, width=640, height=640, margin=50):
        self.width = width
        self.height = height
        self.margin = margin
        self.items = []  # (kind, xs, ys, style)
        self._bounds = [float("inf"), float("inf"), -float("inf"), -float("inf")]

    def _grow(self, xs, ys):
        b = self._bounds
        b[0] = min(b[0], min(xs))
        b[1] = min(b[1], min(ys))
        b[2] = max(b[2], max(xs))
        b[3] = max(b[3], max(ys))

    def polyline(self, xs, ys, color=None, width=1.5, dash=None):
        xs = [float(v) for v in xs]
        ys = [float(v) for v in ys]
        color = color or _COLORS[len(self.items) % len(_COLORS)]
        self.items.append(("line", xs, ys, (color, width, dash)))
        self._grow(xs, ys)

    def points(self, xs, ys, color="#000000", radius=2.5):
        xs = [float(v) for v in xs]
        ys = [float(v) for v in ys]
        self.items.append(("dots", xs, ys, (color, radius, None)))
        self._grow(xs, ys)

    def _map(self, xs, ys):
        x0, y0, x1, y1 = self._bounds
        spanx = (x1 - x0) or 1.0
        spany = (y1 - y0) or 1.0
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        px = [self.margin + (x - x0) / spanx * w for x in xs]
        py = [self.height - self.margin - (y - y0) / spany * h for y in ys]
        return px, py

    def write(self, path):
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
        ]
        for kind, xs, ys, style in self.items:
            px, py = self._map(xs, ys)
            if kind == "line":
                color, width, dash = style
                pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
                dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
                parts.append(
                    f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    f'stroke-width="{width}"{dash_attr}/>'
                )
            else:
                color, radius, _ = style
                for x, y in zip(px, py):
                    parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{color}"/>')
        parts.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(parts) + "\n")
