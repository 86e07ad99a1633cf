"""
Static SVG figures written as plain markup.
"""

import logging
import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from fkwave.schemas.analysis import Diagram
from fkwave.schemas.fronts import FrontTrace

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 420
PAD_LEFT, PAD_RIGHT, PAD_TOP, PAD_BOTTOM = 64, 24, 36, 48
TICKS = 5


class _Frame:
    """Maps data coordinates onto the plotting area."""

    def __init__(self, x_range: tuple[float, float], y_range: tuple[float, float]):
        self.x0, self.x1 = _padded(*x_range)
        self.y0, self.y1 = _padded(*y_range)

    def x(self, v: float) -> float:
        return PAD_LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - PAD_LEFT - PAD_RIGHT)

    def y(self, v: float) -> float:
        return HEIGHT - PAD_BOTTOM - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - PAD_TOP - PAD_BOTTOM)


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return -1.0, 1.0
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _axes(frame: _Frame, x_label: str, y_label: str, title: str) -> list[str]:
    left, right = PAD_LEFT, WIDTH - PAD_RIGHT
    top, bottom = PAD_TOP, HEIGHT - PAD_BOTTOM
    parts = [
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        'fill="none" stroke="#333"/>',
        f'<text x="{WIDTH / 2}" y="{PAD_TOP - 12}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(x_label)}</text>',
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {HEIGHT / 2})">{escape(y_label)}</text>',
    ]
    for k in range(TICKS + 1):
        xv = frame.x0 + k * (frame.x1 - frame.x0) / TICKS
        yv = frame.y0 + k * (frame.y1 - frame.y0) / TICKS
        px, py = frame.x(xv), frame.y(yv)
        parts.append(f'<line x1="{px:.2f}" y1="{bottom}" x2="{px:.2f}" y2="{bottom + 4}" stroke="#333"/>')
        parts.append(
            f'<text x="{px:.2f}" y="{bottom + 16}" text-anchor="middle" font-size="10">{xv:.3g}</text>'
        )
        parts.append(f'<line x1="{left - 4}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="#333"/>')
        parts.append(
            f'<text x="{left - 6}" y="{py + 3:.2f}" text-anchor="end" font-size="10">{yv:.3g}</text>'
        )
    if frame.y0 < 0.0 < frame.y1:
        parts.append(
            f'<line x1="{left}" y1="{frame.y(0.0):.2f}" x2="{right}" y2="{frame.y(0.0):.2f}" '
            'stroke="#bbb" stroke-dasharray="4 3"/>'
        )
    return parts


def _polyline(frame: _Frame, xs: Sequence[float], ys: Sequence[float], colour: str) -> str:
    pts = " ".join(f"{frame.x(x):.2f},{frame.y(y):.2f}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"/>'


def _document(parts: list[str]) -> str:
    body = "\n  ".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n  {body}\n</svg>\n'
    )


def diagram_svg(
    diagram: Diagram,
    sigma_bounds: tuple[float, float],
    title: str = "velocity diagram",
) -> str:
    """
    c against sigma with the pinned plateau shaded, failed rows marked with
    crosses, and vertical branches drawn at sigma+/- from c+/- outward when
    the critical velocities are known.
    """
    rows = diagram.valid_points
    sigma_minus, sigma_plus = sigma_bounds
    cs = [p.c for p in rows] or [0.0]
    crit = diagram.critical
    if crit is not None:
        cs += [crit.c_minus.bracket[0], crit.c_plus.bracket[1]]
    span = max(cs) - min(cs) or 1.0
    frame = _Frame((sigma_minus, sigma_plus), (min(cs) - 0.2 * span, max(cs) + 0.2 * span))
    parts = _axes(frame, "sigma", "c", title)

    if diagram.plateau is not None:
        lo, hi = diagram.plateau
        parts.insert(
            0,
            f'<rect x="{frame.x(lo):.2f}" y="{PAD_TOP}" width="{frame.x(hi) - frame.x(lo):.2f}" '
            f'height="{HEIGHT - PAD_TOP - PAD_BOTTOM}" fill="#dde8f5"/>',
        )
    if rows:
        parts.append(_polyline(frame, [p.sigma for p in rows], [p.c for p in rows], "#1f5fa8"))
        for p in rows:
            parts.append(f'<circle cx="{frame.x(p.sigma):.2f}" cy="{frame.y(p.c):.2f}" r="2" fill="#1f5fa8"/>')
    for p in diagram.points:
        if p.failed:
            x, y = frame.x(p.sigma), frame.y(frame.y0)
            parts.append(f'<text x="{x:.2f}" y="{y - 4:.2f}" text-anchor="middle" fill="#c0392b">x</text>')

    if crit is not None:
        top, bottom = frame.y(frame.y1), frame.y(frame.y0)
        for est, edge, end in ((crit.c_plus, sigma_plus, top), (crit.c_minus, sigma_minus, bottom)):
            x = frame.x(edge)
            y = frame.y(est.estimate)
            parts.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{x:.2f}" y2="{end:.2f}" stroke="#c0392b" stroke-width="2"/>')
            b0, b1 = frame.y(est.bracket[0]), frame.y(est.bracket[1])
            parts.append(f'<line x1="{x - 5:.2f}" y1="{b0:.2f}" x2="{x + 5:.2f}" y2="{b0:.2f}" stroke="#c0392b"/>')
            parts.append(f'<line x1="{x - 5:.2f}" y1="{b1:.2f}" x2="{x + 5:.2f}" y2="{b1:.2f}" stroke="#c0392b"/>')
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="#c0392b"/>')
    return _document(parts)


def trace_svg(trace: FrontTrace, title: str = "front phase") -> str:
    t, xi = trace.t.tolist(), trace.xi.tolist()
    frame = _Frame((min(t), max(t)), (min(xi), max(xi)))
    parts = _axes(frame, "t", "xi", title)
    parts.append(_polyline(frame, t, xi, "#1f5fa8"))
    return _document(parts)


def write_svg(markup: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(markup)
    logger.info(f"Wrote {path}")
    return path
