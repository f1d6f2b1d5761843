"""
Height-sweep chart as a standalone SVG: mean 2D error (px, left axis) and
PA-MPJPE to the reference (mm, right axis) against the target height.
"""
from typing import List, Optional, Sequence

WIDTH = 640
HEIGHT = 400
MARGIN = 60
PX_COLOR = "#5aa9e6"
MM_COLOR = "#e07a5f"


def _scale(lo: float, hi: float, a: float, b: float):
    if hi <= lo:
        hi = lo + 1.0
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _series(xs, ys, sx, sy, color: str) -> List[str]:
    points = [(sx(x), sy(y)) for x, y in zip(xs, ys) if y is not None]
    out = []
    if len(points) > 1:
        d = " ".join(f"{'M' if i == 0 else 'L'}{_fmt(x)},{_fmt(y)}" for i, (x, y) in enumerate(points))
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    for x, y in points:
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="{color}"/>')
    return out


def _ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def sweep_chart(heights: Sequence[float], kp2d_px: Sequence[Optional[float]],
                pa_mpjpe_mm: Sequence[Optional[float]]) -> str:
    left, right = MARGIN, WIDTH - MARGIN
    top, bottom = MARGIN / 2, HEIGHT - MARGIN

    sx = _scale(min(heights), max(heights), left, right)
    px_vals = [v for v in kp2d_px if v is not None] or [0.0]
    mm_vals = [v for v in pa_mpjpe_mm if v is not None] or [0.0]
    px_hi = max(max(px_vals), 0.5)
    mm_hi = max(max(mm_vals), 1e-3)
    sy_px = _scale(0.0, px_hi, bottom, top)
    sy_mm = _scale(0.0, mm_hi, bottom, top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="{PX_COLOR}"/>',
        f'<line x1="{right}" y1="{top}" x2="{right}" y2="{bottom}" stroke="{MM_COLOR}"/>',
    ]
    for h in _ticks(min(heights), max(heights)):
        parts.append(f'<text x="{_fmt(sx(h))}" y="{bottom + 18}" font-size="11" text-anchor="middle">{h:.3f}</text>')
    for v in _ticks(0.0, px_hi):
        parts.append(f'<text x="{left - 6}" y="{_fmt(sy_px(v))}" font-size="11" text-anchor="end" '
                     f'fill="{PX_COLOR}">{v:.2f}</text>')
    for v in _ticks(0.0, mm_hi):
        parts.append(f'<text x="{right + 6}" y="{_fmt(sy_mm(v))}" font-size="11" '
                     f'fill="{MM_COLOR}">{v:.2f}</text>')
    parts.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 15}" font-size="12" '
                 f'text-anchor="middle">height (m)</text>')
    parts.append(f'<text x="15" y="{(top + bottom) / 2}" font-size="12" fill="{PX_COLOR}" '
                 f'transform="rotate(-90 15 {(top + bottom) / 2})" text-anchor="middle">mean 2D error (px)</text>')
    parts.append(f'<text x="{WIDTH - 12}" y="{(top + bottom) / 2}" font-size="12" fill="{MM_COLOR}" '
                 f'transform="rotate(90 {WIDTH - 12} {(top + bottom) / 2})" text-anchor="middle">PA-MPJPE (mm)</text>')

    parts += _series(heights, kp2d_px, sx, sy_px, PX_COLOR)
    parts += _series(heights, pa_mpjpe_mm, sx, sy_mm, MM_COLOR)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
