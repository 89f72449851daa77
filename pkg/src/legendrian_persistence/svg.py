"""SVG bar plots: one row per bar, action on the x-axis, arrows for infinite ends."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .barcode import Barcode
from .scalars import approx, format_scalar, is_finite

_WIDTH = 640
_LEFT = 90
_RIGHT = 30
_ROW = 18
_TOP = 28


def _range(bcs) -> tuple[float, float]:
    vals = []
    for bc in bcs:
        for b in bc.bars:
            vals += [approx(x) for x in (b.start, b.end) if is_finite(x)]
        vals += [approx(x) for x in bc.window if is_finite(x)]
    if not vals:
        return (0.0, 1.0)
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-9:
        lo, hi = lo - 1, hi + 1
    return lo, hi


def _rows(bc: Barcode, y0: float, lo: float, hi: float) -> list[str]:
    span = _WIDTH - _LEFT - _RIGHT
    x_of = lambda v: _LEFT + (approx(v) - lo) / (hi - lo) * span
    out = []
    for i, b in enumerate(bc.bars):
        y = y0 + i * _ROW + _ROW / 2
        x1 = x_of(b.start) if is_finite(b.start) else _LEFT - 12
        x2 = x_of(b.end) if is_finite(b.end) else _WIDTH - _RIGHT + 12
        label = f"[{format_scalar(b.start)}, {format_scalar(b.end)})"
        out.append(f'<text x="4" y="{y + 4:.2f}" font-size="11">deg {b.degree}</text>')
        out.append(f'<line x1="{x1:.2f}" y1="{y:.2f}" x2="{x2:.2f}" y2="{y:.2f}" '
                   f'stroke="black" stroke-width="3"><title>{escape(label)}</title></line>')
        if not is_finite(b.end):
            out.append(f'<polygon points="{x2:.2f},{y:.2f} {x2 - 8:.2f},{y - 5:.2f} '
                       f'{x2 - 8:.2f},{y + 5:.2f}" fill="black"/>')
        if not is_finite(b.start):
            out.append(f'<polygon points="{x1:.2f},{y:.2f} {x1 + 8:.2f},{y - 5:.2f} '
                       f'{x1 + 8:.2f},{y + 5:.2f}" fill="black"/>')
    return out


def _axis(y: float, lo: float, hi: float) -> list[str]:
    return [f'<line x1="{_LEFT}" y1="{y:.2f}" x2="{_WIDTH - _RIGHT}" y2="{y:.2f}" stroke="gray"/>',
            f'<text x="{_LEFT}" y="{y + 14:.2f}" font-size="10">{lo:.4g}</text>',
            f'<text x="{_WIDTH - _RIGHT}" y="{y + 14:.2f}" font-size="10" '
            f'text-anchor="end">{hi:.4g}</text>']


def _document(body: list[str], height: float) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height:.0f}" '
            f'viewBox="0 0 {_WIDTH} {height:.0f}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def barcode_svg(bc: Barcode, title: str = "barcode") -> str:
    """Deterministic SVG of a barcode."""
    lo, hi = _range([bc])
    body = [f'<text x="4" y="16" font-size="13">{escape(title)}</text>']
    body += _rows(bc, _TOP, lo, hi)
    y = _TOP + max(len(bc.bars), 1) * _ROW + 6
    body += _axis(y, lo, hi)
    return _document(body, y + 24)


def frames_svg(frames) -> str:
    """Stacked barcodes of evolution frames on a common action axis."""
    lo, hi = _range([f.barcode for f in frames])
    body, y = [], 0.0
    for f in frames:
        body.append(f'<text x="4" y="{y + 16:.2f}" font-size="13">t = {escape(format_scalar(f.t))}</text>')
        body += _rows(f.barcode, y + _TOP, lo, hi)
        y += _TOP + max(len(f.barcode.bars), 1) * _ROW + 6
    body += _axis(y, lo, hi)
    return _document(body, y + 24)
