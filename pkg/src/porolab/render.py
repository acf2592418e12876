"""Diagrams of the set under x -> ln(1/x).

Blocks become filled segments and gaps become bubbles whose length is the
log of the gap ratio b/a.  Coordinates are floats used for drawing only,
printed with 12 significant digits so output is byte-stable.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .exact import fmt

RENDER_DEPTH = 10
WIDTH = 1000
MARGIN = 40


def _u(x) -> float:
    return -x.log()


def _num(v: float) -> str:
    return f"{v:.12g}"


def layout(E, depth: int = RENDER_DEPTH):
    """Blocks as (u_left, u_right) and gaps as (u_left, u_right, ratio text)."""
    blocks, gaps = [], []
    for n in range(1, depth + 1):
        b = E.block(n)
        blocks.append((_u(b.hi), _u(b.lo)))
        if n < depth:
            a, bb = E.gap(n)
            gaps.append((_u(bb), _u(a), fmt(bb / a)))
    return blocks, gaps


def svg(E, depth: int = RENDER_DEPTH) -> str:
    blocks, gaps = layout(E, depth)
    u0 = min(0.0, blocks[0][0])
    u1 = blocks[-1][1]
    span = (u1 - u0) or 1.0
    scale = (WIDTH - 2 * MARGIN) / span

    def X(u):
        return _num(MARGIN + (u - u0) * scale)

    y = 80
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="160" '
           f'viewBox="0 0 {WIDTH} 160">',
           f'<title>{escape(E.name)}: ln(1/x) picture to depth {depth}</title>',
           f'<line x1="{MARGIN}" y1="{y}" x2="{WIDTH - MARGIN}" y2="{y}" stroke="#999" '
           'stroke-width="1"/>']
    for i, (ul, ur, ratio) in enumerate(gaps, 1):
        cx = (ul + ur) / 2
        r = (ur - ul) * scale / 2
        out.append(f'<ellipse class="bubble" cx="{X(cx)}" cy="{y}" rx="{_num(r)}" '
                   f'ry="{_num(min(r, 30.0))}" fill="none" stroke="#3a6ea5"/>')
        out.append(f'<text x="{X(cx)}" y="{y - 36 - 12 * (i % 2)}" font-size="9" '
                   f'text-anchor="middle">b/a = {escape(ratio)}</text>')
    for ul, ur in blocks:
        w = max((ur - ul) * scale, 1.0)
        out.append(f'<rect class="block" x="{X(ul)}" y="{y - 6}" width="{_num(w)}" '
                   'height="12" fill="#333"/>')
    ticks = max(1, int(span // 10) or 1)
    t = 0
    while t <= u1:
        out.append(f'<text x="{X(t)}" y="{y + 30}" font-size="8" text-anchor="middle">'
                   f'{t}</text>')
        t += ticks
    out.append(f'<text x="{MARGIN}" y="150" font-size="10">ln(1/x), natural-log units</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def ascii_ruler(E, depth: int = RENDER_DEPTH, width: int = 96) -> str:
    blocks, gaps = layout(E, depth)
    u1 = blocks[-1][1]
    span = u1 or 1.0
    cells = ["."] * width

    def col(u):
        return min(width - 1, max(0, int(u / span * (width - 1))))

    for ul, ur in blocks:
        for c in range(col(ul), col(ur) + 1):
            cells[c] = "#"
    lines = [f"{E.name}: ln(1/x) from 0 to {_num(u1)}", "".join(cells)]
    for i, (ul, ur, ratio) in enumerate(gaps, 1):
        lines.append(f"gap {i:3d}  ({_num(ul)}, {_num(ur)})  length {_num(ur - ul)}  "
                     f"b/a = {ratio}")
    return "\n".join(lines) + "\n"
