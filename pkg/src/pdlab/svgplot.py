"""Tiny deterministic SVG line charts (no plotting dependency).

Plots are a convenience layer over the CSV outputs; identical inputs
produce byte-identical files.
"""

import math

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x):
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _transform(lo, hi, pixel_lo, pixel_hi):
    span = hi - lo if hi > lo else 1.0

    def to_px(v):
        return pixel_lo + (v - lo) / span * (pixel_hi - pixel_lo)

    return to_px


def line_chart(path, series, title="", xlabel="", ylabel="",
               xlog=False, ylog=False):
    """Write a polyline chart. ``series`` is a list of (label, xs, ys)."""
    def tx(v):
        return math.log10(v) if xlog else v

    def ty(v):
        return math.log10(v) if ylog else v

    cleaned = []
    for label, xs, ys in series:
        pts = [(tx(x), ty(y)) for x, y in zip(xs, ys)
               if (not xlog or x > 0) and (not ylog or y > 0)
               and math.isfinite(x) and math.isfinite(y)]
        if pts:
            cleaned.append((label, pts))
    if not cleaned:
        cleaned = [("empty", [(0.0, 0.0)])]
    xs_all = [p[0] for _, pts in cleaned for p in pts]
    ys_all = [p[1] for _, pts in cleaned for p in pts]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    px = _transform(x_lo, x_hi, MARGIN_L, WIDTH - MARGIN_R)
    py = _transform(y_lo, y_hi, HEIGHT - MARGIN_B, MARGIN_T)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]
    # axes box and ticks
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" '
        f'width="{WIDTH - MARGIN_L - MARGIN_R}" '
        f'height="{HEIGHT - MARGIN_T - MARGIN_B}" '
        f'fill="none" stroke="black"/>'
    )
    for v in _ticks(x_lo, x_hi):
        x = px(v)
        label = f"1e{_fmt(v)}" if xlog else _fmt(v)
        parts.append(f'<line x1="{_fmt(x)}" y1="{HEIGHT - MARGIN_B}" '
                     f'x2="{_fmt(x)}" y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN_B + 18}" '
                     f'text-anchor="middle" font-family="monospace" '
                     f'font-size="10">{label}</text>')
    for v in _ticks(y_lo, y_hi):
        y = py(v)
        label = f"1e{_fmt(v)}" if ylog else _fmt(v)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(y)}" '
                     f'x2="{MARGIN_L}" y2="{_fmt(y)}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(y)}" '
                     f'text-anchor="end" font-family="monospace" '
                     f'font-size="10">{label}</text>')
    parts.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12" '
                 f'transform="rotate(-90 16 {HEIGHT // 2})">{ylabel}</text>')
    for i, (label, pts) in enumerate(cleaned):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in pts)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{WIDTH - MARGIN_R - 6}" y="{MARGIN_T + 16 + 14 * i}" '
                     f'text-anchor="end" font-family="monospace" font-size="11" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
