"""Static, dependency-free SVG line plots of experiment records.

Output bytes depend only on the records passed in: coordinates are printed
with fixed precision and families are drawn in a fixed order.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .errors import EmptyPlot
from .scores import FAMILIES, LABELS

COLORS = {
    "uniform": "#1f77b4",
    "lev": "#d62728",
    "sqrt-lev": "#ff7f0e",
    "opt-est": "#9467bd",
    "opt-pred": "#2ca02c",
    "nsr-est": "#8c564b",
    "nsr-pred": "#7f7f7f",
}
WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 30, 55


def _fmt(x):
    return f"{x:.2f}"


def _tick(x):
    return f"{x:.4g}"


def _family_key(f):
    return (FAMILIES.index(f), f) if f in FAMILIES else (len(FAMILIES), f)


def _select(records, axis, at):
    if axis == "by_m":
        fixed = sorted({r.sigma for r in records})
        fixed_val = fixed[-1] if at is None else float(at)
        pts = [(r.family, r.m, r) for r in records if r.sigma == fixed_val]
        return pts, f"sigma = {_tick(fixed_val)}", "sample size m"
    if axis == "by_sigma":
        fixed = sorted({r.m for r in records})
        fixed_val = fixed[-1] if at is None else int(at)
        pts = [(r.family, r.sigma, r) for r in records if r.m == fixed_val]
        return pts, f"m = {fixed_val}", "noise level sigma"
    raise ValueError(f"axis must be 'by_m' or 'by_sigma', got {axis!r}")


def render_svg(records, axis="by_m", metric="est", at=None) -> str:
    """One polyline per family; ``at`` fixes sigma (by_m) or m (by_sigma), default the largest."""
    if metric not in ("est", "pred"):
        raise ValueError(f"metric must be 'est' or 'pred', got {metric!r}")
    records = list(records)
    if not records:
        raise EmptyPlot("no records to plot")
    pts, subtitle, xlabel = _select(records, axis, at)
    if not pts:
        raise EmptyPlot(f"no records for axis {axis} at {at}")
    attr = "mean_err_est" if metric == "est" else "mean_err_pred"
    series = {}
    for fam, x, r in pts:
        series.setdefault(fam, []).append((float(x), float(getattr(r, attr))))
    for v in series.values():
        v.sort()

    xs = [x for v in series.values() for x, _ in v]
    ys = [y for v in series.values() for _, y in v]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1 = 0.0, max(ys) * 1.05 if max(ys) > 0 else 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    ylabel = "err_Est" if metric == "est" else "err_Pred"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT}" y="18" font-family="sans-serif" font-size="13">{escape(ylabel)} ({escape(subtitle)})</text>',
        f'<line x1="{LEFT}" y1="{_fmt(TOP + ph)}" x2="{_fmt(LEFT + pw)}" y2="{_fmt(TOP + ph)}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{_fmt(TOP + ph)}" stroke="black"/>',
    ]
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        out.append(
            f'<text x="{_fmt(sx(xv))}" y="{_fmt(TOP + ph + 16)}" font-family="sans-serif" font-size="11" '
            f'text-anchor="middle">{_tick(xv)}</text>'
        )
        out.append(
            f'<text x="{LEFT - 6}" y="{_fmt(sy(yv) + 4)}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{_tick(yv)}</text>'
        )
    out.append(
        f'<text x="{_fmt(LEFT + pw / 2)}" y="{HEIGHT - 12}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle">{escape(xlabel)}</text>'
    )
    fams = sorted(series, key=_family_key)
    for i, fam in enumerate(fams):
        color = COLORS.get(fam, "#000000")
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in series[fam])
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = TOP + 10 + 20 * i
        lx = LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text class="legend" x="{lx + 32}" y="{ly + 4}" font-family="sans-serif" font-size="12">'
            f"{escape(LABELS.get(fam, fam))}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(records, axis, metric, path, at=None):
    svg = render_svg(records, axis, metric, at)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(svg)
    except OSError as e:
        raise OSError(f"cannot write plot to {path}: {e.strerror or e}") from e
