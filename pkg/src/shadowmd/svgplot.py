"""Small deterministic SVG charts (histogram and line plots).

Hand-rolled on purpose: output files must be bit-identical across runs with
the same inputs, so no timestamps, hashes or library version drift may leak
into them. Numbers are formatted with fixed precision.
"""

from pathlib import Path

import numpy as np

WIDTH, HEIGHT = 760, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 40, 56

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick_values(lo: float, hi: float, count: int = 6) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (1.0, 2.0, 2.5, 5.0, 10.0) if s * mag >= raw) * mag
    first = np.ceil(lo / step) * step
    return np.arange(first, hi + 0.5 * step, step)


class _Canvas:
    def __init__(self, x_range, y_range, title, x_label, y_label):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{title}</text>',
        ]
        self._axes(x_label, y_label)

    def x_px(self, x) -> np.ndarray:
        span = self.x_hi - self.x_lo
        frac = (np.asarray(x, dtype=float) - self.x_lo) / span
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def y_px(self, y) -> np.ndarray:
        span = self.y_hi - self.y_lo
        frac = (np.asarray(y, dtype=float) - self.y_lo) / span
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)

    def _axes(self, x_label, y_label):
        x0, x1 = MARGIN_L, WIDTH - MARGIN_R
        y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
        self.parts.append(
            f'<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" stroke="black" '
            f'fill="none" stroke-width="1"/>'
        )
        for xv in _tick_values(self.x_lo, self.x_hi):
            px = float(self.x_px(xv))
            self.parts.append(
                f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 5}" '
                f'stroke="black" stroke-width="1"/>'
            )
            self.parts.append(
                f'<text x="{_fmt(px)}" y="{y0 + 20}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{xv:g}</text>'
            )
        for yv in _tick_values(self.y_lo, self.y_hi):
            py = float(self.y_px(yv))
            self.parts.append(
                f'<line x1="{x0 - 5}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" '
                f'stroke="black" stroke-width="1"/>'
            )
            self.parts.append(
                f'<text x="{x0 - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{yv:g}</text>'
            )
        self.parts.append(
            f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{x_label}</text>'
        )
        self.parts.append(
            f'<text x="18" y="{(y0 + y1) // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 18 {(y0 + y1) // 2})">{y_label}</text>'
        )

    def legend(self, entries):
        x = WIDTH - MARGIN_R - 170
        y = MARGIN_T + 10
        for i, (label, color) in enumerate(entries):
            yy = y + 18 * i
            self.parts.append(
                f'<rect x="{x}" y="{yy - 9}" width="12" height="12" '
                f'fill="{color}" fill-opacity="0.7"/>'
            )
            self.parts.append(
                f'<text x="{x + 18}" y="{yy + 2}" font-family="sans-serif" '
                f'font-size="12">{label}</text>'
            )

    def write(self, path):
        self.parts.append("</svg>")
        Path(path).write_text("\n".join(self.parts) + "\n", encoding="utf-8")


def histogram_svg(
    path,
    bin_edges: np.ndarray,
    series: list[tuple[str, np.ndarray]],
    title: str,
    x_label: str,
    y_label: str = "count",
) -> None:
    """Overlaid translucent bar histograms on shared bins."""
    top = max((int(counts.max()) for _, counts in series if counts.size), default=1)
    canvas = _Canvas(
        (float(bin_edges[0]), float(bin_edges[-1])), (0.0, top * 1.05 or 1.0),
        title, x_label, y_label,
    )
    y0 = canvas.y_px(0.0)
    for k, (label, counts) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        lefts = canvas.x_px(bin_edges[:-1])
        rights = canvas.x_px(bin_edges[1:])
        tops = canvas.y_px(counts)
        for i in range(counts.shape[0]):
            if counts[i] == 0:
                continue
            canvas.parts.append(
                f'<rect x="{_fmt(lefts[i])}" y="{_fmt(tops[i])}" '
                f'width="{_fmt(rights[i] - lefts[i])}" '
                f'height="{_fmt(float(y0) - tops[i])}" fill="{color}" '
                f'fill-opacity="0.55"/>'
            )
    canvas.legend([(lbl, PALETTE[k % len(PALETTE)]) for k, (lbl, _) in enumerate(series)])
    canvas.write(path)


def line_svg(
    path,
    series: list[tuple[str, np.ndarray, np.ndarray, float, float]],
    title: str,
    x_label: str,
    y_label: str,
    y_range: tuple[float, float] | None = None,
) -> None:
    """Polyline chart; each series is (label, xs, ys, stroke_width, opacity)."""
    xs_all = np.concatenate([s[1] for s in series])
    ys_all = np.concatenate([s[2] for s in series])
    if y_range is None:
        pad = 0.05 * (ys_all.max() - ys_all.min() or 1.0)
        y_range = (float(ys_all.min() - pad), float(ys_all.max() + pad))
    canvas = _Canvas(
        (float(xs_all.min()), float(xs_all.max())), y_range, title, x_label, y_label
    )
    legend = []
    for k, (label, xs, ys, width, opacity) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        px = canvas.x_px(xs)
        py = canvas.y_px(np.clip(ys, y_range[0], y_range[1]))
        points = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        canvas.parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="{width:g}" stroke-opacity="{opacity:g}"/>'
        )
        if label:
            legend.append((label, color))
    canvas.legend(legend)
    canvas.write(path)
