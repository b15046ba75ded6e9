"""Plot artifacts without a plotting dependency.

Two formats: a csv-grid of (theta, density) rows, and a minimal SVG (axes,
one curve, optional vertical mean line). Both are byte-stable: fixed decimal
formatting at 12 significant digits and LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

__all__ = ["PlotArtifact", "grid_csv", "density_svg", "write_plot"]

SVG_WIDTH = 640
SVG_HEIGHT = 400
MARGIN = 46


@dataclass(frozen=True)
class PlotArtifact:
    format: str  # "csv-grid" or "svg"
    path: Path


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def grid_csv(grid: list[tuple[float, float]]) -> str:
    """Density grid as ``theta,density`` lines (12 significant digits, LF)."""
    lines = ["theta,density"]
    lines += [f"{_fmt(t)},{_fmt(d)}" for t, d in grid]
    return "\n".join(lines) + "\n"


def density_svg(
    grid: list[tuple[float, float]],
    mean: float | None = None,
    title: str | None = None,
) -> str:
    """Single density curve as a small standalone SVG 1.1 document."""
    if not grid:
        raise ValueError("cannot plot an empty grid")
    xs = [t for t, _ in grid]
    ys = [d for _, d in grid]
    y_max = max(max(ys), 1e-12) * 1.06
    x0, x1 = MARGIN, SVG_WIDTH - 12
    y0, y1 = SVG_HEIGHT - MARGIN, 14

    def sx(t: float) -> float:
        return x0 + (x1 - x0) * t

    def sy(d: float) -> float:
        return y0 - (y0 - y1) * (d / y_max)

    points = " ".join(f"{sx(t):.2f},{sy(d):.2f}" for t, d in grid)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" '
        f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        x = sx(tick)
        parts.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{tick:g}</text>')
    parts.append(
        f'<text x="{x0 - 8}" y="{sy(y_max / 1.06):.2f}" font-size="11" '
        f'text-anchor="end" font-family="sans-serif">{y_max / 1.06:.3g}</text>')
    parts.append(
        f'<text x="{(x0 + x1) / 2:.2f}" y="{SVG_HEIGHT - 8}" font-size="12" '
        f'text-anchor="middle" font-family="sans-serif">theta</text>')
    if title:
        parts.append(
            f'<text x="{(x0 + x1) / 2:.2f}" y="{y1 - 2}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>')
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="1.6"/>')
    if mean is not None:
        x = sx(mean)
        parts.append(
            f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y1}" stroke="#d62728" '
            f'stroke-width="1.2" stroke-dasharray="7,3,2,3"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_plot(
    grid: list[tuple[float, float]],
    path: str | Path,
    mean: float | None = None,
    title: str | None = None,
) -> PlotArtifact:
    """Write the grid to ``path``; the suffix picks the format (.svg or .csv)."""
    path = Path(path)
    if path.suffix == ".svg":
        text = density_svg(grid, mean=mean, title=title)
        fmt = "svg"
    elif path.suffix == ".csv":
        text = grid_csv(grid)
        fmt = "csv-grid"
    else:
        raise ValueError(f"unsupported plot extension {path.suffix!r}; use .svg or .csv")
    with path.open("w", newline="\n") as fh:  # byte-stable LF on every platform
        fh.write(text)
    return PlotArtifact(format=fmt, path=path)
