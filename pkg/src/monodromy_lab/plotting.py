"""Matplotlib rendering of the real arrangement and its marked points.

Numerator lines are blue, denominator lines green; saddles on two lines are
crosses in the side color, extrema are filled dots in the side color, mixed
interior saddles are red crosses, and indeterminacy points are black dots.
The view window is the bounding box of all vertices padded by 20%.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "monodromy-lab"

import matplotlib.pyplot as plt  # noqa: E402

from .arrangement import Arrangement
from .critical import (
    KIND_CENTER_P,
    KIND_CENTER_Q,
    KIND_SADDLE_3,
    KIND_SADDLE_P,
    KIND_SADDLE_Q,
    CriticalPoint,
    IndeterminacyPoint,
)

_STYLE = {
    KIND_SADDLE_P: dict(marker="x", color="tab:blue"),
    KIND_SADDLE_Q: dict(marker="x", color="tab:green"),
    KIND_CENTER_P: dict(marker="o", color="tab:blue"),
    KIND_CENTER_Q: dict(marker="o", color="tab:green"),
    KIND_SADDLE_3: dict(marker="x", color="tab:red"),
}


def _view_box(arr: Arrangement, margin: float = 0.2):
    xs = [float(v.point[0]) for v in arr.vertices]
    ys = [float(v.point[1]) for v in arr.vertices]
    dx = (max(xs) - min(xs)) or 1.0
    dy = (max(ys) - min(ys)) or 1.0
    return (min(xs) - margin * dx, max(xs) + margin * dx,
            min(ys) - margin * dy, max(ys) + margin * dy)


def _clip_segment(a: float, b: float, c: float, box):
    """Endpoints of the line a x + b y + c = 0 inside the view rectangle."""
    x0, x1, y0, y1 = box
    pts = []
    if b != 0:
        for x in (x0, x1):
            y = -(a * x + c) / b
            if y0 - 1e-12 <= y <= y1 + 1e-12:
                pts.append((x, y))
    if a != 0:
        for y in (y0, y1):
            x = -(b * y + c) / a
            if x0 - 1e-12 <= x <= x1 + 1e-12:
                pts.append((x, y))
    pts = sorted(set(pts))
    return (pts[0], pts[-1]) if len(pts) >= 2 else None


def arrangement_figure(
    arr: Arrangement,
    points: list[CriticalPoint],
    indeterminacy: list[IndeterminacyPoint],
    out: str | Path,
    fmt: str = "svg",
) -> Path:
    """Render the arrangement with all marked points and save it."""
    box = _view_box(arr)
    fig, ax = plt.subplots(figsize=(7, 7))
    for line in arr.lines:
        seg = _clip_segment(float(line.a), float(line.b), float(line.c), box)
        if seg is None:
            continue
        color = "tab:blue" if line.side == "P" else "tab:green"
        ax.plot([seg[0][0], seg[1][0]], [seg[0][1], seg[1][1]],
                color=color, lw=1.2, zorder=1)

    for kind, style in _STYLE.items():
        xs = [p.x for p in points if p.kind == kind]
        ys = [p.y for p in points if p.kind == kind]
        if xs:
            ax.scatter(xs, ys, s=55, zorder=3, linewidths=1.6, **style,
                       facecolors=None if style["marker"] == "x" else style["color"])
    if indeterminacy:
        ax.scatter([float(q.point[0]) for q in indeterminacy],
                   [float(q.point[1]) for q in indeterminacy],
                   s=30, color="black", marker="o", zorder=4)

    ax.set_xlim(box[0], box[1])
    ax.set_ylim(box[2], box[3])
    ax.set_aspect("equal")
    ax.set_title(f"line family and critical points, d={arr.d}")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(out, format=fmt, metadata=metadata)
    plt.close(fig)
    return out
