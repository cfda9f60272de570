"""Figures written next to pipeline reports.

Dual graphs: one node per tracked curve, placed on a circle, labelled with
its boundary coefficient and self-intersection; edges carry the number of
intersection points.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bounds import BoundCertificate, semigroup_member  # noqa: E402
from .numeric import format_fraction  # noqa: E402
from .surface import LogPair  # noqa: E402

# fixed metadata keeps repeated renders byte-stable
_PNG_META = {"Software": None}


def _draw_dual_graph(ax, pair: LogPair, title: str) -> None:
    model = pair.model
    n = len(model.divisors)
    pos = {
        d: (math.cos(2 * math.pi * i / max(n, 1) + math.pi / 2), math.sin(2 * math.pi * i / max(n, 1) + math.pi / 2))
        for i, d in enumerate(model.divisors)
    }
    for i, j, w in model.intersections():
        (x0, y0), (x1, y1) = pos[i], pos[j]
        ax.plot([x0, x1], [y0, y1], color="0.55", lw=1 + float(w) * 0.5, zorder=1)
        if w != 1:
            ax.text((x0 + x1) / 2, (y0 + y1) / 2, format_fraction(w), fontsize=7, color="0.3")
    coeffs = [float(pair.coeff(d)) for d in model.divisors]
    xs = [pos[d][0] for d in model.divisors]
    ys = [pos[d][1] for d in model.divisors]
    ax.scatter(xs, ys, c=coeffs, cmap="viridis", vmin=0, vmax=1, s=260, edgecolors="k", zorder=2)
    for d in model.divisors:
        x, y = pos[d]
        ax.text(x, y + 0.17, d, ha="center", fontsize=8)
        ax.text(
            x,
            y - 0.24,
            f"{format_fraction(pair.coeff(d))} | {format_fraction(model.pair(d, d))}",
            ha="center",
            fontsize=6.5,
            color="0.25",
        )
    ax.set_title(title, fontsize=9)
    ax.set_xlim(-1.5, 1.5)
    ax.set_ylim(-1.5, 1.5)
    ax.set_aspect("equal")
    ax.axis("off")


def render_pipeline_figure(cert: BoundCertificate, path: str | Path, name: str = "") -> Path:
    """Dual graphs of the input, terminal and minimal models side by side."""
    panels = [
        (cert.stages[0].input, "input"),
        (cert.stage("terminalize").output, "terminal model"),
        (cert.stage("mmp").output, "minimal model"),
    ]
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.8))
    for ax, (pair, title) in zip(axes, panels):
        _draw_dual_graph(ax, pair, f"{title} (nt = {pair.boundary.nt()})")
    fig.suptitle(f"{name}  N = {cert.N}, m0 = {cert.m0}  (label: coefficient | self-intersection)", fontsize=9)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return path


def render_semigroup_figure(N: int, upto: int, path: str | Path) -> Path:
    """Membership strip for the semigroup generated by ``qN + 1``, with the bound ``N^2 + 1`` marked."""
    ms = list(range(1, upto + 1))
    member = [1 if semigroup_member(N, m) else 0 for m in ms]
    fig, ax = plt.subplots(figsize=(8, 1.8))
    ax.bar(ms, member, width=1.0, color=["#3b7dd8" if v else "#dddddd" for v in member])
    ax.axvline(N * N + 0.5, color="crimson", lw=1.2, ls="--")
    ax.set_yticks([])
    ax.set_xlabel("m")
    ax.set_title(f"sums of qN+1 (N = {N}); dashed line at N^2 + 1 = {N * N + 1}", fontsize=9)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return path
