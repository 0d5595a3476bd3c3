"""Figure rendering for word graphs, partitions, and report histograms.

Every function writes an image file and returns its path; the Agg backend
is forced up front so batch runs never need a display.
"""
from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .graphs import InvWordGraph
from .words import Letter

_VERTEX = "#4878a8"
_MARKED = "#e8a33d"
_START = "#3d8c40"
_END = "#c0392b"
_EDGE = "#555555"


def spring_layout(
    g: InvWordGraph, iterations: int = 200, seed: int = 7
) -> dict[int, tuple[float, float]]:
    """Fruchterman-Reingold positions, deterministic for a fixed seed."""
    verts = sorted(g.vertices())
    n = len(verts)
    if n == 0:
        return {}
    if n == 1:
        return {verts[0]: (0.0, 0.0)}
    index = {v: i for i, v in enumerate(verts)}
    adj = np.zeros((n, n), dtype=bool)
    for u, _, v in g.edge_pairs():
        if u != v:
            adj[index[u], index[v]] = adj[index[v], index[u]] = True
    rng = np.random.default_rng(seed)
    pos = rng.standard_normal((n, 2)) * 0.1
    k = 1.0 / math.sqrt(n)
    temp = 0.3
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(delta, axis=2)
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-6)
        force = (k * k) / dist - np.where(adj, dist * dist / k, 0.0)
        unit = delta / dist[:, :, None]
        disp = (unit * force[:, :, None]).sum(axis=1)
        length = np.maximum(np.linalg.norm(disp, axis=1, keepdims=True), 1e-9)
        pos = pos + disp / length * np.minimum(length, temp)
        temp *= 0.975
    pos = pos - pos.mean(axis=0)
    spread = np.abs(pos).max()
    if spread > 0:
        pos = pos / spread
    return {v: (float(pos[index[v], 0]), float(pos[index[v], 1])) for v in verts}


def _edge_curvatures(g: InvWordGraph) -> dict[tuple[int, Letter, int], float]:
    """Spread parallel edges apart so their labels stay readable."""
    groups: dict[frozenset[int], list] = defaultdict(list)
    for e in sorted(g.edge_pairs()):
        u, _, v = e
        groups[frozenset((u, v))].append(e)
    rads = {}
    for bunch in groups.values():
        for i, e in enumerate(bunch):
            rads[e] = 0.0 if len(bunch) == 1 else 0.15 * (i - (len(bunch) - 1) / 2)
    return rads


def _draw_structure(ax, g: InvWordGraph, pos, node_color) -> None:
    n = len(pos)
    show_ids = n <= 60
    rads = _edge_curvatures(g)
    for u, x, v in sorted(g.edge_pairs()):
        xu, yu = pos[u]
        xv, yv = pos[v]
        if u == v:
            ax.annotate(
                str(x), (xu, yu + 0.06), ha="center", fontsize=7, color=_EDGE
            )
            circ = plt.Circle((xu, yu + 0.03), 0.03, fill=False, color=_EDGE, lw=0.8)
            ax.add_patch(circ)
            continue
        rad = rads[(u, x, v)]
        ax.annotate(
            "",
            xy=(xv, yv),
            xytext=(xu, yu),
            arrowprops=dict(
                arrowstyle="-|>",
                color=_EDGE,
                lw=0.9,
                shrinkA=6,
                shrinkB=6,
                connectionstyle=f"arc3,rad={rad}",
            ),
        )
        mx, my = (xu + xv) / 2, (yu + yv) / 2
        # Shift the label off the chord in the arc's bending direction.
        dx, dy = xv - xu, yv - yu
        norm = math.hypot(dx, dy) or 1.0
        off = 0.03 + abs(rad) / 2
        sign = 1.0 if rad >= 0 else -1.0
        ax.annotate(
            str(x),
            (mx - sign * off * dy / norm, my + sign * off * dx / norm),
            ha="center",
            va="center",
            fontsize=7,
            color=_EDGE,
        )
    xs = [pos[v][0] for v in sorted(pos)]
    ys = [pos[v][1] for v in sorted(pos)]
    colors = [node_color(v) for v in sorted(pos)]
    ax.scatter(xs, ys, s=120 if show_ids else 40, c=colors, zorder=3, edgecolors="white")
    if show_ids:
        for v in sorted(pos):
            ax.annotate(
                str(v), pos[v], ha="center", va="center", fontsize=6,
                color="white", zorder=4,
            )
    ax.set_aspect("equal")
    ax.set_axis_off()
    ax.margins(0.12)


def _fig_for(n: int):
    side = min(10.0, 4.0 + math.sqrt(max(n, 1)) * 0.6)
    return plt.subplots(figsize=(side, side))


def draw_graph(
    g: InvWordGraph,
    path: str,
    marked=(),
    start: int | None = None,
    end: int | None = None,
    title: str | None = None,
) -> str:
    """Render the graph with roots and the marked path highlighted."""
    pos = spring_layout(g)
    marked = set(marked)

    def color(v):
        if v == start:
            return _START
        if v == end:
            return _END
        return _MARKED if v in marked else _VERTEX

    fig, ax = _fig_for(len(pos))
    _draw_structure(ax, g, pos, color)
    if title:
        ax.set_title(title, fontsize=10)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def draw_partition(g: InvWordGraph, blocks, path: str, title: str | None = None) -> str:
    """Render the graph with one colour per partition block."""
    pos = spring_layout(g)
    cmap = plt.get_cmap("tab20")
    owner = {}
    for i, block in enumerate(blocks):
        for v in block:
            owner[v] = i
    fig, ax = _fig_for(len(pos))
    _draw_structure(ax, g, pos, lambda v: cmap(owner.get(v, 0) % 20))
    if title:
        ax.set_title(title, fontsize=10)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def draw_defect_histogram(
    values, path: str, title: str, xlabel: str = "defect"
) -> str:
    """Histogram of a report statistic (four-point defects, block deltas)."""
    vals = np.asarray(list(values), dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if vals.size:
        span = vals.max() - vals.min()
        bins = 1 if span == 0 else min(20, max(5, int(math.sqrt(vals.size))))
        ax.hist(vals, bins=bins, color=_VERTEX, edgecolor="white")
    else:
        ax.annotate("no data", (0.5, 0.5), xycoords="axes fraction", ha="center")
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
