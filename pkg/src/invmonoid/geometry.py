"""Finite-graph geometry: hyperbolicity, cones, disc types, tree decompositions.

Everything here works on finite InvWordGraphs with the path metric of the
underlying undirected graph.  Exact arithmetic throughout: deltas are
Fractions with denominator at most 2.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graphs import ColoredBall, InvWordGraph, colored_iso


def _distance_matrix(g: InvWordGraph) -> tuple[list[int], np.ndarray]:
    """All-pairs distances as an int matrix. Raises on disconnected input."""
    verts = sorted(g.vertices())
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    mat = np.zeros((n, n), dtype=np.int64)
    for v in verts:
        dist = g.distances_from([v])
        if len(dist) != n:
            raise ValueError("graph is not connected")
        for u, d in dist.items():
            mat[index[v], index[u]] = d
    return verts, mat


def gromov_delta(g: InvWordGraph, exact: bool = True) -> Fraction:
    """Least delta satisfying the four-point condition over all quadruples.

    For each quadruple the three pair sums d(x,y)+d(z,w), d(x,z)+d(y,w),
    d(x,w)+d(y,z) are formed; the largest may exceed the median by at most
    2*delta.  With exact=False only quadruples containing vertex 0 are
    scanned, which is four times cheaper but only a 2-approximation.
    """
    verts, mat = _distance_matrix(g)
    n = len(verts)
    if n < 4:
        return Fraction(0)
    worst = 0
    rows = range(1) if not exact else range(n)
    for i in rows:
        for j in range(i, n):
            s1 = mat[i, j] + mat
            s2 = np.add.outer(mat[i], mat[j])
            s3 = np.add.outer(mat[j], mat[i])
            mx = np.maximum(np.maximum(s1, s2), s3)
            mn = np.minimum(np.minimum(s1, s2), s3)
            med = s1 + s2 + s3 - mx - mn
            gap = int((mx - med).max())
            if gap > worst:
                worst = gap
    return Fraction(worst, 2)


def four_point_gaps(g: InvWordGraph) -> np.ndarray:
    """Per-pair worst four-point defect, halved, as floats for reporting.

    One entry per unordered vertex pair {i,j}: the largest amount by which
    a quadruple through that pair misses the four-point condition.  The
    array maximum equals float(gromov_delta(g)).
    """
    verts, mat = _distance_matrix(g)
    n = len(verts)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            s1 = mat[i, j] + mat
            s2 = np.add.outer(mat[i], mat[j])
            s3 = np.add.outer(mat[j], mat[i])
            mx = np.maximum(np.maximum(s1, s2), s3)
            mn = np.minimum(np.minimum(s1, s2), s3)
            med = s1 + s2 + s3 - mx - mn
            out.append(int((mx - med).max()))
    return np.asarray(out, dtype=float) / 2.0


def cone(g: InvWordGraph, x0: int, x: int) -> InvWordGraph:
    """Induced subgraph on {y : d(x0,y) = d(x0,x) + d(x,y)}."""
    from_x0 = g.distances_from([x0])
    from_x = g.distances_from([x])
    if len(from_x0) != len(g) or len(from_x) != len(g):
        raise ValueError("graph is not connected")
    base = from_x0[x]
    keep = {y for y in g.vertices() if from_x0[y] == base + from_x[y]}
    return g.induced(keep)


def polygon_hyperbolic_check(g: InvWordGraph, x0: int, delta: int) -> bool:
    """Cone separation test: D_delta(x) must cut x0 from every cone vertex.

    True iff for every x with d(x0,x) > delta and every y in the cone of x
    outside D_delta(x), no path avoiding D_delta(x) joins x0 to y.
    """
    from_x0 = g.distances_from([x0])
    if len(from_x0) != len(g):
        raise ValueError("graph is not connected")
    for x in g.vertices():
        if from_x0[x] <= delta:
            continue
        ball = g.ball(x, delta)
        outside = set(g.vertices()) - ball
        reached = g.induced(outside).distances_from([x0])
        from_x = g.distances_from([x])
        for y in g.vertices():
            if y in ball:
                continue
            if from_x0[y] != from_x0[x] + from_x[y]:
                continue
            if y in reached:
                return False
    return True


@dataclass(frozen=True)
class TreeDecomposition:
    """A vertex partition together with its width (max block diameter)."""

    blocks: tuple[frozenset[int], ...]
    width: int


def _check_partition(g: InvWordGraph, blocks) -> list[frozenset[int]]:
    blocks = [frozenset(b) for b in blocks]
    seen: set[int] = set()
    total = 0
    for b in blocks:
        total += len(b)
        seen |= b
    if total != len(seen) or seen != set(g.vertices()):
        raise ValueError("blocks do not partition the vertex set")
    return blocks


def quotient_graph(g: InvWordGraph, blocks) -> dict[int, set[int]]:
    """Simple quotient: adjacency over block indices, cross edges deduplicated."""
    blocks = [frozenset(b) for b in blocks]
    owner: dict[int, int] = {}
    for i, b in enumerate(blocks):
        for v in b:
            owner[v] = i
    adj: dict[int, set[int]] = {i: set() for i in range(len(blocks))}
    for u, _, v in g.edges():
        bu, bv = owner[u], owner[v]
        if bu != bv:
            adj[bu].add(bv)
            adj[bv].add(bu)
    return adj


def _is_tree(adj: dict[int, set[int]]) -> bool:
    n = len(adj)
    if n == 0:
        return False
    edges = sum(len(s) for s in adj.values()) // 2
    seen = {next(iter(adj))}
    stack = list(seen)
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n and edges == n - 1


def strong_tree_check(g: InvWordGraph, blocks, m: int) -> bool:
    """True iff blocks form a strong tree decomposition of width at most m.

    Every block must induce a connected subgraph whose induced diameter is
    at most m, and the simple quotient must be a tree.
    """
    blocks = _check_partition(g, blocks)
    for b in blocks:
        sub = g.induced(b)
        d = sub.diameter()
        if d == float("inf") or d > m:
            return False
    return _is_tree(quotient_graph(g, blocks))


@dataclass(frozen=True)
class DiscType:
    """Ball of radius deltaK around center, vertices weighted by theta.

    theta(y) = d(y,x0) - d(center,x0); |theta| <= deltaK by the triangle
    inequality.  Two disc types are equivalent when a label-preserving
    isomorphism matches centers and preserves theta exactly.
    """

    ball: ColoredBall
    theta: dict[int, int]
    center: int


def disc_type(g: InvWordGraph, x0: int, x: int, deltaK: int) -> DiscType:
    from_x0 = g.distances_from([x0])
    ball_verts = g.ball(x, deltaK)
    missing = [y for y in ball_verts if y not in from_x0]
    if missing:
        raise ValueError("graph is not connected")
    theta = {y: from_x0[y] - from_x0[x] for y in ball_verts}
    colored = ColoredBall(
        graph=g.induced(ball_verts),
        center=frozenset({x}),
        colors={y: "blue" for y in ball_verts},
        theta=theta,
    )
    return DiscType(ball=colored, theta=theta, center=x)


def disc_type_equiv(t1: DiscType, t2: DiscType) -> bool:
    return colored_iso(t1.ball, t2.ball) is not None


@dataclass(frozen=True)
class TreeOfHyperbolicReport:
    """Finite-instance check of the tree-of-hyperbolic-graphs criterion.

    applicable means the hypotheses hold: at most one transition edge per
    block pair, tree quotient, every block delta-hyperbolic.  counterexample
    would mean applicable blocks with a non-hyperbolic whole; none should
    ever occur.
    """

    transition_edges_ok: bool
    quotient_is_tree: bool
    block_deltas: tuple[Fraction | None, ...]
    blocks_hyperbolic: bool
    whole_delta: Fraction | None
    whole_hyperbolic: bool
    applicable: bool
    counterexample: bool


def tree_of_hyperbolic_verify(g: InvWordGraph, blocks, delta) -> TreeOfHyperbolicReport:
    blocks = _check_partition(g, blocks)
    owner: dict[int, int] = {}
    for i, b in enumerate(blocks):
        for v in b:
            owner[v] = i

    cross: dict[tuple[int, int], set[tuple[int, object, int]]] = {}
    for u, letter, v in g.edge_pairs():
        bu, bv = owner[u], owner[v]
        if bu == bv:
            continue
        key = (min(bu, bv), max(bu, bv))
        cross.setdefault(key, set()).add((u, letter, v))
    transition_edges_ok = all(len(es) <= 1 for es in cross.values())

    quotient_is_tree = _is_tree(quotient_graph(g, blocks))

    deltas: list[Fraction | None] = []
    for b in blocks:
        sub = g.induced(b)
        try:
            deltas.append(gromov_delta(sub))
        except ValueError:
            deltas.append(None)
    blocks_hyperbolic = all(d is not None and d <= delta for d in deltas)

    try:
        whole = gromov_delta(g)
    except ValueError:
        whole = None
    whole_hyperbolic = whole is not None and whole <= delta

    applicable = transition_edges_ok and quotient_is_tree and blocks_hyperbolic
    return TreeOfHyperbolicReport(
        transition_edges_ok=transition_edges_ok,
        quotient_is_tree=quotient_is_tree,
        block_deltas=tuple(deltas),
        blocks_hyperbolic=blocks_hyperbolic,
        whole_delta=whole,
        whole_hyperbolic=whole_hyperbolic,
        applicable=applicable,
        counterexample=applicable and not whole_hyperbolic,
    )


def load_partition(text: str) -> list[frozenset[int]]:
    try:
        doc = json.loads(text)
        return [frozenset(int(v) for v in block) for block in doc["blocks"]]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ValueError("bad partition document") from exc


def dump_partition(blocks) -> str:
    return json.dumps({"blocks": [sorted(b) for b in blocks]}, indent=2)
