"""Edge labelled graphs over a doubled alphabet.

Vertices are ints.  Every edge u --x--> v is stored together with its
inverse v --x'--> u, so adjacency is symmetric by construction.  Folding
merges vertices until reading becomes deterministic; it is the workhorse
behind every approximation step.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .words import Letter

_EMPTY: frozenset[int] = frozenset()


class InvWordGraph:
    """Involutive edge labelled graph with set valued adjacency.

    marks is a free-form annotation dict (roots and the like) carried by
    serialization only; graph transformations return unmarked graphs.
    """

    def __init__(self):
        self._adj: dict[int, dict[Letter, set[int]]] = {}
        self.marks: dict = {}

    # construction

    def add_vertex(self, v: int) -> int:
        self._adj.setdefault(v, {})
        return v

    def fresh_vertex(self) -> int:
        v = max(self._adj, default=-1) + 1
        self._adj[v] = {}
        return v

    def add_edge(self, u: int, x: Letter, v: int) -> None:
        self.add_vertex(u)
        self.add_vertex(v)
        self._adj[u].setdefault(x, set()).add(v)
        self._adj[v].setdefault(x.inv(), set()).add(u)

    def copy(self) -> "InvWordGraph":
        h = InvWordGraph()
        h._adj = {v: {x: set(ts) for x, ts in nbrs.items()} for v, nbrs in self._adj.items()}
        h.marks = dict(self.marks)
        return h

    # queries

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def vertices(self):
        return self._adj.keys()

    def targets(self, u: int, x: Letter):
        return self._adj[u].get(x, _EMPTY)

    def target(self, u: int, x: Letter) -> int | None:
        """The unique x-neighbour of u, or None.  Folded graphs only."""
        ts = self._adj[u].get(x)
        if not ts:
            return None
        if len(ts) > 1:
            raise ValueError(f"vertex {u} has {len(ts)} edges labelled {x}")
        return next(iter(ts))

    def out_labels(self, u: int) -> set[Letter]:
        return {x for x, ts in self._adj[u].items() if ts}

    def neighbors(self, u: int) -> set[int]:
        out: set[int] = set()
        for ts in self._adj[u].values():
            out |= ts
        return out

    def edges(self) -> Iterator[tuple[int, Letter, int]]:
        for u, nbrs in self._adj.items():
            for x, ts in nbrs.items():
                for v in ts:
                    yield u, x, v

    def edge_pairs(self) -> Iterator[tuple[int, Letter, int]]:
        """Each geometric edge once, read in its positive direction."""
        for u, x, v in self.edges():
            if x.sign > 0:
                yield u, x, v

    def is_deterministic(self) -> bool:
        return all(len(ts) <= 1 for nbrs in self._adj.values() for ts in nbrs.values())

    def read(self, start: int, word: Iterable[Letter]) -> int | None:
        """Follow word from start, one deterministic step per letter."""
        v = start
        for x in word:
            v = self.target(v, x)
            if v is None:
                return None
        return v

    # metric helpers, all plain BFS

    def distances_from(self, sources: int | Iterable[int], within: Iterable[int] | None = None) -> dict[int, int]:
        seeds = [sources] if isinstance(sources, int) else list(sources)
        allowed = None if within is None else set(within)
        dist: dict[int, int] = {}
        queue: deque[int] = deque()
        for s in seeds:
            if s in dist or (allowed is not None and s not in allowed):
                continue
            dist[s] = 0
            queue.append(s)
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if v in dist or (allowed is not None and v not in allowed):
                    continue
                dist[v] = dist[u] + 1
                queue.append(v)
        return dist

    def distance(self, u: int, v: int) -> int | float:
        return self.distances_from(u).get(v, math.inf)

    def set_distance(self, a: Iterable[int], b: Iterable[int]) -> int | float:
        bset = set(b)
        dist = self.distances_from(a)
        hits = [d for v, d in dist.items() if v in bset]
        return min(hits) if hits else math.inf

    def ball(self, seed: Iterable[int], radius: int) -> set[int]:
        """Vertex set of the closed radius-ball around the seed set."""
        dist = self.distances_from(seed)
        return {v for v, d in dist.items() if d <= radius}

    def diameter(self, vertices: Iterable[int] | None = None) -> int | float:
        vs = set(self._adj) if vertices is None else set(vertices)
        worst = 0
        for v in vs:
            dist = self.distances_from(v, within=vs)
            if len(dist) < len(vs):
                return math.inf
            worst = max(worst, max(dist.values(), default=0))
        return worst

    def components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps: list[set[int]] = []
        for v in self._adj:
            if v in seen:
                continue
            comp = set(self.distances_from(v))
            seen |= comp
            comps.append(comp)
        return sorted(comps, key=min)

    def induced(self, vertices: Iterable[int]) -> "InvWordGraph":
        vs = set(vertices)
        h = InvWordGraph()
        for v in vs:
            h.add_vertex(v)
        for u, x, v in self.edge_pairs():
            if u in vs and v in vs:
                h.add_edge(u, x, v)
        return h


@dataclass
class BirootedAutomaton:
    """A word graph with start and end roots, 'the' automaton of a word."""

    graph: InvWordGraph
    start: int
    end: int


def read_word(g: InvWordGraph, v: int, u) -> int | None:
    return g.read(v, u)


def distance(g: InvWordGraph, u: int, v: int) -> int | float:
    return g.distance(u, v)


def geodesic(g: InvWordGraph, u: int, v: int) -> list[int] | None:
    """One shortest vertex path from u to v, or None if disconnected."""
    prev: dict[int, int] = {u: u}
    queue: deque[int] = deque([u])
    while queue and v not in prev:
        w = queue.popleft()
        for t in sorted(g.neighbors(w)):
            if t not in prev:
                prev[t] = w
                queue.append(t)
    if v not in prev:
        return None
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    return path[::-1]


def neighborhood(g: InvWordGraph, seed: Iterable[int], radius: int) -> InvWordGraph:
    """The induced subgraph on the closed radius-ball around the seed."""
    return g.induced(g.ball(seed, radius))


def fold_with_map(g: InvWordGraph, merges: Iterable[tuple[int, int]] = ()) -> tuple[InvWordGraph, dict[int, int]]:
    """Quotient g by the given merges and by edge folding until deterministic.

    Returns the folded graph with vertices renumbered 0..n-1 and the map
    from old vertices to new ones.  Confluence makes the result
    independent of processing order.
    """
    parent = {v: v for v in g.vertices()}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    adj = {v: {x: set(ts) for x, ts in g._adj[v].items()} for v in g.vertices()}
    pending: list[tuple[int, int]] = list(merges)
    for nbrs in adj.values():
        for ts in nbrs.values():
            if len(ts) > 1:
                it = iter(sorted(ts))
                first = next(it)
                pending.extend((first, t) for t in it)

    while pending:
        a, b = pending.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if len(adj[ra]) < len(adj[rb]):
            ra, rb = rb, ra
        parent[rb] = ra
        loser = adj.pop(rb)
        winner = adj[ra]
        for x, ts in loser.items():
            winner.setdefault(x, set()).update(ts)
            roots = {find(t) for t in winner[x]}
            winner[x] = roots
            if len(roots) > 1:
                it = iter(sorted(roots))
                first = next(it)
                pending.extend((first, t) for t in it)

    roots = sorted({find(v) for v in g.vertices()})
    newid = {r: i for i, r in enumerate(roots)}
    h = InvWordGraph()
    for r in roots:
        h.add_vertex(newid[r])
    for r in roots:
        for x, ts in adj[r].items():
            for t in ts:
                h.add_edge(newid[r], x, newid[find(t)])
    mapping = {v: newid[find(v)] for v in g.vertices()}
    return h, mapping


def fold(g: InvWordGraph) -> InvWordGraph:
    """The deterministic quotient of g, vertices renumbered."""
    return fold_with_map(g)[0]


def cut_components(g: InvWordGraph, cut: Iterable[int], x0: int) -> tuple[set[int], set[int]]:
    """Vertex sets of the x0 side and the far side of g minus the cut."""
    cutset = set(cut)
    if x0 in cutset:
        raise ValueError("base point lies in the cut set")
    rest = set(g.vertices()) - cutset
    gamma = set(g.distances_from(x0, within=rest))
    gamma_c = rest - gamma
    return gamma, gamma_c


def components_rel(g: InvWordGraph, cut, x0: int) -> tuple[InvWordGraph, InvWordGraph]:
    """Induced subgraphs on the two sides of g minus the cut set.

    cut may be a vertex iterable or a graph whose vertices to remove.
    """
    cutset = set(cut.vertices()) if isinstance(cut, InvWordGraph) else set(cut)
    gamma, gamma_c = cut_components(g, cutset, x0)
    return g.induced(gamma), g.induced(gamma_c)


def rooted_map(
    g1: InvWordGraph,
    roots1: tuple[int, ...],
    g2: InvWordGraph,
    roots2: tuple[int, ...],
) -> dict[int, int] | None:
    """Label preserving isomorphism sending roots1 to roots2 pointwise.

    Both graphs must be deterministic and reachable from their roots; the
    map is then forced by propagation.
    """
    if len(g1) != len(g2) or len(roots1) != len(roots2):
        return None
    m: dict[int, int] = {}
    rng: set[int] = set()
    queue: deque[int] = deque()
    for r1, r2 in zip(roots1, roots2):
        if r1 in m:
            if m[r1] != r2:
                return None
            continue
        if r2 in rng:
            return None
        m[r1] = r2
        rng.add(r2)
        queue.append(r1)
    while queue:
        u = queue.popleft()
        v = m[u]
        if g1.out_labels(u) != g2.out_labels(v):
            return None
        for x in g1.out_labels(u):
            t = g1.target(u, x)
            t2 = g2.target(v, x)
            if t in m:
                if m[t] != t2:
                    return None
            else:
                if t2 in rng:
                    return None
                m[t] = t2
                rng.add(t2)
                queue.append(t)
    if len(m) != len(g1):
        return None
    return m


def rooted_iso(a: BirootedAutomaton, b: BirootedAutomaton) -> bool:
    """Label isomorphism matching start with start and end with end."""
    return rooted_map(a.graph, (a.start, a.end), b.graph, (b.start, b.end)) is not None


@dataclass
class ColoredBall:
    """A neighbourhood together with the decorations isomorphisms must respect.

    center is compared setwise; pass an empty set when the seed itself is
    not pinned.  theta stores integer level offsets when levels matter
    and is None otherwise.
    """

    graph: InvWordGraph
    center: frozenset[int]
    colors: dict[int, str]
    theta: dict[int, int] | None = None


def _ball_sig(b: ColoredBall, v: int):
    return (
        b.colors.get(v),
        None if b.theta is None else b.theta.get(v),
        v in b.center,
        tuple(sorted(str(x) for x in b.graph.out_labels(v))),
    )


def colored_iso(b1: ColoredBall, b2: ColoredBall) -> dict[int, int] | None:
    """Isomorphism of colored balls, or None.

    Deterministic graphs only.  Within a component the map is forced from
    a single anchor, so the search just backtracks over anchor images;
    anchors are chosen with minimal-frequency signature to keep that loop
    short.
    """
    g1, g2 = b1.graph, b2.graph
    if len(g1) != len(g2):
        return None
    sig_index: dict[tuple, list[int]] = {}
    for v in g2.vertices():
        sig_index.setdefault(_ball_sig(b2, v), []).append(v)
    for vs in sig_index.values():
        vs.sort()
    comps = sorted(g1.components(), key=lambda c: (-len(c), min(c)))

    def propagate(anchor: int, w: int, used: set[int]) -> dict[int, int] | None:
        m = {anchor: w}
        rng = {w}
        queue = deque([anchor])
        while queue:
            u = queue.popleft()
            v = m[u]
            if _ball_sig(b1, u) != _ball_sig(b2, v):
                return None
            for x in g1.out_labels(u):
                t = g1.target(u, x)
                t2 = g2.target(v, x)
                if t in m:
                    if m[t] != t2:
                        return None
                else:
                    if t2 is None or t2 in rng or t2 in used:
                        return None
                    m[t] = t2
                    rng.add(t2)
                    queue.append(t)
        return m

    def solve(i: int, used: set[int]) -> dict[int, int] | None:
        if i == len(comps):
            return {}
        comp = comps[i]
        anchor = min(comp, key=lambda v: (len(sig_index.get(_ball_sig(b1, v), [])), v))
        for w in sig_index.get(_ball_sig(b1, anchor), []):
            if w in used:
                continue
            ext = propagate(anchor, w, used)
            if ext is None:
                continue
            rest = solve(i + 1, used | set(ext.values()))
            if rest is not None:
                return ext | rest
        return None

    return solve(0, set())


# serialization

def _parse_label(text: str) -> Letter:
    if text.endswith("'"):
        return Letter(text[:-1], -1)
    return Letter(text, 1)


def export_json(g: InvWordGraph, marks: dict | None = None) -> str:
    data: dict = {
        "vertices": sorted(g.vertices()),
        "edges": [
            {"src": u, "label": str(x), "dst": v}
            for u, x, v in sorted(g.edge_pairs())
        ],
    }
    if marks is None:
        marks = g.marks
    if marks:
        data["marks"] = marks
    return json.dumps(data, indent=2)


def import_json(text: str) -> InvWordGraph:
    try:
        data = json.loads(text)
        g = InvWordGraph()
        for v in data["vertices"]:
            g.add_vertex(int(v))
        for e in data["edges"]:
            g.add_edge(int(e["src"]), _parse_label(str(e["label"])), int(e["dst"]))
        g.marks = data.get("marks", {})
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise ValueError(f"bad graph document: {e}") from e
    return g


def export_dot(g: InvWordGraph, marks: dict | None = None) -> str:
    if marks is None:
        marks = g.marks
    lines = ["digraph wordgraph {", "  rankdir=LR;", "  node [shape=circle];"]
    start = marks.get("start")
    end = marks.get("end")
    special = {v for v in (start, end) if v is not None}
    for v in sorted(g.vertices()):
        attrs = []
        if v == start:
            attrs.append("style=bold")
        if v == end:
            attrs.append("shape=doublecircle")
        if v in set(marks.get("marked", ())) - special:
            attrs.append("style=filled")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {v}{suffix};")
    for u, x, v in sorted(g.edge_pairs()):
        lines.append(f'  {u} -> {v} [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
