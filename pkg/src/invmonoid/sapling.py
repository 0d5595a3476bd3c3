"""Saplings: self-similar finite approximations of infinite Schutzenberger graphs.

A sapling is a finite approximate graph S together with systems (Y_i, X_i,
phi_i): each Y_i marks a frontier region, X_i is an interior region whose
colored K-neighborhood looks exactly like Y_i's, and phi_i matches them.
Growing a sapling glues a fresh copy of everything beyond X_i onto the
Y_i side; iterating recovers the whole infinite graph.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graphs import (
    BirootedAutomaton,
    ColoredBall,
    InvWordGraph,
    colored_iso,
    cut_components,
    fold_with_map,
)
from .stephen import (
    ApproxAutomaton,
    _adjoin_path,
    _expansion_instances,
    expand,
    is_p_complete,
    is_relatively_p_complete,
)
from .words import InvWord, Presentation


@dataclass(frozen=True)
class Violation:
    """A failed sapling condition: which one, and a short witness."""

    condition: str
    detail: str


@dataclass
class SaplingCandidate:
    """Conditions (1)-(4): frontier systems with matched colored neighborhoods.

    phi[i] maps the K-ball of X[i] onto the K-ball of Y[i].
    """

    S: ApproxAutomaton
    Y: tuple[frozenset[int], ...]
    X: tuple[frozenset[int], ...]
    phi: tuple[dict[int, int], ...]
    K: int

    @property
    def n(self) -> int:
        return len(self.Y)


@dataclass
class Sapling(SaplingCandidate):
    """A candidate whose complement regions regenerate after k expansions.

    chains records, per system, the nesting history of copies made by grow;
    a fresh sapling has chains (0,), (1,), ....  Used by the tree
    decomposition of the materialized graph.
    """

    k: int = 0
    chains: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if not self.chains:
            self.chains = tuple((i,) for i in range(self.n))


@dataclass(frozen=True)
class FiniteGraph:
    """The search ended because the approximation closed up: this is the
    whole Schutzenberger automaton."""

    auto: ApproxAutomaton


@dataclass(frozen=True)
class Exhausted:
    """Search diagnostics: last expansion stage reached and open candidates."""

    m: int
    entries: int


def _as_graph(S) -> InvWordGraph:
    return S.graph if isinstance(S, ApproxAutomaton) else S


def color_neighborhood(S, X, x0: int, K: int, marked=None) -> ColoredBall:
    """K-ball around X, red on the far-from-x0 side, blue elsewhere.

    Red vertices are those of X^{+K} cut off from x0 by X; they are the
    gluing sites for grow.  X itself is blue.
    """
    g = _as_graph(S)
    if marked is None:
        marked = S.marked if isinstance(S, ApproxAutomaton) else frozenset()
    X = frozenset(X)
    if not X or any(v not in g for v in X):
        raise ValueError("X is not a vertex subset")
    if x0 in X:
        raise ValueError("base point lies in X")
    if X & set(marked):
        raise ValueError("X meets the marked path")
    if len(g.induced(X).components()) != 1:
        raise ValueError("X is not connected")
    ball = g.ball(X, K)
    _, far = cut_components(g, X, x0)
    colors = {v: ("red" if v in far else "blue") for v in ball}
    return ColoredBall(graph=g.induced(ball), center=X, colors=colors, theta=None)


def candidate_check(S: ApproxAutomaton, Ys, Xs, P: Presentation | None = None):
    """Check conditions (1)-(4); return a SaplingCandidate or a Violation.

    (1) the common near side of all Y_i is relatively complete;
    (2) the far side of each Y_i stays inside its K-ball;
    (3) distinct far-side regions are at distance at least 2;
    (4) each X_i ball sits in the common near side and matches Y_i's
        colored ball (the matching is the returned phi_i).
    """
    if P is None:
        P = S.presentation
    g = S.graph
    x0 = S.start
    K = P.K
    marked = set(S.marked)
    Ys = [frozenset(y) for y in Ys]
    Xs = [frozenset(x) for x in Xs]
    if len(Ys) != len(Xs):
        raise ValueError("Y and X lists differ in length")

    y_balls = []
    for i, Y in enumerate(Ys):
        if Y & marked:
            return Violation("S\\M", f"Y[{i}] touches the marked path")
        try:
            y_balls.append(color_neighborhood(S, Y, x0, K))
        except ValueError as exc:
            return Violation("S\\M", f"Y[{i}]: {exc}")

    near_sides = []
    far_sides = []
    for Y in Ys:
        near, far = cut_components(g, Y, x0)
        near_sides.append(near)
        far_sides.append(far)

    core = set(g.vertices()) if not Ys else set.intersection(*near_sides)
    if not is_relatively_p_complete(core, g, P):
        return Violation("1", "common near side is not relatively complete")

    for i, Y in enumerate(Ys):
        extra = far_sides[i] - g.ball(Y, K)
        if extra:
            return Violation("2", f"far side of Y[{i}] leaves the K-ball at {min(extra)}")

    for i in range(len(Ys)):
        for j in range(i + 1, len(Ys)):
            a = far_sides[i] | Ys[i]
            b = far_sides[j] | Ys[j]
            if g.set_distance(a, b) < 2:
                return Violation("3", f"regions of Y[{i}] and Y[{j}] are too close")

    phis = []
    for i, X in enumerate(Xs):
        if X & marked:
            return Violation("S\\M", f"X[{i}] touches the marked path")
        outside = g.ball(X, K) - core
        if outside:
            return Violation("4", f"ball of X[{i}] leaves the common near side at {min(outside)}")
        try:
            x_ball = color_neighborhood(S, X, x0, K)
        except ValueError as exc:
            return Violation("4", f"X[{i}]: {exc}")
        iso = colored_iso(x_ball, y_balls[i])
        if iso is None:
            return Violation("4", f"colored balls of X[{i}] and Y[{i}] do not match")
        phis.append(iso)

    return SaplingCandidate(S=S, Y=tuple(Ys), X=tuple(Xs), phi=tuple(phis), K=K)


def _exp_graph(g: InvWordGraph, P: Presentation) -> tuple[InvWordGraph, dict[int, int]]:
    """One expansion-and-fold step on a bare graph, with the vertex map."""
    adjoins, merges = _expansion_instances(g, P)
    work = g.copy()
    for u, word, v in adjoins:
        _adjoin_path(work, u, word, v)
    return fold_with_map(work, merges)


class _EmbedProbe:
    """Tracks one X_i ball through repeated expansions.

    Holds the expanded graph and the images of the original ball vertices,
    so the containment check of condition (5) can be re-run as l grows.
    """

    def __init__(self, g: InvWordGraph, X: frozenset[int], K: int, x0: int):
        self.X = X
        self.level = 0
        ball = g.ball(X, K)
        _, far = cut_components(g, X, x0)
        self.target = g.induced(X | far)
        self.h = g.induced(ball)
        self.trace = {v: v for v in ball}

    def advance(self, P: Presentation) -> None:
        self.h, mapping = _exp_graph(self.h, P)
        self.trace = {v: mapping[w] for v, w in self.trace.items()}
        self.level += 1

    def check(self) -> bool:
        seeds = {v: self.trace[v] for v in self.X}
        return _forced_embed(self.target, seeds, self.h) is not None


def _forced_embed(target: InvWordGraph, seeds: dict[int, int], host: InvWordGraph) -> dict[int, int] | None:
    """Injective label-preserving embedding of target into host extending seeds.

    host is deterministic, so the extension is forced edge by edge; returns
    None when an edge is missing, images clash, or some target vertex stays
    unreached from the seeds.
    """
    image = dict(seeds)
    queue = sorted(seeds)
    while queue:
        u = queue.pop()
        for letter in target.out_labels(u):
            for v in target.targets(u, letter):
                w = host.target(image[u], letter)
                if w is None:
                    return None
                if v in image:
                    if image[v] != w:
                        return None
                else:
                    image[v] = w
                    queue.append(v)
    if len(image) != len(target):
        return None
    if len(set(image.values())) != len(image):
        return None
    return image


def sapling_check(c: SaplingCandidate, k: int):
    """Condition (5) at bound k: beyond-X regions regenerate from the X balls.

    Returns the Sapling on success, None when k expansions are not yet
    enough (callers grow k).
    """
    g = c.S.graph
    x0 = c.S.start
    P = c.S.presentation
    for X in c.X:
        probe = _EmbedProbe(g, X, c.K, x0)
        for _ in range(k):
            probe.advance(P)
        if not probe.check():
            return None
    return Sapling(S=c.S, Y=c.Y, X=c.X, phi=c.phi, K=c.K, k=k)


def grow(s: Sapling) -> Sapling:
    """Glue a fresh copy of each beyond-X region onto the matching Y side.

    Vertices of S keep their ids; overlap vertices (X-ball on the far side
    of X) land on their phi images, everything else is fresh.  The new
    systems are the psi-copies of the old Y's, with X replaced by Y.
    """
    g = s.S.graph
    x0 = s.S.start
    K = s.K
    work = g.copy()

    far_of_X = []
    psis = []
    for i, X in enumerate(s.X):
        _, far = cut_components(g, X, x0)
        far_of_X.append(far)
        overlap = g.ball(X, K) & far
        psi: dict[int, int] = {}
        for v in sorted(far):
            if v in overlap:
                psi[v] = s.phi[i][v]
            else:
                nv = work.fresh_vertex()
                psi[v] = nv
        for u, letter, v in g.induced(far).edge_pairs():
            work.add_edge(psi[u], letter, psi[v])
        psis.append(psi)
    assert work.is_deterministic(), "glued graph is nondeterministic"

    new_Y = []
    new_X = []
    new_phi = []
    new_chains = []
    for i, psi in enumerate(psis):
        for j in range(s.n):
            if not (s.Y[j] <= far_of_X[i]):
                continue
            ball = work.ball(s.Y[j], K)
            missing = [v for v in ball if v not in psi]
            assert not missing, "copy map does not cover a new X ball"
            new_Y.append(frozenset(psi[v] for v in s.Y[j]))
            new_X.append(s.Y[j])
            new_phi.append({v: psi[v] for v in ball})
            new_chains.append((s.chains[j][0],) + s.chains[i])

    auto = ApproxAutomaton(
        auto=BirootedAutomaton(graph=work, start=s.S.start, end=s.S.end),
        presentation=s.S.presentation,
        stage=s.S.stage,
        source_word=s.S.source_word,
        marked=s.S.marked,
    )
    return Sapling(
        S=auto,
        Y=tuple(new_Y),
        X=tuple(new_X),
        phi=tuple(new_phi),
        K=s.K,
        k=s.k,
        chains=tuple(new_chains),
    )


def grow_chain(s: Sapling, steps: int) -> list[Sapling]:
    """s and its first `steps` growths."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = [s]
    for _ in range(steps):
        out.append(grow(out[-1]))
    return out


def materialize(s: Sapling, steps: int) -> ApproxAutomaton:
    """The graph after `steps` growths, as an approximate automaton."""
    return grow_chain(s, steps)[-1].S


def verify_sapling(s: Sapling) -> Violation | None:
    """Full invariant check against the stored systems and phi maps."""
    g = s.S.graph
    x0 = s.S.start
    cand = candidate_check(s.S, s.Y, s.X, s.S.presentation)
    if isinstance(cand, Violation):
        return cand
    for i in range(s.n):
        x_ball = g.ball(s.X[i], s.K)
        y_ball = g.ball(s.Y[i], s.K)
        phi = s.phi[i]
        if set(phi) != x_ball or set(phi.values()) != y_ball:
            return Violation("4", f"phi[{i}] is not a ball bijection")
        if len(set(phi.values())) != len(phi):
            return Violation("4", f"phi[{i}] is not injective")
        if {phi[v] for v in s.X[i]} != set(s.Y[i]):
            return Violation("4", f"phi[{i}] does not map X onto Y")
        _, far_x = cut_components(g, s.X[i], x0)
        _, far_y = cut_components(g, s.Y[i], x0)
        for u in x_ball:
            if (u in far_x) != (phi[u] in far_y):
                return Violation("4", f"phi[{i}] breaks colors at {u}")
            for letter in g.out_labels(u):
                for v in g.targets(u, letter):
                    if v in x_ball and g.target(phi[u], letter) != phi[v]:
                        return Violation("4", f"phi[{i}] breaks an edge at {u}")
    if sapling_check(SaplingCandidate(s.S, s.Y, s.X, s.phi, s.K), s.k) is None:
        return Violation("5", f"regions do not regenerate within {s.k} expansions")
    return None


def _connected_subsets(g: InvWordGraph, allowed: set[int], max_diam: int, cap: int):
    """Connected induced subsets of `allowed`, small enough to be Y regions.

    Enumerated canonically (each set produced once, from its minimum
    vertex); size is bounded via the diameter bound, total output by cap.
    """
    allowed_sorted = sorted(allowed)
    max_size = max_diam + 3
    out: set[frozenset[int]] = set()
    for root in allowed_sorted:
        stack = [(frozenset([root]), tuple(sorted(v for v in g.neighbors(root) if v in allowed and v > root)))]
        while stack and len(out) < cap:
            current, frontier = stack.pop()
            if g.diameter(current) <= max_diam:
                out.add(current)
            if len(current) >= max_size:
                continue
            for idx, v in enumerate(frontier):
                grown = current | {v}
                extra = tuple(
                    w
                    for w in sorted(g.neighbors(v))
                    if w in allowed and w > root and w not in grown and w not in frontier[idx + 1 :]
                )
                stack.append((grown, frontier[idx + 1 :] + extra))
        if len(out) >= cap:
            break
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _x_matches(S: ApproxAutomaton, Y: frozenset[int], y_ball: ColoredBall, core: set[int], K: int, cap: int = 50):
    """Interior sets whose colored K-ball matches Y's, with their phi maps."""
    g = S.graph
    x0 = S.start
    marked = set(S.marked)
    anchor = min(Y)
    found = []
    for cand in sorted(core):
        if cand in marked:
            continue
        nu = _forced_embed(y_ball.graph, {anchor: cand}, g)
        if nu is None:
            continue
        X = frozenset(nu[y] for y in Y)
        if X & marked or x0 in X:
            continue
        if g.ball(X, K) - core:
            continue
        try:
            x_ball = color_neighborhood(S, X, x0, K)
        except ValueError:
            continue
        phi = colored_iso(x_ball, y_ball)
        if phi is None:
            continue
        found.append((X, phi))
        if len(found) >= cap:
            break
    return found


def _system_key(stage: int, Ys, Xs) -> tuple:
    return (
        stage,
        tuple(sorted(tuple(sorted(y)) for y in Ys)),
        tuple(sorted(tuple(sorted(x)) for x in Xs)),
    )


def _candidates_at(a: ApproxAutomaton, P: Presentation, max_diam: int, max_systems: int, seen: set):
    """Sapling candidates on one expansion stage, within the current bounds."""
    g = a.graph
    x0 = a.start
    K = P.K
    allowed = set(g.vertices()) - set(a.marked)
    singles = []
    for Y in _connected_subsets(g, allowed, max_diam, cap=5000):
        _, far = cut_components(g, Y, x0)
        if far - g.ball(Y, K):
            continue
        singles.append((Y, far))

    def compatible(a, b):
        return g.set_distance(a[0] | a[1], b[0] | b[1]) >= 2

    systems: list[list[tuple[frozenset[int], set[int]]]] = [[pair] for pair in singles]
    if max_systems >= 2:
        pairs = [
            [singles[i], singles[j]]
            for i in range(len(singles))
            for j in range(i + 1, len(singles))
            if compatible(singles[i], singles[j])
        ]
        del pairs[2000:]
        systems.extend(pairs)
        for pair in pairs:
            group = list(pair)
            j0 = singles.index(pair[1])
            for j in range(j0 + 1, len(singles)):
                if len(group) >= max_systems:
                    break
                if all(compatible(member, singles[j]) for member in group):
                    group.append(singles[j])
            if len(group) > 2:
                systems.append(group)

    out = []
    for group in systems:
        Ys = [Y for Y, _ in group]
        nears = [cut_components(g, Y, x0)[0] for Y in Ys]
        core = set.intersection(*nears)
        if not is_relatively_p_complete(core, g, P):
            continue
        per_system = []
        for Y, _ in group:
            y_ball = color_neighborhood(a, Y, x0, K)
            matches = _x_matches(a, Y, y_ball, core, K)
            if not matches:
                break
            per_system.append(matches)
        if len(per_system) != len(group):
            continue
        choice = [m[0] for m in per_system]
        Xs = [X for X, _ in choice]
        key = _system_key(a.stage, Ys, Xs)
        if key in seen:
            continue
        seen.add(key)
        cand = candidate_check(a, Ys, Xs, P)
        if isinstance(cand, SaplingCandidate):
            out.append(cand)
    return out


def find_sapling(w: InvWord, P: Presentation, budget: int, progress=None):
    """Dovetailed search: expansion stages, candidate systems, and bound k.

    Returns the first Sapling found, the whole automaton as a FiniteGraph
    when some stage is complete, or Exhausted diagnostics.  Deterministic
    for fixed inputs.  progress, if given, receives one status line per
    round.
    """
    seen: set = set()
    entries: list[tuple[SaplingCandidate, list[_EmbedProbe]]] = []
    scanned: dict[int, tuple[int, int]] = {}
    for r in range(budget + 1):
        a = expand(w, P, r)
        if progress is not None:
            progress(f"stage {r}: {len(a.graph)} vertices, {len(entries)} candidates")
        if is_p_complete(a.graph, P):
            return FiniteGraph(a)
        max_diam, max_systems = r // 3, 1 + r // 3
        for j in range(r + 1):
            if scanned.get(j) == (max_diam, max_systems):
                continue
            scanned[j] = (max_diam, max_systems)
            stage = expand(w, P, j)
            for cand in _candidates_at(stage, P, max_diam, max_systems, seen):
                probes = [_EmbedProbe(cand.S.graph, X, cand.K, cand.S.start) for X in cand.X]
                if all(p.check() for p in probes):
                    return Sapling(S=cand.S, Y=cand.Y, X=cand.X, phi=cand.phi, K=cand.K, k=0)
                entries.append((cand, probes))
        for cand, probes in entries:
            for p in probes:
                p.advance(P)
            if all(p.check() for p in probes):
                k = probes[0].level if probes else 0
                return Sapling(S=cand.S, Y=cand.Y, X=cand.X, phi=cand.phi, K=cand.K, k=k)
    return Exhausted(m=budget, entries=len(entries))


def proof_partition(s: Sapling, steps: int) -> list[frozenset[int]]:
    """The theorem's partition of the materialized graph into bounded blocks.

    P0 is the common near side of the original Y's plus the Y's themselves;
    each copy region is split along the next generation's Y's; regions of
    the last generation stay whole.  Blocks beyond P0 are split into
    connected components.
    """
    chain_list = grow_chain(s, steps)
    G = chain_list[-1].S.graph
    x0 = chain_list[-1].S.start

    def region(Y: frozenset[int]) -> set[int]:
        _, far = cut_components(G, Y, x0)
        return far

    blocks: list[frozenset[int]] = []
    first = chain_list[0]
    if first.n == 0:
        return [frozenset(G.vertices())]
    nears = [set(G.vertices()) - region(Y) - set(Y) for Y in first.Y]
    p0 = set.intersection(*nears) | set().union(*first.Y)
    blocks.append(frozenset(p0))

    for level, cur in enumerate(chain_list):
        nxt = chain_list[level + 1] if level + 1 < len(chain_list) else None
        for idx in range(cur.n):
            reg = region(cur.Y[idx])
            if not reg:
                continue
            children = []
            if nxt is not None:
                children = [j for j in range(nxt.n) if nxt.chains[j][1:] == cur.chains[idx]]
            if children:
                piece = set(reg)
                for j in children:
                    piece &= reg - region(nxt.Y[j]) - set(nxt.Y[j])
                piece |= set().union(*(set(nxt.Y[j]) for j in children))
            else:
                piece = set(reg)
            for comp in G.induced(piece).components():
                blocks.append(frozenset(comp))
    return blocks


def partition_width_bound(s: Sapling) -> int:
    """Width bound from the proof: copy-region diameter plus one slot per
    nested Y, and the diameter of the base block."""
    g = s.S.graph
    x0 = s.S.start
    if s.n == 0:
        return int(g.diameter())
    nears = []
    fars_y = []
    for Y in s.Y:
        near, far = cut_components(g, Y, x0)
        nears.append(near)
        fars_y.append(far)
    p0 = set.intersection(*nears) | set().union(*s.Y)
    bound = int(g.induced(p0).diameter())
    for i, X in enumerate(s.X):
        _, far = cut_components(g, X, x0)
        width = int(g.induced(far).diameter())
        for j, Y in enumerate(s.Y):
            if Y <= far:
                width += int(g.induced(Y).diameter()) + 1
        bound = max(bound, width)
    return bound


def save_sapling(s: Sapling) -> str:
    """JSON document: the graph plus the system data."""
    from .graphs import export_json

    g = s.S.graph
    doc = json.loads(export_json(g, marks={"path": sorted(s.S.marked)}))
    doc["Y"] = [sorted(y) for y in s.Y]
    doc["X"] = [sorted(x) for x in s.X]
    pairs = []
    for phi in s.phi:
        pairs.extend({"from": u, "to": v} for u, v in sorted(phi.items()))
    doc["phi"] = pairs
    doc["k"] = s.k
    doc["K"] = s.K
    doc["roots"] = {"start": s.S.start, "end": s.S.end}
    return json.dumps(doc, indent=2)


def load_sapling(text: str, P: Presentation | None = None) -> Sapling:
    """Rebuild a sapling from its JSON document.

    phi pairs are regrouped by ball membership; presentations are not part
    of the document, so P defaults to None (enough for the PDA compiler).
    """
    from .graphs import import_json

    try:
        doc = json.loads(text)
        g = import_json(text)
        K = int(doc["K"])
        Ys = [frozenset(int(v) for v in y) for y in doc["Y"]]
        Xs = [frozenset(int(v) for v in x) for x in doc["X"]]
        pairs = [(int(p["from"]), int(p["to"])) for p in doc["phi"]]
        phis = []
        for X, Y in zip(Xs, Ys):
            x_ball = g.ball(X, K)
            y_ball = g.ball(Y, K)
            phi = {}
            for u, v in pairs:
                if u in x_ball and v in y_ball:
                    if u in phi and phi[u] != v:
                        raise ValueError("ambiguous phi encoding")
                    phi[u] = v
            if set(phi) != x_ball:
                raise ValueError("phi does not cover an X ball")
            phis.append(phi)
        marked = frozenset(int(v) for v in doc.get("marks", {}).get("path", []))
        roots = doc["roots"]
        auto = ApproxAutomaton(
            auto=BirootedAutomaton(graph=g, start=int(roots["start"]), end=int(roots["end"])),
            presentation=P,
            stage=0,
            source_word=(),
            marked=marked,
        )
        return Sapling(
            S=auto,
            Y=tuple(Ys),
            X=tuple(Xs),
            phi=tuple(phis),
            K=K,
            k=int(doc["k"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError("bad sapling document") from exc
