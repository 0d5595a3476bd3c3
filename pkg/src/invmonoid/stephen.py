"""Iterative approximation of the automaton of a word.

munn_tree builds the stage 0 automaton; each exp_step adjoins every
missing relation path found in the current graph and refolds.  The
accepted language only grows along the stage sequence, so membership at
any stage certifies membership in the limit, while absence says nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import BirootedAutomaton, InvWordGraph, fold_with_map, rooted_iso
from .words import InvWord, Letter, Presentation, invert_word


@dataclass
class ApproxAutomaton:
    """Stage n of the approximation of the automaton of source_word.

    marked tracks the image of the stage 0 vertex set through all the
    folds; the sapling machinery keeps its seed sets away from it.
    """

    auto: BirootedAutomaton
    presentation: Presentation
    stage: int
    source_word: InvWord
    marked: frozenset[int]

    @property
    def graph(self) -> InvWordGraph:
        return self.auto.graph

    @property
    def start(self) -> int:
        return self.auto.start

    @property
    def end(self) -> int:
        return self.auto.end


def munn_tree(w: InvWord) -> BirootedAutomaton:
    """The tree of free group prefixes of w, birooted at 1 and at w.

    Walking w and reusing existing edges lands every prefix on its
    reduced form, so no folding is needed afterwards.
    """
    g = InvWordGraph()
    start = g.add_vertex(0)
    cur = start
    for x in w:
        t = g.target(cur, x)
        if t is None:
            t = g.fresh_vertex()
            g.add_edge(cur, x, t)
        cur = t
    return BirootedAutomaton(g, start, cur)


def fim_equal(u: InvWord, w: InvWord) -> bool:
    """Equality in the free inverse monoid: birooted tree isomorphism."""
    return rooted_iso(munn_tree(u), munn_tree(w))


def _expansion_instances(g: InvWordGraph, P: Presentation):
    """All relation paths readable in g with no parallel partner path.

    Returns (adjoins, merges): adjoins are (u, word, v) triples asking
    for a fresh word path from u to v, merges are vertex pairs forced by
    relation sides that are empty words.  Instances are collected before
    anything is applied, so newly added paths never trigger expansions
    within the same step.
    """
    adjoins: list[tuple[int, InvWord, int]] = []
    merges: list[tuple[int, int]] = []
    for lhs, rhs in P.relations:
        for s, t in ((lhs, rhs), (rhs, lhs)):
            for u in g.vertices():
                v = g.read(u, s)
                if v is None:
                    continue
                if g.read(u, t) == v:
                    continue
                if t:
                    adjoins.append((u, t, v))
                else:
                    merges.append((u, v))
    return adjoins, merges


def _adjoin_path(g: InvWordGraph, u: int, word: InvWord, v: int) -> None:
    cur = u
    for x in word[:-1]:
        nxt = g.fresh_vertex()
        g.add_edge(cur, x, nxt)
        cur = nxt
    g.add_edge(cur, word[-1], v)


def _identify(g: InvWordGraph, pairs) -> InvWordGraph:
    # plain quotient, no folding: used only by the standalone expansion
    parent = {v: v for v in g.vertices()}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    h = InvWordGraph()
    for v in g.vertices():
        h.add_vertex(find(v))
    for u, x, v in g.edge_pairs():
        h.add_edge(find(u), x, find(v))
    return h


def full_p_expansion(g: InvWordGraph, P: Presentation) -> InvWordGraph:
    """Adjoin every missing relation path of g at once.

    The result is generally nondeterministic; exp_step folds it.  Empty
    relation sides turn into direct vertex identifications.
    """
    adjoins, merges = _expansion_instances(g, P)
    h = g.copy()
    for u, t, v in adjoins:
        _adjoin_path(h, u, t, v)
    if merges:
        h = _identify(h, merges)
    return h


def exp_step(a: ApproxAutomaton) -> ApproxAutomaton:
    """One expansion stage: full expansion followed by folding."""
    g = a.graph
    adjoins, merges = _expansion_instances(g, a.presentation)
    h = g.copy()
    for u, t, v in adjoins:
        _adjoin_path(h, u, t, v)
    folded, m = fold_with_map(h, merges)
    auto = BirootedAutomaton(folded, m[a.start], m[a.end])
    marked = frozenset(m[v] for v in a.marked)
    return ApproxAutomaton(auto, a.presentation, a.stage + 1, a.source_word, marked)


_expand_cache: dict[tuple[Presentation, InvWord], list[ApproxAutomaton]] = {}


def expand(w: InvWord, P: Presentation, n: int) -> ApproxAutomaton:
    """Stage n of the approximation of the automaton of w.

    Stages are cached per (presentation, word), so successive calls with
    growing n pay for new stages only.
    """
    if n < 0:
        raise ValueError("stage must be nonnegative")
    w = tuple(w)
    stages = _expand_cache.setdefault((P, w), [])
    if not stages:
        auto = munn_tree(w)
        marked = frozenset(auto.graph.vertices())
        stages.append(ApproxAutomaton(auto, P, 0, w, marked))
    while len(stages) <= n:
        stages.append(exp_step(stages[-1]))
    return stages[n]


def is_p_complete(g: InvWordGraph, P: Presentation) -> bool:
    """No expansion applies anywhere: the approximation is exact."""
    adjoins, merges = _expansion_instances(g, P)
    return not adjoins and not merges


def is_relatively_p_complete(sub, g: InvWordGraph, P: Presentation) -> bool:
    """Every relation path lying inside sub closes up somewhere in g.

    sub is a vertex set; the relation path itself must run inside the
    induced subgraph, the partner path may use all of g.
    """
    subg = g.induced(sub)
    for lhs, rhs in P.relations:
        for s, t in ((lhs, rhs), (rhs, lhs)):
            for u in subg.vertices():
                v = subg.read(u, s)
                if v is None:
                    continue
                if g.read(u, t) != v:
                    return False
    return True


def approx_accepts(w_target: InvWord, u: InvWord, P: Presentation, n: int) -> str:
    """"yes" certifies u in the language of the automaton of w_target."""
    a = expand(tuple(w_target), P, n)
    return "yes" if a.graph.read(a.start, u) == a.end else "unknown"


def decide_semi(u: InvWord, v: InvWord, P: Presentation, budget: int) -> str:
    """Grow both approximations up to the budget, report equal or give up.

    Equality needs mutual membership; each direction is monotone in the
    stage, so a direction is settled the first time it answers yes.
    """
    u_in = v_in = False
    for n in range(budget + 1):
        u_in = u_in or approx_accepts(v, u, P, n) == "yes"
        v_in = v_in or approx_accepts(u, v, P, n) == "yes"
        if u_in and v_in:
            return "equal"
    return "exhausted"


def build_e_presentation(alphabet, group_relators, subgroup_words) -> Presentation:
    """Presentation of the idempotent-marker monoid of a subgroup choice.

    e is the product of all uu' over the generators, the conjugated
    subgroup words t w t', and the inverse generators, in that order; the
    first group relator is appended to e, the rest stand alone.
    """
    if isinstance(alphabet, (set, frozenset)):
        bases = sorted(alphabet)
    else:
        bases = list(dict.fromkeys(alphabet))
    if "t" in bases:
        raise ValueError("the marker letter t must not be a group generator")
    for w in list(group_relators) + list(subgroup_words):
        for x in w:
            if x.base == "t":
                raise ValueError("input words must not mention t")
    t = Letter("t", 1)
    factors: list[InvWord] = [(Letter(a, 1),) for a in bases]
    factors += [(t,) + tuple(w) + (t.inv(),) for w in subgroup_words]
    factors += [(Letter(a, -1),) for a in bases]
    e: InvWord = ()
    for f in factors:
        e = e + f + invert_word(f)
    relators = [tuple(r) for r in group_relators]
    if relators:
        relations = [(e + relators[0], ())] + [(r, ()) for r in relators[1:]]
    else:
        relations = [(e, ())]
    return Presentation(frozenset(bases) | {"t"}, tuple(relations))
