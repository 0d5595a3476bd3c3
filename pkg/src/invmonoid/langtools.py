"""Language-level outputs: geodesic automata, the sapling PDA, membership.

The geodesic automaton quotients a finite graph's geodesic digraph by disc
type.  The PDA compiles a sapling so that its stack records which nested
copy a run is visiting; membership goes through the standard
state-pair/stack-symbol grammar and a CYK parse.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .geometry import disc_type, disc_type_equiv
from .graphs import _parse_label, cut_components
from .sapling import Exhausted, FiniteGraph, Sapling, find_sapling
from .stephen import ApproxAutomaton, decide_semi, is_p_complete
from .words import InvWord, Letter, Presentation


@dataclass
class Fsa:
    """Finite automaton over word-graph labels; possibly nondeterministic."""

    states: frozenset[int]
    initial: int
    terminals: frozenset[int]
    transitions: dict[tuple[int, Letter], frozenset[int]]
    deterministic: bool = False

    def labels(self) -> list[Letter]:
        return sorted({letter for _, letter in self.transitions}, key=str)

    def step(self, state: int, letter: Letter) -> frozenset[int]:
        return self.transitions.get((state, letter), frozenset())


def fsa_language_upto(f: Fsa, L: int) -> set[InvWord]:
    """All accepted words of length at most L."""
    out: set[InvWord] = set()
    labels = f.labels()

    def walk(word: tuple[Letter, ...], states: frozenset[int]) -> None:
        if states & f.terminals:
            out.add(word)
        if len(word) == L:
            return
        for letter in labels:
            nxt = frozenset().union(*(f.step(s, letter) for s in states))
            if nxt:
                walk(word + (letter,), nxt)

    walk((), frozenset({f.initial}))
    return out


def determinize(f: Fsa) -> Fsa:
    labels = f.labels()
    start = frozenset({f.initial})
    index = {start: 0}
    order = [start]
    transitions: dict[tuple[int, Letter], frozenset[int]] = {}
    pos = 0
    while pos < len(order):
        current = order[pos]
        for letter in labels:
            nxt = frozenset().union(*(f.step(s, letter) for s in current))
            if not nxt:
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            transitions[(index[current], letter)] = frozenset({index[nxt]})
        pos += 1
    terminals = frozenset(i for s, i in index.items() if s & f.terminals)
    return Fsa(
        states=frozenset(range(len(order))),
        initial=0,
        terminals=terminals,
        transitions=transitions,
        deterministic=True,
    )


def _trim_fsa(f: Fsa) -> Fsa:
    """Drop states that are unreachable or cannot reach a terminal."""
    forward = {f.initial}
    queue = [f.initial]
    while queue:
        s = queue.pop()
        for (src, _), tgts in f.transitions.items():
            if src != s:
                continue
            for t in tgts:
                if t not in forward:
                    forward.add(t)
                    queue.append(t)
    backward = set(f.terminals)
    changed = True
    while changed:
        changed = False
        for (src, _), tgts in f.transitions.items():
            if src not in backward and tgts & backward:
                backward.add(src)
                changed = True
    keep = (forward & backward) | {f.initial}
    transitions = {
        key: tgts & frozenset(keep)
        for key, tgts in f.transitions.items()
        if key[0] in keep and tgts & keep
    }
    return Fsa(
        states=frozenset(keep),
        initial=f.initial,
        terminals=f.terminals & frozenset(keep),
        transitions=transitions,
        deterministic=f.deterministic,
    )


def minimize(f: Fsa) -> Fsa:
    """Moore refinement on a deterministic automaton (sink implicit)."""
    if not f.deterministic:
        f = determinize(f)
    f = _trim_fsa(f)
    labels = f.labels()
    states = sorted(f.states)
    block: dict[int, int] = {s: int(s in f.terminals) for s in states}
    while True:
        sig = {}
        for s in states:
            row = tuple(
                block.get(next(iter(f.step(s, letter)), None), None) if f.step(s, letter) else None
                for letter in labels
            )
            sig[s] = (block[s], row)
        classes = sorted(set(sig.values()), key=str)
        renum = {s: classes.index(sig[s]) for s in states}
        stable = len(set(renum.values())) == len(set(block.values()))
        block = renum
        if stable:
            break
    reps: dict[int, int] = {}
    for s in states:
        reps.setdefault(block[s], s)
    transitions = {}
    for cls, rep in reps.items():
        for letter in labels:
            nxt = f.step(rep, letter)
            if nxt:
                transitions[(cls, letter)] = frozenset({block[next(iter(nxt))]})
    return Fsa(
        states=frozenset(reps),
        initial=block[f.initial],
        terminals=frozenset(block[s] for s in f.terminals),
        transitions=transitions,
        deterministic=True,
    )


def _canonical_table(f: Fsa, labels: list[Letter]):
    """BFS-canonical transition table for isomorphism comparison."""
    index = {f.initial: 0}
    order = [f.initial]
    pos = 0
    rows = []
    while pos < len(order):
        s = order[pos]
        row = []
        for letter in labels:
            nxt = f.step(s, letter)
            if not nxt:
                row.append(None)
                continue
            t = next(iter(nxt))
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        rows.append((tuple(row), s in f.terminals))
        pos += 1
    return tuple(rows)


def fsa_equal(f1: Fsa, f2: Fsa) -> bool:
    d1 = minimize(determinize(f1))
    d2 = minimize(determinize(f2))
    labels = sorted({letter for _, letter in list(d1.transitions) + list(d2.transitions)}, key=str)
    return _canonical_table(d1, labels) == _canonical_table(d2, labels)


def export_fsa(f: Fsa) -> str:
    trans = [
        {"from": s, "input": str(letter), "to": t}
        for (s, letter), targets in sorted(f.transitions.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))
        for t in sorted(targets)
    ]
    doc = {
        "states": sorted(f.states),
        "initial": f.initial,
        "final": sorted(f.terminals),
        "transitions": trans,
    }
    return json.dumps(doc, indent=2)


def import_fsa(text: str) -> Fsa:
    try:
        doc = json.loads(text)
        transitions: dict[tuple[int, Letter], frozenset[int]] = {}
        for t in doc["transitions"]:
            key = (int(t["from"]), _parse_label(t["input"]))
            transitions[key] = transitions.get(key, frozenset()) | {int(t["to"])}
        det = all(len(v) == 1 for v in transitions.values())
        return Fsa(
            states=frozenset(int(s) for s in doc["states"]),
            initial=int(doc["initial"]),
            terminals=frozenset(int(s) for s in doc["final"]),
            transitions=transitions,
            deterministic=det,
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError("bad automaton document") from exc


def geodesic_automaton(g, x0: int, delta: int, K: int) -> Fsa:
    """Quotient of the geodesic digraph by disc-type equivalence.

    Vertices within delta of the base point stay singletons; others are
    grouped when their radius-(delta+K) balls match with exact level
    offsets.  For a materialized approximation of an infinite graph the
    fringe (where balls would be clipped) is excluded, and every class
    transition must be witnessed by an interior member; a complete graph
    is quotiented whole.  All states are terminal.
    """
    if isinstance(g, ApproxAutomaton):
        graph = g.graph
        complete = g.presentation is not None and is_p_complete(graph, g.presentation)
    else:
        graph = g
        complete = True
    dist = graph.distances_from([x0])
    if len(dist) != len(graph):
        raise ValueError("graph is not connected")
    radius = delta + K
    horizon = max(dist.values())
    if complete:
        classed = sorted(graph.vertices())
    else:
        classed = sorted(v for v in graph.vertices() if dist[v] + radius <= horizon)
        if x0 not in set(classed):
            raise ValueError("materialization too shallow for the requested radius")

    types: dict[int, int] = {}
    reps: dict[tuple, list[tuple[int, object]]] = {}
    next_type = 0
    for v in classed:
        if dist[v] <= delta:
            types[v] = next_type
            next_type += 1
            continue
        t = disc_type(graph, x0, v, radius)
        fingerprint = (
            len(t.ball.graph),
            tuple(sorted(
                (t.theta[y], tuple(sorted(str(l) for l in t.ball.graph.out_labels(y))))
                for y in t.theta
            )),
        )
        bucket = reps.setdefault(fingerprint, [])
        for type_id, rep in bucket:
            if disc_type_equiv(rep, t):
                types[v] = type_id
                break
        else:
            types[v] = next_type
            bucket.append((next_type, t))
            next_type += 1

    classed_set = set(classed)
    out_labels: dict[int, set[Letter]] = {}
    targets: dict[tuple[int, Letter], set[int]] = {}
    for v in classed:
        cls = types[v]
        mine = set()
        for letter in graph.out_labels(v):
            for w in graph.targets(v, letter):
                if dist[w] != dist[v] + 1:
                    continue
                mine.add(letter)
                if w in classed_set:
                    targets.setdefault((cls, letter), set()).add(types[w])
        if cls in out_labels and out_labels[cls] != mine:
            raise ValueError(
                "equivalent vertices disagree on geodesic successors; materialization too shallow"
            )
        out_labels.setdefault(cls, mine)

    transitions: dict[tuple[int, Letter], frozenset[int]] = {}
    for cls, labels in out_labels.items():
        for letter in labels:
            seen = targets.get((cls, letter), set())
            if not seen:
                raise ValueError(
                    "class transition has no interior witness; materialization too shallow"
                )
            if len(seen) > 1:
                raise ValueError(
                    "equivalent vertices disagree on a successor class; materialization too shallow"
                )
            transitions[(cls, letter)] = frozenset(seen)

    all_types = frozenset(types.values())
    return Fsa(
        states=all_types,
        initial=types[x0],
        terminals=all_types,
        transitions=transitions,
        deterministic=True,
    )


class PdaTransition(NamedTuple):
    src: int
    input: Letter | None
    pop: str
    push: tuple[str, ...]
    dst: int


@dataclass
class Pda:
    """Pushdown automaton with final-state acceptance and bottom marker Z."""

    states: frozenset[int]
    stack: tuple[str, ...]
    initial: int
    final: int
    transitions: tuple[PdaTransition, ...]
    initial_stack: str = "Z"
    _cnf: tuple | None = field(default=None, repr=False, compare=False)


def build_pda(s: Sapling) -> Pda:
    """Compile a sapling: stack letters name the copy a run currently visits.

    States are the base graph plus one copy of each beyond-X region plus a
    final state; push moves enter a copy through a phi-matched overlap
    vertex, pops leave it.  Stack symbols below the top record the nesting.
    """
    g = s.S.graph
    x0 = s.S.start
    end = s.S.end
    K = s.K
    n = s.n
    sym = [str(i + 1) for i in range(n)]
    every = sym + ["Z"]

    next_id = max(g.vertices(), default=0) + 1
    fars: list[set[int]] = []
    psis: list[dict[int, int]] = []
    for X in s.X:
        _, far = cut_components(g, X, x0)
        fars.append(far)
        psi = {}
        for v in sorted(far):
            psi[v] = next_id
            next_id += 1
        psis.append(psi)
    final = next_id

    overlaps = [g.ball(s.X[i], K) & fars[i] for i in range(n)]

    trans: list[PdaTransition] = []
    trans.append(PdaTransition(end, None, "Z", ("Z",), final))
    for u, letter, v in g.edges():
        for k in every:
            trans.append(PdaTransition(u, letter, k, (k,), v))
    for i in range(n):
        inner = g.induced(fars[i])
        for u, letter, v in inner.edges():
            for k in every:
                trans.append(PdaTransition(psis[i][u], letter, k, (k,), psis[i][v]))
        for u in sorted(overlaps[i]):
            for k in every:
                trans.append(PdaTransition(s.phi[i][u], None, k, (sym[i], k), psis[i][u]))
            trans.append(PdaTransition(psis[i][u], None, sym[i], (), s.phi[i][u]))
    for i in range(n):
        for j in range(n):
            if not (s.Y[j] <= fars[i]):
                continue
            for u in sorted(overlaps[j]):
                anchor = s.phi[j][u]
                if anchor not in fars[i]:
                    raise ValueError("overlap image escapes the enclosing region")
                src = psis[i][anchor]
                for k in every:
                    trans.append(PdaTransition(src, None, k, (sym[j], k), psis[j][u]))
                trans.append(PdaTransition(psis[j][u], None, sym[j], (), src))

    states = set(g.vertices()) | {final}
    for psi in psis:
        states |= set(psi.values())
    return Pda(
        states=frozenset(states),
        stack=tuple(every),
        initial=x0,
        final=final,
        transitions=tuple(trans),
    )


def export_pda(p: Pda) -> str:
    trans = [
        {
            "from": t.src,
            "input": None if t.input is None else str(t.input),
            "pop": t.pop,
            "push": list(t.push),
            "to": t.dst,
        }
        for t in p.transitions
    ]
    doc = {
        "states": sorted(p.states),
        "stack": list(p.stack),
        "initial": p.initial,
        "final": p.final,
        "transitions": trans,
    }
    return json.dumps(doc, indent=2)


def import_pda(text: str) -> Pda:
    try:
        doc = json.loads(text)
        trans = tuple(
            PdaTransition(
                src=int(t["from"]),
                input=None if t["input"] is None else _parse_label(t["input"]),
                pop=str(t["pop"]),
                push=tuple(str(x) for x in t["push"]),
                dst=int(t["to"]),
            )
            for t in doc["transitions"]
        )
        return Pda(
            states=frozenset(int(s) for s in doc["states"]),
            stack=tuple(str(x) for x in doc["stack"]),
            initial=int(doc["initial"]),
            final=int(doc["final"]),
            transitions=trans,
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError("bad automaton document") from exc


def _pda_grammar(p: Pda):
    """Triple-construction grammar deciding final-state acceptance.

    Nonterminal (q, A, r) derives the inputs consumed by runs from q to r
    that net-pop A.  A drain state absorbs Z below the final state, so the
    start symbol is (initial, Z, drain).
    """
    drain = max(p.states) + 1
    everyone = sorted(p.states) + [drain]
    nt_index: dict[tuple[int, str, int], int] = {}

    def nt(q: int, a: str, r: int) -> int:
        key = (q, a, r)
        if key not in nt_index:
            nt_index[key] = len(nt_index)
        return nt_index[key]

    rules: list[tuple[int, tuple]] = []
    moves = list(p.transitions) + [PdaTransition(p.final, None, "Z", (), drain)]
    for t in moves:
        prefix = () if t.input is None else (("t", t.input),)
        if len(t.push) == 0:
            rules.append((nt(t.src, t.pop, t.dst), prefix))
        elif len(t.push) == 1:
            for r in everyone:
                body = prefix + (("n", nt(t.dst, t.push[0], r)),)
                rules.append((nt(t.src, t.pop, r), body))
        elif len(t.push) == 2:
            for r1 in everyone:
                for r2 in everyone:
                    body = prefix + (
                        ("n", nt(t.dst, t.push[0], r1)),
                        ("n", nt(r1, t.push[1], r2)),
                    )
                    rules.append((nt(t.src, t.pop, r2), body))
        else:
            raise ValueError("transition pushes more than two symbols")
    start = nt(p.initial, "Z", drain)
    return rules, start


def _trim_rules(rules, start):
    productive: set[int] = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head in productive:
                continue
            if all(kind == "t" or val in productive for kind, val in body):
                productive.add(head)
                changed = True
    rules = [
        (h, b)
        for h, b in rules
        if h in productive and all(kind == "t" or val in productive for kind, val in b)
    ]
    by_head: dict[int, list[tuple]] = {}
    for h, b in rules:
        by_head.setdefault(h, []).append(b)
    reachable = {start}
    queue = [start]
    while queue:
        h = queue.pop()
        for body in by_head.get(h, []):
            for kind, val in body:
                if kind == "n" and val not in reachable:
                    reachable.add(val)
                    queue.append(val)
    return [(h, b) for h, b in rules if h in reachable], start


def _cnf_tables(rules, start):
    """Nullable elimination, unit elimination, then CNF tables for CYK."""
    nullable: set[int] = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head in nullable:
                continue
            if all(kind == "n" and val in nullable for kind, val in body):
                nullable.add(head)
                changed = True
    accepts_empty = start in nullable

    expanded: set[tuple[int, tuple]] = set()
    for head, body in rules:
        optional = [i for i, (kind, val) in enumerate(body) if kind == "n" and val in nullable]
        for mask in range(1 << len(optional)):
            drop = {optional[b] for b in range(len(optional)) if mask >> b & 1}
            new_body = tuple(symbol for i, symbol in enumerate(body) if i not in drop)
            if new_body:
                expanded.add((head, new_body))

    unit: dict[int, set[int]] = {}
    solid: set[tuple[int, tuple]] = set()
    for head, body in expanded:
        if len(body) == 1 and body[0][0] == "n":
            unit.setdefault(head, set()).add(body[0][1])
        else:
            solid.add((head, body))
    closure: dict[int, set[int]] = {}
    heads = {h for h, _ in expanded} | set(unit)
    for h in heads:
        seen = {h}
        queue = [h]
        while queue:
            cur = queue.pop()
            for nxt in unit.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        closure[h] = seen
    lifted: set[tuple[int, tuple]] = set()
    by_head: dict[int, list[tuple]] = {}
    for h, b in solid:
        by_head.setdefault(h, []).append(b)
    for h in heads:
        for mid in closure[h]:
            for b in by_head.get(mid, []):
                lifted.add((h, b))

    next_fresh = [max((h for h, _ in lifted), default=start) + 1]

    def fresh() -> int:
        next_fresh[0] += 1
        return next_fresh[0] - 1

    term_wrap: dict[Letter, int] = {}
    binary: dict[tuple[int, int], set[int]] = {}
    terminal: dict[Letter, set[int]] = {}

    def wrap(letter: Letter) -> int:
        if letter not in term_wrap:
            term_wrap[letter] = fresh()
            terminal.setdefault(letter, set()).add(term_wrap[letter])
        return term_wrap[letter]

    for head, body in lifted:
        if len(body) == 1:
            kind, val = body[0]
            if kind == "t":
                terminal.setdefault(val, set()).add(head)
            continue
        symbols = [wrap(val) if kind == "t" else val for kind, val in body]
        while len(symbols) > 2:
            a = symbols.pop(0)
            b = symbols.pop(0)
            m = fresh()
            binary.setdefault((a, b), set()).add(m)
            symbols.insert(0, m)
        binary.setdefault((symbols[0], symbols[1]), set()).add(head)

    return binary, terminal, accepts_empty, start


def _pda_cnf(p: Pda):
    if p._cnf is None:
        rules, start = _pda_grammar(p)
        rules, start = _trim_rules(rules, start)
        p._cnf = _cnf_tables(rules, start)
    return p._cnf


def pda_accepts(p: Pda, u: InvWord) -> bool:
    """CYK membership for the word u."""
    binary, terminal, accepts_empty, start = _pda_cnf(p)
    n = len(u)
    if n == 0:
        return accepts_empty
    table: dict[tuple[int, int], set[int]] = {}
    for i, letter in enumerate(u):
        table[(i, i + 1)] = set(terminal.get(letter, ()))
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            cell: set[int] = set()
            for mid in range(i + 1, j):
                left = table.get((i, mid), ())
                right = table.get((mid, j), ())
                for a in left:
                    for b in right:
                        cell |= binary.get((a, b), set())
            table[(i, j)] = cell
    return start in table.get((0, n), set())


_search_cache: dict[tuple[Presentation, InvWord], tuple[int, object]] = {}


def _resolve(w: InvWord, P: Presentation, budget: int):
    key = (P, w)
    if key in _search_cache:
        spent, result = _search_cache[key]
        if not isinstance(result, Exhausted) or spent >= budget:
            return result
    result = find_sapling(w, P, budget)
    _search_cache[key] = (budget, result)
    return result


def _accepts(result, u: InvWord) -> bool:
    if isinstance(result, FiniteGraph):
        a = result.auto
        return a.graph.read(a.start, u) == a.end
    pda = getattr(result, "_pda", None)
    if pda is None:
        pda = build_pda(result)
        result._pda = pda
    return pda_accepts(pda, u)


def word_problem(u: InvWord, v: InvWord, P: Presentation, budget: int) -> str:
    """Decide u = v via saplings for both sides; 'exhausted' when the
    search budget runs out first."""
    if decide_semi(u, v, P, min(budget, 4)) == "equal":
        return "equal"
    left = _resolve(u, P, budget)
    right = _resolve(v, P, budget)
    if isinstance(left, Exhausted) or isinstance(right, Exhausted):
        return "exhausted"
    if _accepts(left, v) and _accepts(right, u):
        return "equal"
    return "unequal"
