import itertools

import pytest

from invmonoid import (
    Fsa,
    Letter,
    approx_accepts,
    build_pda,
    determinize,
    expand,
    export_fsa,
    export_pda,
    find_sapling,
    fsa_equal,
    fsa_language_upto,
    geodesic_automaton,
    import_fsa,
    import_pda,
    minimize,
    munn_tree,
    parse_word,
    pda_accepts,
    word_problem,
)

A = Letter("a", 1)
Ai = Letter("a", -1)
B = Letter("b", 1)

w = parse_word


def a_star() -> Fsa:
    return Fsa(
        states=frozenset({0}),
        initial=0,
        terminals=frozenset({0}),
        transitions={(0, A): frozenset({0})},
        deterministic=True,
    )


def test_language_upto():
    assert fsa_language_upto(a_star(), 2) == {(), (A,), (A, A)}


def test_determinize_preserves_language():
    # Nondeterministic: accepts exactly the nonempty words over {a}.
    nfa = Fsa(
        states=frozenset({0, 1}),
        initial=0,
        terminals=frozenset({1}),
        transitions={(0, A): frozenset({0, 1}), (1, A): frozenset({1})},
    )
    dfa = determinize(nfa)
    assert dfa.deterministic
    for L in range(4):
        assert fsa_language_upto(dfa, L) == fsa_language_upto(nfa, L)


def test_minimize_drops_dead_and_duplicate_states():
    # States 1 and 2 are interchangeable, state 3 is a trap.
    f = Fsa(
        states=frozenset({0, 1, 2, 3}),
        initial=0,
        terminals=frozenset({0, 1, 2}),
        transitions={
            (0, A): frozenset({1}),
            (1, A): frozenset({2}),
            (2, A): frozenset({1}),
            (0, B): frozenset({3}),
            (3, B): frozenset({3}),
        },
        deterministic=True,
    )
    m = minimize(f)
    assert len(m.states) == 1
    assert fsa_equal(m, a_star())


def test_fsa_equal_ignores_state_names():
    f = Fsa(
        states=frozenset({7}),
        initial=7,
        terminals=frozenset({7}),
        transitions={(7, A): frozenset({7})},
        deterministic=True,
    )
    assert fsa_equal(f, a_star())
    assert not fsa_equal(f, Fsa(frozenset({0}), 0, frozenset(), {}, True))


def test_fsa_json_round_trip():
    f = determinize(a_star())
    back = import_fsa(export_fsa(f))
    assert fsa_equal(f, back)
    with pytest.raises(ValueError):
        import_fsa("{\"states\": 3}")


def test_geodesics_bicyclic_ray(bicyclic):
    a = expand(w("a a'"), bicyclic, 8)
    f = geodesic_automaton(a, a.start, 0, bicyclic.K)
    assert len(f.states) == 3
    assert fsa_equal(minimize(determinize(f)), a_star())


def test_geodesics_need_depth(bicyclic):
    a = expand(w("a a'"), bicyclic, 2)
    with pytest.raises(ValueError, match="too shallow"):
        geodesic_automaton(a, a.start, 0, bicyclic.K)


def test_geodesics_complete_tree(irrational_tree):
    # Stage 1 is already closed under both relations, so no truncation
    # handling kicks in and the language is read off the whole tree.
    a = expand(w("a a'"), irrational_tree, 1)
    f = geodesic_automaton(a, a.start, 1, irrational_tree.K)
    assert len(f.states) == 8
    got = {"".join(str(x) for x in u) for u in fsa_language_upto(f, 8)}
    assert got == {"", "a", "b", "bb", "bbb", "bbbb", "bbbbc", "bc"}


def test_geodesics_plain_graph_mode():
    # A raw graph is quotiented whole, and every state accepts.
    m = munn_tree(w("a b b'"))
    f = geodesic_automaton(m.graph, m.start, 0, 2)
    assert f.terminals == frozenset(f.states)
    assert fsa_language_upto(f, 3) == {(), (A,), (A, B)}


def test_build_pda_shape(bicyclic):
    s = find_sapling(w("a a'"), bicyclic, 50)
    p = build_pda(s)
    assert len(p.states) == 14
    assert len(p.transitions) == 57
    assert p.stack == ("1", "Z")
    assert p.initial_stack == "Z"


def test_pda_agrees_with_deep_expansion(bicyclic):
    s = find_sapling(w("a a'"), bicyclic, 50)
    p = build_pda(s)
    for n in range(6):
        for word in itertools.product((A, Ai), repeat=n):
            want = approx_accepts(w("a a'"), word, bicyclic, 12) == "yes"
            assert pda_accepts(p, word) == want, word


def test_pda_empty_word(bicyclic):
    # a a' is an idempotent, so the empty word lies above it.
    s = find_sapling(w("a a'"), bicyclic, 50)
    assert pda_accepts(build_pda(s), ())


def test_pda_json_round_trip(bicyclic):
    s = find_sapling(w("a a'"), bicyclic, 50)
    p = build_pda(s)
    back = import_pda(export_pda(p))
    assert export_pda(back) == export_pda(p)
    for word in [(), (A,), (A, Ai), (Ai,), (A, A, Ai)]:
        assert pda_accepts(back, word) == pda_accepts(p, word)
    with pytest.raises(ValueError):
        import_pda("[1, 2]")


def test_word_problem_verdicts(bicyclic):
    assert word_problem(w("a a'"), w("1"), bicyclic, 50) == "equal"
    assert word_problem(w("a' a"), w("1"), bicyclic, 50) == "unequal"
    assert word_problem(w("a a'"), w("1"), bicyclic, 0) == "exhausted"


def test_word_problem_integers(integers):
    assert word_problem(w("a' a"), w("1"), integers, 50) == "equal"
    assert word_problem(w("a a a"), w("a"), integers, 50) == "unequal"
