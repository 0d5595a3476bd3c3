import random
from fractions import Fraction

import pytest

from invmonoid import (
    InvWordGraph,
    Letter,
    cone,
    disc_type,
    disc_type_equiv,
    dump_partition,
    four_point_gaps,
    gromov_delta,
    load_partition,
    polygon_hyperbolic_check,
    quotient_graph,
    strong_tree_check,
    tree_of_hyperbolic_verify,
)

A = Letter("a", 1)
B = Letter("b", 1)


def path_graph(n):
    g = InvWordGraph()
    g.add_vertex(0)
    for i in range(1, n):
        g.add_vertex(i)
        g.add_edge(i - 1, A, i)
    return g


def cycle_graph(n, offset=0):
    g = InvWordGraph()
    for i in range(n):
        g.add_vertex(offset + i)
    for i in range(n):
        g.add_edge(offset + i, A, offset + (i + 1) % n)
    return g


def random_tree(rng, n):
    g = InvWordGraph()
    g.add_vertex(0)
    for v in range(1, n):
        g.add_vertex(v)
        g.add_edge(rng.randrange(v), rng.choice((A, B)), v)
    return g


def grid_graph(n):
    g = InvWordGraph()
    for i in range(n):
        for j in range(n):
            g.add_vertex(i * n + j)
    for i in range(n):
        for j in range(n):
            if j + 1 < n:
                g.add_edge(i * n + j, A, i * n + j + 1)
            if i + 1 < n:
                g.add_edge(i * n + j, B, (i + 1) * n + j)
    return g


def glue(g1, g2, u, v):
    out = InvWordGraph()
    for g in (g1, g2):
        for x in g.vertices():
            out.add_vertex(x)
        for a, lab, b in g.edge_pairs():
            out.add_edge(a, lab, b)
    out.add_edge(u, B, v)
    return out


def test_gromov_delta_paths_and_trees():
    assert gromov_delta(path_graph(8)) == 0
    rng = random.Random(2)
    for _ in range(5):
        assert gromov_delta(random_tree(rng, rng.randrange(4, 30))) == 0


def test_gromov_delta_cycles():
    assert gromov_delta(cycle_graph(4)) == 1
    assert gromov_delta(cycle_graph(8)) == 2
    assert gromov_delta(cycle_graph(9)) == Fraction(3, 2)


def test_gromov_delta_small_graphs_zero():
    assert gromov_delta(path_graph(3)) == 0
    assert gromov_delta(path_graph(1)) == 0


def test_gromov_delta_disconnected_raises():
    g = path_graph(3)
    g.add_vertex(99)
    with pytest.raises(ValueError):
        gromov_delta(g)


def test_gromov_delta_approx_lower_bound():
    for g in (cycle_graph(8), cycle_graph(9), grid_graph(4)):
        assert gromov_delta(g, exact=False) <= gromov_delta(g)


def test_chord_changes_delta_by_at_most_one():
    for n in (6, 8, 9, 10):
        g = cycle_graph(n)
        before = gromov_delta(g)
        g.add_edge(0, B, n // 2)
        after = gromov_delta(g)
        assert after <= before + 1


def test_four_point_gaps_max_is_delta():
    for g in (cycle_graph(9), grid_graph(3), path_graph(6)):
        gaps = four_point_gaps(g)
        assert max(gaps) == float(gromov_delta(g))
        assert min(gaps) >= 0


def test_cone_on_ray():
    g = path_graph(7)
    c = cone(g, 0, 3)
    assert sorted(c.vertices()) == [3, 4, 5, 6]


def test_cone_on_cycle_is_antipode():
    g = cycle_graph(6)
    c = cone(g, 0, 3)
    assert sorted(c.vertices()) == [3]


def test_polygon_check_trees():
    rng = random.Random(7)
    for _ in range(5):
        g = random_tree(rng, rng.randrange(2, 20))
        for x0 in list(g.vertices())[:4]:
            assert polygon_hyperbolic_check(g, x0, 0)


def test_polygon_check_cycle_small_delta_fails():
    g = cycle_graph(9)
    assert not polygon_hyperbolic_check(g, 0, 1)
    # delta at the diameter swallows every cone, so the check holds vacuously
    assert polygon_hyperbolic_check(g, 0, 4)


def test_polygon_check_delta_three_on_nine_cycle_is_vacuous():
    # Every ball of radius 3 leaves a single cone vertex, already inside it.
    g = cycle_graph(9)
    assert polygon_hyperbolic_check(g, 0, 3)


def _min_polygon_delta(g, x0):
    d = 0
    while not polygon_hyperbolic_check(g, x0, d):
        d += 1
    return d


def test_tree_like_needs_smaller_delta_than_grid():
    assert _min_polygon_delta(path_graph(9), 0) == 0
    assert _min_polygon_delta(grid_graph(4), 0) >= 2


def test_quotient_graph_and_strong_tree_check():
    g = path_graph(9)
    blocks = [frozenset({0, 1, 2}), frozenset({3, 4, 5}), frozenset({6, 7, 8})]
    q = quotient_graph(g, blocks)
    assert q == {0: {1}, 1: {0, 2}, 2: {1}}
    assert strong_tree_check(g, blocks, 2)
    assert not strong_tree_check(g, blocks, 1)


def test_strong_tree_check_rejects_cycle_quotient():
    g = cycle_graph(9)
    blocks = [frozenset({0, 1, 2}), frozenset({3, 4, 5}), frozenset({6, 7, 8})]
    assert not strong_tree_check(g, blocks, 4)


def test_strong_tree_check_rejects_disconnected_block():
    g = path_graph(5)
    blocks = [frozenset({0, 4}), frozenset({1, 2, 3})]
    assert not strong_tree_check(g, blocks, 5)


def test_partition_must_cover():
    g = path_graph(4)
    with pytest.raises(ValueError):
        strong_tree_check(g, [frozenset({0, 1})], 3)
    with pytest.raises(ValueError):
        strong_tree_check(g, [frozenset({0, 1, 2, 3}), frozenset({3})], 3)


def test_disc_types_on_ray():
    g = path_graph(12)
    t3 = disc_type(g, 0, 3, 2)
    t5 = disc_type(g, 0, 5, 2)
    t11 = disc_type(g, 0, 11, 2)
    assert disc_type_equiv(t3, t5)
    assert disc_type_equiv(t3, t3)
    assert not disc_type_equiv(t3, t11)


def test_disc_types_see_branching():
    g = path_graph(8)
    g.add_vertex(100)
    g.add_edge(4, B, 100)
    plain = disc_type(g, 0, 2, 1)
    branched = disc_type(g, 0, 4, 1)
    assert not disc_type_equiv(plain, branched)


def test_disc_type_center_is_the_vertex():
    g = cycle_graph(6)
    t2 = disc_type(g, 0, 2, 1)
    t4 = disc_type(g, 0, 4, 1)
    assert t2.center == 2
    assert t2.ball.center == frozenset({2})
    # all a-edges run clockwise, so the two sides of the cycle differ:
    # the map 2 -> 4 must send the a-successor 3 (theta +1) to 5 (theta -1)
    assert not disc_type_equiv(t2, t4)


def test_tree_of_hyperbolic_two_triangles():
    g = glue(cycle_graph(3), cycle_graph(3, offset=10), 0, 10)
    blocks = [frozenset({0, 1, 2}), frozenset({10, 11, 12})]
    rep = tree_of_hyperbolic_verify(g, blocks, 1)
    assert rep.transition_edges_ok
    assert rep.quotient_is_tree
    assert rep.blocks_hyperbolic
    assert rep.applicable
    assert rep.whole_hyperbolic
    assert not rep.counterexample


def test_tree_of_hyperbolic_double_edge_not_applicable():
    g = glue(cycle_graph(3), cycle_graph(3, offset=10), 0, 10)
    g.add_edge(1, B, 11)
    blocks = [frozenset({0, 1, 2}), frozenset({10, 11, 12})]
    rep = tree_of_hyperbolic_verify(g, blocks, 1)
    assert not rep.transition_edges_ok
    assert not rep.applicable


def test_tree_of_hyperbolic_single_block():
    g = cycle_graph(8)
    rep = tree_of_hyperbolic_verify(g, [frozenset(g.vertices())], 2)
    assert rep.applicable and rep.whole_hyperbolic
    rep2 = tree_of_hyperbolic_verify(g, [frozenset(g.vertices())], 1)
    assert not rep2.blocks_hyperbolic and not rep2.applicable


def test_tree_of_blocks_never_counterexamples():
    rng = random.Random(13)
    for _ in range(20):
        blocks = []
        graphs = []
        base = 0
        for b in range(rng.randrange(2, 5)):
            n = rng.randrange(3, 9)
            graphs.append(
                cycle_graph(n, offset=base) if rng.random() < 0.5 else None
            )
            if graphs[-1] is None:
                t = random_tree(rng, n)
                shifted = InvWordGraph()
                for v in t.vertices():
                    shifted.add_vertex(base + v)
                for u, lab, v in t.edge_pairs():
                    shifted.add_edge(base + u, lab, base + v)
                graphs[-1] = shifted
            blocks.append(frozenset(range(base, base + n)))
            base += n
        whole = InvWordGraph()
        for h in graphs:
            for v in h.vertices():
                whole.add_vertex(v)
            for u, lab, v in h.edge_pairs():
                whole.add_edge(u, lab, v)
        for b in range(1, len(blocks)):
            src = rng.choice(sorted(blocks[rng.randrange(b)]))
            dst = rng.choice(sorted(blocks[b]))
            whole.add_edge(src, B, dst)
        delta = max(gromov_delta(whole.induced(bl)) for bl in blocks)
        rep = tree_of_hyperbolic_verify(whole, blocks, delta)
        assert rep.applicable
        assert not rep.counterexample


def test_partition_json_round_trip():
    blocks = [frozenset({0, 1}), frozenset({2})]
    text = dump_partition(blocks)
    assert load_partition(text) == blocks
    with pytest.raises(ValueError):
        load_partition("{}")
    with pytest.raises(ValueError):
        load_partition("[1,2]")
