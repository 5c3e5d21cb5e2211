import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquecol.branchdecomp import DecomposedGraph, Operator, best_bd_small, linear_bd, random_bd
from cliquecol.cwsolver import (
    EMPTY_TYPE,
    all_profiles,
    bubble_buddies,
    coloring_signature,
    compatible,
    ctype_of,
    enumerate_assignments,
    is_pbc,
    leaf_signature,
    lift_profile,
    liftable,
    make_profile,
    merge_ctype,
    merge_profile,
    merge_skeleton,
    profile_of,
    signature_assignments,
    solve_cw,
)
from cliquecol.gadgets import complete, cycle
from cliquecol.graph import Graph, GuardError, brute_force_solve, is_clique_coloring, mask_of, members
from oracles import all_graphs_upto, edge_set, graphs, naive_colorable, outside_classes, seeded_graphs


def node_covering(dg, vertices):
    target = mask_of(vertices)
    return next(t for t in range(dg.bd.num_nodes) if dg.vmask[t] == target)


# -- potentially bad cliques and profiles -----------------------------------


def naive_is_pbc(g: Graph, vt: set, x: set, c: set) -> bool:
    """Straight from the definition, using only edge sets and recomputed classes."""
    edges = edge_set(g)
    if not x or not x <= c or not x <= vt:
        return False
    if any(frozenset(p) not in edges for p in itertools.combinations(x, 2)):
        return False
    span = set().union(*(q for q in outside_classes(g, vt) if q & x))
    return not any(all(frozenset((u, y)) in edges for u in x) for y in span - x)


def test_leaf_profile():
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    leaf = dg.bd.leaf_of(1)
    assert is_pbc(dg, leaf, 0b10, 0b10)
    assert profile_of(dg, leaf, 0b10, 0b10) == make_profile([1], [])
    assert ctype_of(dg, leaf, 0b10) == (make_profile([1], []),)


def test_pbc_requires_subset_of_class():
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    assert not is_pbc(dg, dg.bd.root, 0b01, 0b10)


def test_k2_root_single_vertex_not_pbc():
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    assert not is_pbc(dg, dg.bd.root, 0b01, 0b11)
    with pytest.raises(ValueError):
        profile_of(dg, dg.bd.root, 0b01, 0b11)


def test_root_maximal_clique_profile():
    g = cycle(5)
    dg = DecomposedGraph(g, linear_bd(g, range(5)))
    assert profile_of(dg, dg.bd.root, 0b11, 0b11) == make_profile([0], [])


def test_profile_on_small_graph():
    # a, b form X; c, d are complete to X but sit in other classes
    a, b, c, d = 0, 1, 2, 3
    edges = [(a, b), (a, c), (b, c), (a, d), (b, d), (a, 4), (b, 5), (c, 6), (d, 7)]
    g = Graph.from_edges(8, edges)
    dg = DecomposedGraph(g, linear_bd(g, range(8)))
    t = node_covering(dg, [a, b, c, d])
    assert list(dg.class_masks(t)) == [a, b, c, d]
    x = mask_of([a, b])
    assert is_pbc(dg, t, x, x)
    assert profile_of(dg, t, x, x) == make_profile([a, b], [c, d])
    # X is potentially bad although it is not a maximal clique of G_t
    assert g.is_clique(mask_of([a, b, c]))


@given(graphs(max_n=6), st.randoms(use_true_random=False), st.data())
@settings(max_examples=80, deadline=None)
def test_is_pbc_matches_definition(g, rnd, data):
    dg = DecomposedGraph(g, random_bd(g, rnd))
    t = data.draw(st.integers(0, dg.bd.num_nodes - 1))
    vt = set(members(dg.vmask[t]))
    c = {v for v in vt if data.draw(st.booleans())}
    for r in range(1, len(vt) + 1):
        for x in itertools.combinations(sorted(vt), r):
            assert is_pbc(dg, t, mask_of(x), mask_of(c)) == naive_is_pbc(g, vt, set(x), c)


def test_ctype_examples():
    g = cycle(5)
    dg = DecomposedGraph(g, linear_bd(g, range(5)))
    assert ctype_of(dg, dg.bd.root, 0) == EMPTY_TYPE
    assert ctype_of(dg, dg.bd.root, 0b11) == (make_profile([0], []),)
    with pytest.raises(GuardError):
        ctype_of(dg, dg.bd.root, 0b11111, max_size=3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_profile_count(m):
    profs = all_profiles(list(range(m)))
    assert len(profs) == len(set(profs)) == 3**m - 2**m
    assert all(p.insiders and not set(p.insiders) & set(p.outsiders) for p in profs)


# -- operator-level combinators on a hand-built operator -------------------

Q1, Q2, Q3, P1, P2, P3 = 0, 1, 2, 3, 4, 5  # r side: Q*, s side: P*
A, B, C = 0, 1, 2  # parent classes, one per bubble


def three_bubble_operator(extra_edges=()):
    pairs = [(Q1, P2), (Q1, P3), (Q3, P2), (Q3, P3), (Q2, P1), *extra_edges]
    adj = {k: set() for k in range(6)}
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    rho = {Q1: A, P1: A, P2: A, Q2: B, P3: B, Q3: C}
    bubble = {A: frozenset({Q1, P1, P2}), B: frozenset({Q2, P3}), C: frozenset({Q3})}
    return Operator(
        node=99,
        r_classes=(Q1, Q2, Q3),
        s_classes=(P1, P2, P3),
        t_classes=(A, B, C),
        adj={k: frozenset(v) for k, v in adj.items()},
        rho=rho,
        bubble=bubble,
    )


PR_R = make_profile([Q1], [Q3])
PR_S = make_profile([P2, P3], [P1])


def test_bubble_buddies():
    op = three_bubble_operator()
    assert bubble_buddies(op, []) == frozenset()
    bb = bubble_buddies(op, [Q1, P2, P3])
    assert P1 in bb and Q2 in bb and Q3 not in bb
    g = Graph.from_edges(3, [])
    dg = DecomposedGraph(g, linear_bd(g, range(3)))
    root_op = dg.operator(dg.bd.root)
    assert bubble_buddies(root_op, [0]) == frozenset(root_op.r_classes + root_op.s_classes)


def test_three_bubble_compatible_and_merge():
    op = three_bubble_operator()
    assert compatible(op, PR_R, PR_S)
    merged = merge_profile(op, PR_R, PR_S)
    # Q3 is outside the touched bubbles and complete to the s insiders
    assert merged == make_profile([A, B], [C])


def test_missing_biclique_edge_incompatible():
    op = three_bubble_operator()
    assert not compatible(op, make_profile([Q2], []), make_profile([P2], []))


def test_outsider_buddy_complete_to_opposite_insiders_incompatible():
    op = three_bubble_operator(extra_edges=[(Q1, P1)])
    assert not compatible(op, PR_R, PR_S)
    with pytest.raises(ValueError):
        merge_profile(op, PR_R, PR_S)


def test_merge_without_outsiders():
    op = three_bubble_operator()
    assert merge_profile(op, make_profile([Q1], []), make_profile([P2], [])) == make_profile([A], [])


def test_compatible_side_mismatch():
    with pytest.raises(ValueError):
        compatible(three_bubble_operator(), PR_S, PR_R)


def test_lift_k2_not_liftable():
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    op = dg.operator(dg.bd.root)
    assert not liftable(op, "r", make_profile([0], []))
    with pytest.raises(ValueError):
        lift_profile(op, "r", make_profile([0], []))


def test_lift_edgeless_pair():
    g = Graph.from_edges(2, [])
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    op = dg.operator(dg.bd.root)
    assert liftable(op, "r", make_profile([0], []))
    assert lift_profile(op, "r", make_profile([0], [])) == make_profile([0], [])


def test_outsider_buddy_blocks_lift():
    op = three_bubble_operator()
    assert not liftable(op, "s", make_profile([P2], [P1]))


def test_merge_ctype_examples():
    op = three_bubble_operator()
    assert merge_ctype(op, EMPTY_TYPE, EMPTY_TYPE) == EMPTY_TYPE
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    op = dg.operator(dg.bd.root)
    got = merge_ctype(op, (make_profile([0], []),), (make_profile([1], []),))
    assert got == (make_profile([0], []),) == ctype_of(dg, dg.bd.root, 0b11)


# -- merge and lift harnesses on random instances--------------------------------


def _random_instance(rng, max_n=8):
    n = rng.randint(2, max_n)
    g = Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.55])
    bd = random_bd(g, rng)
    dg = DecomposedGraph(g, bd)
    t = rng.choice(bd.internal_nodes())
    return g, dg, t


def _cliques_in(g, mask):
    verts = members(mask)
    for r in range(1, len(verts) + 1):
        for x in itertools.combinations(verts, r):
            m = mask_of(x)
            if g.is_clique(m):
                yield m


def test_merge_roundtrip_on_pbcs():
    rng = random.Random(45)
    checked = 0
    for _ in range(150):
        g, dg, t = _random_instance(rng)
        r, s = dg.bd.children[t]
        op = dg.operator(t)
        ct = sum(1 << v for v in members(dg.vmask[t]) if rng.random() < 0.7)
        cr, cs = ct & dg.vmask[r], ct & dg.vmask[s]
        # every pbc with both parts nonempty splits into compatible pbcs
        for x in _cliques_in(g, ct):
            xr, xs = x & dg.vmask[r], x & dg.vmask[s]
            if not (xr and xs) or not is_pbc(dg, t, x, ct):
                continue
            assert is_pbc(dg, r, xr, cr) and is_pbc(dg, s, xs, cs)
            pr, ps = profile_of(dg, r, xr, cr), profile_of(dg, s, xs, cs)
            assert compatible(op, pr, ps)
            assert merge_profile(op, pr, ps) == profile_of(dg, t, x, ct)
            checked += 1
        # compatible pairs of pbcs merge into a pbc with the merge profile
        pbc_r = [x for x in _cliques_in(g, cr) if is_pbc(dg, r, x, cr)]
        pbc_s = [x for x in _cliques_in(g, cs) if is_pbc(dg, s, x, cs)]
        for xr in pbc_r:
            for xs in pbc_s:
                pr, ps = profile_of(dg, r, xr, cr), profile_of(dg, s, xs, cs)
                if compatible(op, pr, ps):
                    assert is_pbc(dg, t, xr | xs, ct)
                    assert profile_of(dg, t, xr | xs, ct) == merge_profile(op, pr, ps)
    assert checked > 50


def test_lift_matches_pbc_definition():
    rng = random.Random(46)
    checked = 0
    for _ in range(150):
        g, dg, t = _random_instance(rng)
        op = dg.operator(t)
        ct = sum(1 << v for v in members(dg.vmask[t]) if rng.random() < 0.7)
        for side, child in zip("rs", dg.bd.children[t]):
            cp = ct & dg.vmask[child]
            for x in _cliques_in(g, cp):
                if not is_pbc(dg, child, x, cp):
                    continue
                pr = profile_of(dg, child, x, cp)
                still = is_pbc(dg, t, x, ct)
                assert liftable(op, side, pr) == still
                if still:
                    assert lift_profile(op, side, pr) == profile_of(dg, t, x, ct)
                checked += 1
    assert checked > 100


def test_merge_type_small():
    rng = random.Random(47)
    for _ in range(200):
        g, dg, t = _random_instance(rng, max_n=7)
        r, s = dg.bd.children[t]
        cr = sum(1 << v for v in members(dg.vmask[r]) if rng.random() < 0.6)
        cs = sum(1 << v for v in members(dg.vmask[s]) if rng.random() < 0.6)
        got = merge_ctype(dg.operator(t), ctype_of(dg, r, cr), ctype_of(dg, s, cs))
        assert got == ctype_of(dg, t, cr | cs)


# -- assignments ------------------------------------------------------------


def test_assignments_examples():
    assert list(enumerate_assignments([3], [3])) == [((3,),)]
    assert list(enumerate_assignments([1, 2], [3])) == [((1,), (2,))]
    assert len(list(enumerate_assignments([2, 2], [2, 2]))) == 3
    with pytest.raises(ValueError):
        list(enumerate_assignments([1], [2]))


@given(
    st.lists(st.integers(0, 3), min_size=1, max_size=3),
    st.lists(st.integers(0, 3), min_size=1, max_size=3),
)
@settings(max_examples=80, deadline=None)
def test_assignments_match_brute_force(rows, cols):
    if sum(rows) != sum(cols):
        return
    got = list(enumerate_assignments(rows, cols))

    def compositions(total, parts):
        return [c for c in itertools.product(range(total + 1), repeat=parts) if sum(c) == total]

    expected = [
        mat
        for mat in itertools.product(*(compositions(r, len(cols)) for r in rows))
        if [sum(c) for c in zip(*mat)] == cols
    ]
    assert got == expected  # row-major, smallest value first is lexicographic


def test_signature_assignments_guard_sums():
    sig = ((EMPTY_TYPE, 2),)
    with pytest.raises(ValueError):
        signature_assignments(sig, sig, 3)


def test_merge_skeleton_labels():
    g = complete(2)
    dg = DecomposedGraph(g, linear_bd(g, [0, 1]))
    op = dg.operator(dg.bd.root)
    sk = merge_skeleton(op, leaf_signature(0, 2), leaf_signature(1, 2))
    for (i, j), lab in sk.label.items():
        assert lab == merge_ctype(op, sk.left[i], sk.right[j])


# -- the dynamic program ----------------------------------------------------


def test_leaf_signature_shape():
    sig = leaf_signature(3, 4)
    assert dict(sig) == {(make_profile([3], []),): 1, EMPTY_TYPE: 3}
    assert leaf_signature(3, 1) == (((make_profile([3], []),), 1),)


def test_solve_examples():
    g = cycle(5)
    assert not solve_cw(g, best_bd_small(g).bd, 2).answer
    res = solve_cw(g, best_bd_small(g).bd, 3, want_certificate=True)
    assert res.answer and is_clique_coloring(g, res.coloring)
    k4 = complete(4)
    rng = random.Random(0)
    for _ in range(5):
        assert solve_cw(k4, random_bd(k4, rng), 2).answer


def test_solve_empty_graph():
    assert solve_cw(Graph.from_edges(0, []), None, 2).answer


def test_signature_guard():
    g = cycle(6)
    with pytest.raises(GuardError) as exc:
        solve_cw(g, linear_bd(g, range(6)), 3, max_signatures=1)
    assert exc.value.module == "cw-solver" and "node" in str(exc.value)


def test_tables_hold_exactly_the_realised_signatures():
    rng = random.Random(3)
    for g in seeded_graphs(25, 5, seed=5, min_n=2):
        k = 2
        bd = random_bd(g, rng)
        dg = DecomposedGraph(g, bd)
        res = solve_cw(g, bd, k, keep_tables=True)
        for t in range(bd.num_nodes):
            verts = members(dg.vmask[t])
            realised = set()
            for colors in itertools.product(range(k), repeat=len(verts)):
                classes = [sum(1 << v for v, c in zip(verts, colors) if c == i) for i in range(k)]
                realised.add(coloring_signature(dg, t, classes))
            assert set(res.tables[t]) == realised
            assert all(sum(c for _, c in sig) == k for sig in res.tables[t])
        for v in range(g.n):
            assert set(res.tables[bd.leaf_of(v)]) == {leaf_signature(v, k)}


def test_exhaustive_against_naive():
    for g in all_graphs_upto(4):
        bd = best_bd_small(g).bd
        for k in (1, 2, 3):
            res = solve_cw(g, bd, k, want_certificate=True)
            assert res.answer == naive_colorable(g, k)
            if res.answer:
                assert is_clique_coloring(g, res.coloring)


@given(graphs(max_n=7), st.integers(2, 3), st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_random_bd_against_brute_force(g, k, rnd):
    res = solve_cw(g, random_bd(g, rnd), k, want_certificate=True)
    assert res.answer == (brute_force_solve(g, k) is not None)
    if res.answer:
        assert is_clique_coloring(g, res.coloring)
        assert Counter(res.coloring.colors).keys() <= set(range(1, k + 1))
