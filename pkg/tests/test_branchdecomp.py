import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquecol.branchdecomp import (
    BranchDecomposition,
    DecomposedGraph,
    best_bd_small,
    classes_at,
    linear_bd,
    module_width,
    operator_at,
    random_bd,
    validate_bd,
)
from cliquecol.gadgets import complete, path
from cliquecol.graph import Graph, GuardError, members
from oracles import graphs, outside_classes, seeded_graphs


def naive_linear_mw(g: Graph) -> int:
    best = None
    for order in itertools.permutations(range(g.n)):
        w = max(len(outside_classes(g, set(order[: i + 1]))) for i in range(g.n))
        w = max(w, 1)
        best = w if best is None else min(best, w)
    return best


def test_validate_single_vertex():
    bd = BranchDecomposition(((),), (0,), 0)
    assert validate_bd(Graph.from_edges(1, []), bd).ok


def test_validate_unary_node():
    bd = BranchDecomposition(((), (0,)), (0, None), 1)
    rep = validate_bd(Graph.from_edges(1, []), bd)
    assert not rep.ok and rep.violation == "arity"


def test_validate_duplicate_leaf_vertex():
    bd = BranchDecomposition(((), (), (0, 1)), (0, 0, None), 2)
    rep = validate_bd(Graph.from_edges(2, []), bd)
    assert not rep.ok and rep.violation == "vertex on two leaves"


def test_validate_rejects_empty_graph():
    assert not validate_bd(Graph.from_edges(0, []), BranchDecomposition((), (), 0)).ok


def test_classes_root_and_leaf():
    g = path(3)
    bd = linear_bd(g, [0, 1, 2])
    assert classes_at(g, bd, bd.root) == [frozenset({0, 1, 2})]
    assert classes_at(g, bd, bd.leaf_of(1)) == [frozenset({1})]
    with pytest.raises(KeyError):
        classes_at(g, bd, 99)


def test_classes_path_prefix():
    g = path(3)
    bd = linear_bd(g, [0, 1, 2])
    node = bd.children[bd.root][0] if bd.leaf_vertex[bd.children[bd.root][0]] is None else bd.children[bd.root][1]
    assert classes_at(g, bd, node) == [frozenset({0}), frozenset({1})]


def test_module_width_examples():
    for n in range(1, 7):
        g = complete(n)
        bd = random_bd(g, random.Random(n))
        assert module_width(g, bd) == 1
    assert module_width(Graph.from_edges(1, []), linear_bd(Graph.from_edges(1, []), [0])) == 1
    g = path(3)
    assert module_width(g, linear_bd(g, [0, 1, 2])) == 2


def test_operator_k2():
    g = complete(2)
    bd = linear_bd(g, [0, 1])
    op = operator_at(g, bd, bd.root)
    assert op.adj[0] == {1} and op.adj[1] == {0}
    assert op.rho == {0: 0, 1: 0}
    assert op.bubble == {0: frozenset({0, 1})}


def test_operator_edgeless_pair():
    g = Graph.from_edges(2, [])
    bd = linear_bd(g, [0, 1])
    op = operator_at(g, bd, bd.root)
    assert not op.adj[0] and not op.adj[1]
    assert op.rho == {0: 0, 1: 0}


def test_operator_path_top_node():
    g = path(3)
    bd = linear_bd(g, [0, 1, 2])
    op = operator_at(g, bd, bd.root)
    assert op.r_classes == (0, 1) and op.s_classes == (2,)
    assert op.adj[1] == {2} and op.adj[0] == frozenset()
    assert op.side(0) == "r" and op.side(2) == "s"


def test_operator_on_leaf_rejected():
    g = path(2)
    bd = linear_bd(g, [0, 1])
    with pytest.raises(ValueError):
        operator_at(g, bd, bd.leaf_of(0))


def test_linear_bd_shape():
    g = path(3)
    for order in itertools.permutations(range(3)):
        bd = linear_bd(g, order)
        assert bd.num_nodes == 5 and validate_bd(g, bd).ok
        assert all(not kids or kids[0] < kids[1] for kids in bd.children)
    one = Graph.from_edges(1, [])
    assert linear_bd(one, [0]).num_nodes == 1
    with pytest.raises(ValueError):
        linear_bd(g, [0, 0, 1])


def test_best_bd_examples():
    best = best_bd_small(complete(4))
    assert best.width == 1 and best.search_space == "linear"
    one = Graph.from_edges(1, [])
    best = best_bd_small(one)
    assert best.width == 1 and best.bd.num_nodes == 1
    with pytest.raises(GuardError) as exc:
        best_bd_small(Graph.from_edges(9, []))
    assert exc.value.module == "branch-decomp"


@given(graphs(max_n=6))
@settings(max_examples=60, deadline=None)
def test_best_bd_is_optimal_over_permutations(g):
    best = best_bd_small(g)
    assert validate_bd(g, best.bd).ok
    assert best.width == module_width(g, best.bd) == naive_linear_mw(g)
    assert best.width <= module_width(g, linear_bd(g, range(g.n)))


def _check_node_structure(g: Graph, bd: BranchDecomposition):
    dg = DecomposedGraph(g, bd)
    for t in range(bd.num_nodes):
        vt = set(members(dg.vmask[t]))
        got = [frozenset(members(m)) for m in dg.class_masks(t).values()]
        assert got == outside_classes(g, vt)
    assert len(dg.class_masks(bd.root)) == 1
    for t in bd.internal_nodes():
        r, s = bd.children[t]
        op = dg.operator(t)
        cm = {**dg.class_masks(r), **dg.class_masks(s)}
        # refinement: each child class lies in its parent class
        for k, m in cm.items():
            assert m & ~dg.class_masks(t)[op.rho[k]] == 0
        # bubbles partition the child classes and rebuild the parent classes
        for kt, mt in dg.class_masks(t).items():
            union = 0
            for k in op.bubble[kt]:
                union |= cm[k]
            assert union == mt
        # E(G_t) = E(G_r) + E(G_s) + edges between H_t-adjacent classes
        rebuilt = set()
        for child in (r, s):
            vm = dg.vmask[child]
            rebuilt |= {e for e in g.edges() if (1 << e[0] | 1 << e[1]) & ~vm == 0}
        for kr in op.r_classes:
            for ks in op.adj[kr]:
                for u in members(cm[kr]):
                    for v in members(cm[ks]):
                        rebuilt.add((min(u, v), max(u, v)))
        vm = dg.vmask[t]
        assert rebuilt == {e for e in g.edges() if (1 << e[0] | 1 << e[1]) & ~vm == 0}


def test_operator_invariants_random_corpus():
    rng = random.Random(8)
    for g in seeded_graphs(120, 8, seed=21):
        _check_node_structure(g, random_bd(g, rng))
        _check_node_structure(g, linear_bd(g, range(g.n)))


@given(graphs(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_random_bd_validates(g, rnd):
    bd = random_bd(g, rnd)
    assert validate_bd(g, bd).ok
    assert sorted(v for v in bd.leaf_vertex if v is not None) == list(range(g.n))
