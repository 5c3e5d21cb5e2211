"""Rooted branch decompositions, outside-neighbourhood classes and node operators.

Classes at a node are keyed by their minimum vertex.  The two children of an
internal node have disjoint vertex sets, so child class keys are unique
across both sides of the operator.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .graph import Graph, GuardError, members

MAX_BEST_BD_N = 8


@dataclass(frozen=True)
class BranchDecomposition:
    """Full binary rooted tree; ``children[i]`` is ``()`` or ``(r, s)`` with ``r < s``.

    ``leaf_vertex[i]`` is the vertex at leaf ``i`` (``None`` for internal nodes).
    """

    children: tuple[tuple[int, ...], ...]
    leaf_vertex: tuple[int | None, ...]
    root: int

    @property
    def num_nodes(self) -> int:
        return len(self.children)

    def postorder(self) -> list[int]:
        out = []
        stack = [(self.root, False)]
        while stack:
            x, done = stack.pop()
            if done:
                out.append(x)
                continue
            stack.append((x, True))
            for c in reversed(self.children[x]):
                stack.append((c, False))
        return out

    def internal_nodes(self) -> list[int]:
        return [x for x in self.postorder() if self.children[x]]

    def leaf_of(self, v: int) -> int:
        return self.leaf_vertex.index(v)


@dataclass
class BDReport:
    ok: bool
    violation: str | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def validate_bd(g: Graph, bd: BranchDecomposition) -> BDReport:
    n_nodes = bd.num_nodes
    if g.n == 0:
        return BDReport(False, "empty", "branch decompositions need n >= 1")
    if not 0 <= bd.root < n_nodes or len(bd.leaf_vertex) != n_nodes:
        return BDReport(False, "structure", bd.root)
    parent: dict[int, int] = {}
    for x, kids in enumerate(bd.children):
        if len(kids) not in (0, 2):
            return BDReport(False, "arity", x)
        for c in kids:
            if not 0 <= c < n_nodes or c == bd.root or c in parent:
                return BDReport(False, "not a tree", c)
            parent[c] = x
    if len(parent) != n_nodes - 1:
        return BDReport(False, "not a tree", "node count")
    seen = set()
    stack = [bd.root]
    while stack:
        x = stack.pop()
        seen.add(x)
        stack.extend(bd.children[x])
    if len(seen) != n_nodes:
        return BDReport(False, "not a tree", min(set(range(n_nodes)) - seen))
    placed: dict[int, int] = {}
    for x in range(n_nodes):
        v = bd.leaf_vertex[x]
        if bd.children[x]:
            if v is not None:
                return BDReport(False, "internal node carries a vertex", x)
            continue
        if v is None or not 0 <= v < g.n:
            return BDReport(False, "leaf without valid vertex", x)
        if v in placed:
            return BDReport(False, "vertex on two leaves", v)
        placed[v] = x
    if len(placed) != g.n:
        return BDReport(False, "vertex without leaf", min(set(range(g.n)) - set(placed)))
    return BDReport(True)


@dataclass(frozen=True)
class Operator:
    """Operator of an internal node: class graph H_t and bubble maps."""

    node: int
    r_classes: tuple[int, ...]
    s_classes: tuple[int, ...]
    t_classes: tuple[int, ...]
    adj: dict[int, frozenset[int]]  # H_t: child key -> adjacent opposite-side keys
    rho: dict[int, int]  # child key -> parent key
    bubble: dict[int, frozenset[int]]  # parent key -> child keys in its bubble

    def side(self, key: int) -> str:
        if key in self._r_set:
            return "r"
        if key in self._s_set:
            return "s"
        raise KeyError(key)

    @cached_property
    def _r_set(self) -> frozenset[int]:
        return frozenset(self.r_classes)

    @cached_property
    def _s_set(self) -> frozenset[int]:
        return frozenset(self.s_classes)

    def opposite(self, side: str) -> tuple[int, ...]:
        return self.s_classes if side == "r" else self.r_classes


class DecomposedGraph:
    """A graph with a validated branch decomposition and cached per-node data."""

    def __init__(self, g: Graph, bd: BranchDecomposition, validate: bool = True):
        if validate:
            rep = validate_bd(g, bd)
            if not rep:
                raise ValueError(f"invalid branch decomposition: {rep.violation} {rep.witness}")
        self.g = g
        self.bd = bd
        self.vmask: list[int] = [0] * bd.num_nodes
        for x in bd.postorder():
            if bd.children[x]:
                self.vmask[x] = self.vmask[bd.children[x][0]] | self.vmask[bd.children[x][1]]
            else:
                self.vmask[x] = 1 << bd.leaf_vertex[x]
        self._classes: dict[int, dict[int, int]] = {}
        self._operators: dict[int, Operator] = {}

    def class_masks(self, t: int) -> dict[int, int]:
        """Key (minimum vertex) -> class bitmask, keys ascending."""
        if t not in self._classes:
            vt = self.vmask[t]
            outside = self.g.all_mask & ~vt
            by_sig: dict[int, int] = {}
            for u in members(vt):
                sig = self.g.nbr[u] & outside
                by_sig[sig] = by_sig.get(sig, 0) | 1 << u
            classes = {(m & -m).bit_length() - 1: m for m in by_sig.values()}
            self._classes[t] = dict(sorted(classes.items()))
        return self._classes[t]

    def class_of(self, t: int, v: int) -> int:
        for key, m in self.class_masks(t).items():
            if m >> v & 1:
                return key
        raise KeyError(v)

    def operator(self, t: int) -> Operator:
        if t not in self._operators:
            self._operators[t] = self._build_operator(t)
        return self._operators[t]

    def _build_operator(self, t: int) -> Operator:
        if not self.bd.children[t]:
            raise ValueError(f"node {t} is a leaf")
        r, s = self.bd.children[t]
        rc, sc, tc = self.class_masks(r), self.class_masks(s), self.class_masks(t)
        adj: dict[int, set[int]] = {k: set() for k in (*rc, *sc)}
        for kr, mr in rc.items():
            vr = (mr & -mr).bit_length() - 1
            for ks, ms in sc.items():
                vs = (ms & -ms).bit_length() - 1
                if self.g.nbr[vr] >> vs & 1:
                    # classes are modules w.r.t. the outside, so adjacency is all-or-nothing
                    adj[kr].add(ks)
                    adj[ks].add(kr)
        rho = {}
        bubble: dict[int, set[int]] = {k: set() for k in tc}
        for k, m in (*rc.items(), *sc.items()):
            parents = [kt for kt, mt in tc.items() if m & mt]
            if len(parents) != 1 or m & ~tc[parents[0]]:
                raise RuntimeError(f"child class {k} does not refine node {t}")
            rho[k] = parents[0]
            bubble[parents[0]].add(k)
        return Operator(
            t,
            tuple(rc),
            tuple(sc),
            tuple(tc),
            {k: frozenset(v) for k, v in adj.items()},
            rho,
            {k: frozenset(v) for k, v in bubble.items()},
        )


def classes_at(g: Graph, bd: BranchDecomposition, t: int) -> list[frozenset[int]]:
    if not 0 <= t < bd.num_nodes:
        raise KeyError(f"unknown node {t}")
    dg = DecomposedGraph(g, bd)
    return [frozenset(members(m)) for m in dg.class_masks(t).values()]


def module_width(g: Graph, bd: BranchDecomposition) -> int:
    dg = DecomposedGraph(g, bd)
    return max(len(dg.class_masks(t)) for t in range(bd.num_nodes))


def operator_at(g: Graph, bd: BranchDecomposition, t: int) -> Operator:
    return DecomposedGraph(g, bd).operator(t)


def linear_bd(g: Graph, order) -> BranchDecomposition:
    """Caterpillar: leaves in ``order``; internal node i covers the first i+1 vertices.

    Node ids interleave so that every spine node precedes the leaf it is
    joined with: leaves ``0`` and ``1`` hold ``order[0]``, ``order[1]``, and
    after that each internal node is followed by the next leaf.  The prefix
    is therefore always the r child and the root is the last node.
    """
    order = list(order)
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    n = g.n
    if n == 0:
        raise ValueError("branch decompositions need n >= 1")
    children: list[tuple[int, ...]] = [()]
    leaf_vertex: list[int | None] = [order[0]]
    spine = 0
    for v in order[1:]:
        children.append(())
        leaf_vertex.append(v)
        leaf = len(children) - 1
        children.append((spine, leaf))
        leaf_vertex.append(None)
        spine = len(children) - 1
    return BranchDecomposition(tuple(children), tuple(leaf_vertex), spine)


def _prefix_width(g: Graph, s: int) -> int:
    outside = g.all_mask & ~s
    return len({g.nbr[u] & outside for u in members(s)})


@dataclass(frozen=True)
class BestBD:
    bd: BranchDecomposition
    width: int
    order: tuple[int, ...]
    search_space: str = "linear"


def best_bd_small(g: Graph, max_n: int = MAX_BEST_BD_N) -> BestBD:
    """Minimum module-width over all linear decompositions.

    A caterpillar's internal nodes cover the prefixes of its order and the
    classes of a prefix do not depend on the order inside it, so the
    minimum over all ``n!`` orders equals a bottleneck-path minimum over the
    subset lattice, computed here in ``O(2^n n)``.  Ties go to the
    lexicographically smallest order.
    """
    if g.n > max_n:
        raise GuardError("branch-decomp", f"exact linear search limited to n <= {max_n}, got n={g.n}")
    if g.n == 0:
        raise ValueError("branch decompositions need n >= 1")
    full = g.all_mask
    # cost[S]: smallest achievable max prefix width over all ways to extend prefix S
    size = 1 << g.n
    cost = [0] * size
    for s in range(size - 1, -1, -1):
        if s == full:
            cost[s] = 1
            continue
        w = _prefix_width(g, s) if s else 0
        cost[s] = max(w, min(cost[s | 1 << v] for v in members(full & ~s)))
    order = []
    s = 0
    while s != full:
        v = min(members(full & ~s), key=lambda u: (cost[s | 1 << u], u))
        order.append(v)
        s |= 1 << v
    bd = linear_bd(g, order)
    return BestBD(bd, max(cost[0], 1), tuple(order))


def random_bd(g: Graph, rng: random.Random) -> BranchDecomposition:
    """Random full binary tree over the vertices (random merges of subtrees)."""
    if g.n == 0:
        raise ValueError("branch decompositions need n >= 1")
    perm = list(range(g.n))
    rng.shuffle(perm)
    children: list[tuple[int, ...]] = [() for _ in range(g.n)]
    leaf_vertex: list[int | None] = list(perm)
    pool = list(range(g.n))
    while len(pool) > 1:
        a, b = rng.sample(range(len(pool)), 2)
        x, y = pool[a], pool[b]
        children.append(tuple(sorted((x, y))))
        leaf_vertex.append(None)
        pool = [p for i, p in enumerate(pool) if i not in (a, b)] + [len(children) - 1]
    return BranchDecomposition(tuple(children), tuple(leaf_vertex), pool[0])
