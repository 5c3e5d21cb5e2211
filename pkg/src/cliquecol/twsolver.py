"""q-clique-coloring by dynamic programming over a nice tree decomposition.

A table at node ``t`` is a boolean ndarray with one axis of length ``q`` per
bag vertex, axes in ascending vertex order; its C-order flattening is the
mixed-radix encoding of bag colorings (colour ``c`` stored as digit ``c-1``).
``A[t, gamma]`` is true iff some q-coloring of ``G_t`` restricts to ``gamma``
on the bag and every monochromatic maximal clique of ``G_t`` lies in the bag.

Forget nodes differ from the textbook rule.  Forgetting ``v`` coloured ``c``
must reject exactly when some maximal clique of ``G`` containing ``v`` lies in
the child bag and is coloured ``c`` throughout.  Such cliques are ``v`` plus a
maximal clique of ``G[N(v)]``, so the containment oracle is built over the
maximal cliques of ``G[N(v)]`` that fit in the bag (the empty clique when
``v`` is isolated).  ``check="bag"`` selects the literal variant, which builds
the oracle on ``G[B_t]``; it accepts e.g. a single isolated vertex and is
kept only for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Coloring, Graph, GuardError, mask_of, maximal_cliques_containing, members
from .oracle import MAX_ORACLE_BITS, CliqueOracle, build_oracle, containment_oracle
from .treedecomp import FORGET, INTRODUCE, JOIN, LEAF, NiceTreeDecomposition, validate_nice

MAX_TABLE_ENTRIES = 1 << 27


def encode(bag_colors: dict[int, int], q: int) -> int:
    """Mixed-radix index of a bag coloring (ascending vertex order, digits c-1)."""
    idx = 0
    for v in sorted(bag_colors):
        idx = idx * q + bag_colors[v] - 1
    return idx


def decode(idx: int, bag, q: int) -> dict[int, int]:
    out = {}
    for v in sorted(bag, reverse=True):
        idx, d = divmod(idx, q)
        out[v] = d + 1
    return out


@dataclass
class TwStats:
    """Work counters: table entries written and oracle entries built per node."""

    table_entries: list[int] = field(default_factory=list)
    oracle_entries: list[int] = field(default_factory=list)

    @property
    def work(self) -> list[int]:
        return [a + b for a, b in zip(self.table_entries, self.oracle_entries)]


@dataclass
class TwResult:
    answer: bool
    coloring: Coloring | None = None
    tables: list[np.ndarray | None] | None = None
    stats: TwStats | None = None


def step_leaf(q: int) -> np.ndarray:
    return np.ones((), dtype=bool)


def step_introduce(child: np.ndarray, child_bag, v: int, q: int) -> np.ndarray:
    """A[t, gamma] = A[s, gamma restricted to B_s]."""
    axis = sorted(set(child_bag) | {v}).index(v)
    shape = list(child.shape)
    shape.insert(axis, q)
    return np.broadcast_to(np.expand_dims(child, axis), shape).copy()


def step_join(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return left & right


def forget_oracle(g: Graph, bag, v: int, check: str = "neighbourhood") -> tuple[list[int], CliqueOracle]:
    """Oracle over subsets of ``N(v) & bag`` (neighbourhood mode) or of ``bag`` (bag mode).

    Returns the ground vertices (ascending; bit i of a query is ``ground[i]``)
    and the oracle.
    """
    bag = sorted(bag)
    if check == "bag":
        if len(bag) > MAX_ORACLE_BITS:
            raise GuardError("tw-solver", f"forget oracle limited to {MAX_ORACLE_BITS} bag vertices")
        return bag, build_oracle(g.induced(bag))
    if check != "neighbourhood":
        raise ValueError(f"unknown forget check {check!r}")
    ground = [u for u in bag if g.nbr[v] >> u & 1]
    if len(ground) > MAX_ORACLE_BITS:
        raise GuardError("tw-solver", f"forget oracle limited to {MAX_ORACLE_BITS} bag vertices")
    pos = {u: i for i, u in enumerate(ground)}
    bag_mask = mask_of(bag) | 1 << v
    family = []
    for k in maximal_cliques_containing(g, v):
        if k & ~bag_mask:
            continue
        family.append(sum(1 << pos[u] for u in members(k) if u != v))
    return ground, containment_oracle(len(ground), family)


def forget_acceptance(g: Graph, bag, v: int, q: int, check: str = "neighbourhood") -> tuple[np.ndarray, int]:
    """Boolean array ``ok[gamma_t..., c]``: the oracle check passes for colour ``c``.

    Also returns the number of oracle entries built.
    """
    bag = sorted(bag)
    ground, oracle = forget_oracle(g, bag, v, check)
    nbr_ground = [u for u in ground if g.nbr[v] >> u & 1]
    shape = (q,) * len(bag)
    index = np.zeros(shape + (q,), dtype=np.int64)
    colors = np.arange(q).reshape((1,) * len(bag) + (q,))
    gpos = {u: i for i, u in enumerate(ground)}
    for axis, u in enumerate(bag):
        if u not in nbr_ground:
            continue
        grid = np.arange(q).reshape((1,) * axis + (q,) + (1,) * (len(bag) - axis - 1) + (1,))
        index = index + (grid == colors).astype(np.int64) * (1 << gpos[u])
    return ~oracle.answers[index], oracle.answers.size


def step_forget(child: np.ndarray, child_bag, v: int, g: Graph, q: int, check: str = "neighbourhood") -> np.ndarray:
    """A[t, gamma] = OR over c of (A[s, gamma + {v: c}] and oracle(N(v) & gamma^-1(c)) == 0)."""
    return _forget(child, child_bag, v, g, q, check)[0]


def _forget(child, child_bag, v, g, q, check):
    child_bag = sorted(child_bag)
    axis = child_bag.index(v)
    bag = [u for u in child_bag if u != v]
    ok, oracle_size = forget_acceptance(g, bag, v, q, check)
    moved = np.moveaxis(child, axis, -1)
    return (moved & ok).any(axis=-1), ok, oracle_size


def solve_tw(
    g: Graph,
    ntd: NiceTreeDecomposition,
    q: int,
    want_certificate: bool = False,
    *,
    check: str = "neighbourhood",
    keep_tables: bool = False,
    validate: bool = True,
) -> TwResult:
    if q < 1:
        raise ValueError("q must be at least 1")
    if validate:
        rep = validate_nice(g, ntd)
        if not rep:
            raise ValueError(f"invalid nice tree decomposition: {rep.violation} {rep.witness}")
    if q == 1:
        # every nonempty graph has a maximal clique, necessarily monochromatic
        yes = g.n == 0
        return TwResult(yes, Coloring((), 1) if yes and want_certificate else None)
    for x in ntd.nodes:
        if q ** len(x.bag) > MAX_TABLE_ENTRIES:
            raise GuardError("tw-solver", f"table of {q}^{len(x.bag)} entries exceeds {MAX_TABLE_ENTRIES}")
    retain = want_certificate or keep_tables
    tables: list[np.ndarray | None] = [None] * len(ntd.nodes)
    accept: dict[int, np.ndarray] = {}
    stats = TwStats()
    # children precede parents, so index order is a valid bottom-up order
    for i, x in enumerate(ntd.nodes):
        oracle_size = 0
        if x.kind == LEAF:
            tab = step_leaf(q)
        elif x.kind == INTRODUCE:
            c = x.children[0]
            tab = step_introduce(tables[c], ntd.nodes[c].bag, x.vertex, q)
        elif x.kind == JOIN:
            a, b = x.children
            tab = step_join(tables[a], tables[b])
        elif x.kind == FORGET:
            c = x.children[0]
            tab, ok, oracle_size = _forget(tables[c], ntd.nodes[c].bag, x.vertex, g, q, check)
            if want_certificate:
                accept[i] = ok
        else:
            raise ValueError(f"unknown node kind {x.kind!r}")
        tables[i] = tab
        stats.table_entries.append(tab.size)
        stats.oracle_entries.append(oracle_size)
        if not retain:
            for c in x.children:
                tables[c] = None
    answer = bool(tables[ntd.root][()])
    coloring = None
    if answer and want_certificate:
        coloring = reconstruct_certificate(tables, accept, ntd, q, g.n)
    return TwResult(answer, coloring, tables if retain else None, stats)


def reconstruct_certificate(tables, accept, ntd: NiceTreeDecomposition, q: int, n: int) -> Coloring:
    """Top-down walk; at each forget node take the smallest admissible colour."""
    if not tables[ntd.root][()]:
        raise ValueError("no certificate: the instance is a no-instance")
    colors = [0] * n
    stack = [(ntd.root, {})]
    while stack:
        i, gamma = stack.pop()
        x = ntd.nodes[i]
        if x.kind == LEAF:
            continue
        if x.kind == JOIN:
            for c in x.children:
                stack.append((c, gamma))
        elif x.kind == INTRODUCE:
            child = {u: col for u, col in gamma.items() if u != x.vertex}
            stack.append((x.children[0], child))
        else:
            c = x.children[0]
            child_bag = sorted(ntd.nodes[c].bag)
            ok = accept[i]
            idx = tuple(gamma[u] - 1 for u in sorted(x.bag))
            for col in range(1, q + 1):
                child = dict(gamma)
                child[x.vertex] = col
                if tables[c][tuple(child[u] - 1 for u in child_bag)] and ok[idx + (col - 1,)]:
                    colors[x.vertex] = col
                    stack.append((c, child))
                    break
            else:
                raise RuntimeError(f"inconsistent tables at forget node {i}")
    return Coloring(tuple(colors), q)
