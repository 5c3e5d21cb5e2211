"""Tree decompositions: validation, nice form, exact treewidth for small graphs."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GuardError, mask_of, members, popcount

MAX_EXACT_TW_N = 15


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed ``0..N-1`` with undirected tree edges between bag indices."""

    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for lst in adj:
            lst.sort()
        return adj


@dataclass
class TDReport:
    ok: bool
    width: int | None = None
    violation: str | None = None  # "tree", "T1", "T2" or "T3"
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


def _tree_violation(num_nodes: int, edges) -> object | None:
    if num_nodes == 0:
        return "no nodes"
    if len(edges) != num_nodes - 1:
        return f"{len(edges)} edges for {num_nodes} nodes"
    adj: list[list[int]] = [[] for _ in range(num_nodes)]
    for a, b in edges:
        if not (0 <= a < num_nodes and 0 <= b < num_nodes) or a == b:
            return (a, b)
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != num_nodes:
        return f"disconnected: node {min(set(range(num_nodes)) - seen)} unreachable"
    return None


def validate_td(g: Graph, td: TreeDecomposition) -> TDReport:
    """Check tree structure, then (T1) coverage, (T2) edge coverage, (T3) connectivity.

    Witnesses are 0-based: a vertex for T1/T3, an edge ``(u, v)`` for T2.
    """
    bad = _tree_violation(len(td.bags), td.edges)
    if bad is not None:
        return TDReport(False, violation="tree", witness=bad)
    for b in td.bags:
        for v in b:
            if not 0 <= v < g.n:
                return TDReport(False, violation="T1", witness=v)
    covered = set().union(*td.bags)
    for v in range(g.n):
        if v not in covered:
            return TDReport(False, violation="T1", witness=v)
    bag_masks = [mask_of(b) for b in td.bags]
    for u, v in g.edges():
        pair = (1 << u) | (1 << v)
        if not any(m & pair == pair for m in bag_masks):
            return TDReport(False, violation="T2", witness=(u, v))
    adj = td.adjacency()
    for v in range(g.n):
        occ = [i for i, m in enumerate(bag_masks) if m >> v & 1]
        seen = {occ[0]}
        stack = [occ[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen and bag_masks[y] >> v & 1:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(occ):
            return TDReport(False, violation="T3", witness=v)
    return TDReport(True, width=td.width)


LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Rooted nice decomposition; children always precede parents (``root`` is last)."""

    nodes: tuple[NiceNode, ...]
    root: int

    @property
    def width(self) -> int:
        return max(len(x.bag) for x in self.nodes) - 1

    def as_td(self) -> TreeDecomposition:
        edges = tuple((c, i) for i, x in enumerate(self.nodes) for c in x.children)
        return TreeDecomposition(tuple(x.bag for x in self.nodes), edges)

    def parents(self) -> list[int | None]:
        par: list[int | None] = [None] * len(self.nodes)
        for i, x in enumerate(self.nodes):
            for c in x.children:
                par[c] = i
        return par


def validate_nice(g: Graph, ntd: NiceTreeDecomposition) -> TDReport:
    rep = validate_td(g, ntd.as_td())
    if not rep:
        return rep
    if ntd.nodes[ntd.root].bag:
        return TDReport(False, violation="nice", witness=("root bag nonempty", ntd.root))
    for i, x in enumerate(ntd.nodes):
        kids = [ntd.nodes[c] for c in x.children]
        if any(c >= i for c in x.children):
            return TDReport(False, violation="nice", witness=("child after parent", i))
        if x.kind == LEAF:
            ok = not kids and not x.bag
        elif x.kind == INTRODUCE:
            ok = len(kids) == 1 and x.vertex not in kids[0].bag and x.bag == kids[0].bag | {x.vertex}
        elif x.kind == FORGET:
            ok = len(kids) == 1 and x.vertex in kids[0].bag and x.bag == kids[0].bag - {x.vertex}
        elif x.kind == JOIN:
            ok = len(kids) == 2 and kids[0].bag == x.bag == kids[1].bag
        else:
            ok = False
        if not ok:
            return TDReport(False, violation="nice", witness=(x.kind, i))
    return rep


def _compress(td: TreeDecomposition) -> tuple[list[frozenset[int]], list[list[int]]]:
    """Contract tree edges whose one bag is a subset of the other.

    The result has no bag contained in a neighbouring bag, hence at most
    ``max(n, 1)`` nodes.
    """
    bags = {i: b for i, b in enumerate(td.bags)}
    adj = {i: set(a) for i, a in enumerate(td.adjacency())}
    changed = True
    while changed:
        changed = False
        for a in sorted(adj):
            for b in sorted(adj[a]):
                if bags[a] <= bags[b]:
                    # merge a into b
                    for c in adj[a]:
                        if c != b:
                            adj[c].discard(a)
                            adj[c].add(b)
                            adj[b].add(c)
                    adj[b].discard(a)
                    del adj[a], bags[a]
                    changed = True
                    break
            if changed:
                break
    keep = sorted(bags)
    idx = {old: i for i, old in enumerate(keep)}
    return [bags[o] for o in keep], [sorted(idx[c] for c in adj[o]) for o in keep]


def make_nice(g: Graph, td: TreeDecomposition) -> NiceTreeDecomposition:
    """Deterministic nice form of a valid decomposition, same width.

    The compressed tree is rooted at its node 0.  Along each child->parent
    edge the child-only vertices are forgotten, then the parent-only vertices
    introduced, both in ascending order.  A node with ``d >= 2`` children
    becomes a chain of ``d - 1`` joins; leaves grow from an empty bag by
    introductions and the root shrinks to an empty bag by forgets.
    """
    rep = validate_td(g, td)
    if not rep:
        raise ValueError(f"invalid tree decomposition: {rep.violation} {rep.witness}")
    bags, adj = _compress(td)
    nodes: list[NiceNode] = []

    def add(kind, bag, children=(), vertex=None) -> int:
        nodes.append(NiceNode(kind, frozenset(bag), tuple(children), vertex))
        return len(nodes) - 1

    def chain(start: int, src: frozenset[int], dst: frozenset[int]) -> int:
        cur, bag = start, set(src)
        for v in sorted(src - dst):
            bag.discard(v)
            cur = add(FORGET, bag, (cur,), v)
        for v in sorted(dst - src):
            bag.add(v)
            cur = add(INTRODUCE, bag, (cur,), v)
        return cur

    # iterative post-order over the compressed tree
    parent = {0: None}
    order = []
    stack = [0]
    while stack:
        x = stack.pop()
        order.append(x)
        for y in adj[x]:
            if y != parent[x]:
                parent[y] = x
                stack.append(y)
    top: dict[int, int] = {}
    for x in reversed(order):
        kids = [y for y in adj[x] if y != parent[x]]
        if not kids:
            top[x] = chain(add(LEAF, ()), frozenset(), bags[x])
            continue
        branches = [chain(top[y], bags[y], bags[x]) for y in kids]
        cur = branches[-1]
        for b in reversed(branches[:-1]):
            cur = add(JOIN, bags[x], (b, cur))
        top[x] = cur
    root = chain(top[0], bags[0], frozenset())
    return NiceTreeDecomposition(tuple(nodes), root)


def _elimination_width_dp(g: Graph) -> tuple[int, list[int]]:
    """Treewidth by dynamic programming over elimination prefixes.

    ``best[S]`` is the minimum over orderings of ``S`` (eliminated first) of
    the largest degree at elimination time; the degree of ``v`` eliminated
    after ``S`` is the number of vertices outside ``S + v`` reachable from
    ``v`` through ``S``.
    """
    n = g.n
    size = 1 << n
    inf = n + 1
    best = [inf] * size
    choice = [-1] * size
    best[0] = -1
    for s in range(1, size):
        for v in members(s):
            rest = s & ~(1 << v)
            if best[rest] >= best[s]:
                continue
            reach = frontier = 1 << v
            while frontier:
                nxt = 0
                for u in members(frontier):
                    nxt |= g.nbr[u]
                frontier = nxt & rest & ~reach
                reach |= frontier
            nb = 0
            for u in members(reach):
                nb |= g.nbr[u]
            deg = popcount(nb & ~s)
            cost = max(best[rest], deg)
            if cost < best[s]:
                best[s] = cost
                choice[s] = v
    order = []
    s = size - 1
    while s:
        v = choice[s]
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    return max(best[size - 1], 0), order


def td_from_elimination(g: Graph, order: list[int]) -> TreeDecomposition:
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    pos = {v: i for i, v in enumerate(order)}
    nbr = list(g.nbr)
    bags = []
    parent = []
    for v in order:
        later = [u for u in members(nbr[v]) if pos[u] > pos[v]]
        bags.append(frozenset([v, *later]))
        parent.append(min((pos[u] for u in later), default=None))
        lm = mask_of(later)
        for u in later:
            nbr[u] |= lm & ~(1 << u)
    edges = []
    for i, p in enumerate(parent):
        if p is not None:
            edges.append((i, p))
        elif i != len(order) - 1:
            edges.append((i, len(order) - 1))
    return TreeDecomposition(tuple(bags), tuple(edges))


def exact_td_small(g: Graph, max_n: int = MAX_EXACT_TW_N) -> TreeDecomposition:
    """Minimum-width tree decomposition (exponential in n)."""
    if g.n > max_n:
        raise GuardError("tree-decomp", f"exact treewidth limited to n <= {max_n}, got n={g.n}")
    _, order = _elimination_width_dp(g)
    return td_from_elimination(g, order)


def treewidth(g: Graph, max_n: int = MAX_EXACT_TW_N) -> int:
    if g.n > max_n:
        raise GuardError("tree-decomp", f"exact treewidth limited to n <= {max_n}, got n={g.n}")
    return _elimination_width_dp(g)[0] if g.n else -1
