"""Graphs, maximal cliques, clique-coloring checks and exhaustive solvers.

Vertices are dense indices ``0..n-1``; vertex sets are Python ints used as
bitsets (bit ``v`` set iff ``v`` is a member).  Python ints are unbounded, so
the same representation serves any ``n``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class GuardError(RuntimeError):
    """A configurable size guard was exceeded."""

    def __init__(self, module: str, message: str):
        super().__init__(f"[{module}] {message}")
        self.module = module


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with neighbour bitsets."""

    n: int
    nbr: tuple[int, ...]

    def __post_init__(self):
        if len(self.nbr) != self.n:
            raise ValueError("neighbour table length differs from n")
        full = (1 << self.n) - 1
        for v, m in enumerate(self.nbr):
            if m & ~full:
                raise ValueError(f"vertex {v} has an out-of-range neighbour")
            if m >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            for u in members(m):
                if not self.nbr[u] >> v & 1:
                    raise ValueError(f"asymmetric adjacency between {v} and {u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        nbr = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        return cls(n, tuple(nbr))

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in members(self.nbr[u]) if u < v]

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(members(self.nbr[v]))

    def degree(self, v: int) -> int:
        return popcount(self.nbr[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.nbr[u] >> v & 1)

    def is_clique(self, mask: int) -> bool:
        for v in members(mask):
            if (mask & ~(1 << v)) & ~self.nbr[v]:
                return False
        return True

    def common_neighbors(self, mask: int) -> int:
        """Vertices outside ``mask`` adjacent to every member of ``mask``."""
        common = self.all_mask & ~mask
        for v in members(mask):
            common &= self.nbr[v]
        return common

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Subgraph induced by ``vertices``, relabelled in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        return Graph.from_edges(
            len(vertices),
            [(pos[u], pos[v]) for u in vertices for v in members(self.nbr[u]) if v in pos and pos[u] < pos[v]],
        )


@dataclass(frozen=True)
class Coloring:
    """Total map vertex -> colour in ``1..k``; classes may be empty."""

    colors: tuple[int, ...]
    k: int

    def __post_init__(self):
        for v, c in enumerate(self.colors):
            if not 1 <= c <= self.k:
                raise ValueError(f"vertex {v} has colour {c} outside 1..{self.k}")

    def classes(self) -> list[int]:
        out = [0] * self.k
        for v, c in enumerate(self.colors):
            out[c - 1] |= 1 << v
        return out


def _bron_kerbosch(nbr: Sequence[int], r: int, p: int, x: int, out: list[int]) -> None:
    if not p and not x:
        out.append(r)
        return
    # pivot: vertex of P | X with most neighbours in P
    pivot = max(members(p | x), key=lambda u: popcount(p & nbr[u]))
    for v in members(p & ~nbr[pivot]):
        bit = 1 << v
        _bron_kerbosch(nbr, r | bit, p & nbr[v], x & nbr[v], out)
        p &= ~bit
        x |= bit


def _canonical(mask: int) -> tuple[int, ...]:
    return tuple(members(mask))


def maximal_clique_masks(g: Graph) -> list[int]:
    """Bitmasks of all maximal cliques, ordered by sorted vertex tuple.

    The empty graph has no maximal cliques.
    """
    if g.n == 0:
        return []
    out: list[int] = []
    _bron_kerbosch(g.nbr, 0, g.all_mask, 0, out)
    return sorted(out, key=_canonical)


def maximal_cliques_containing(g: Graph, v: int) -> list[int]:
    """Maximal cliques of ``g`` that contain ``v`` (as bitmasks)."""
    out: list[int] = []
    _bron_kerbosch(g.nbr, 1 << v, g.nbr[v], 0, out)
    return sorted(out, key=_canonical)


def maximal_cliques(g: Graph) -> list[frozenset[int]]:
    return [frozenset(members(m)) for m in maximal_clique_masks(g)]


def _as_colors(g: Graph, c: Coloring | Sequence[int]) -> tuple[int, ...]:
    colors = tuple(c.colors) if isinstance(c, Coloring) else tuple(c)
    if len(colors) != g.n:
        raise ValueError(f"coloring covers {len(colors)} vertices, graph has {g.n}")
    return colors


def _monochromatic(mask: int, colors: Sequence[int]) -> bool:
    vs = members(mask)
    first = colors[vs[0]]
    return all(colors[v] == first for v in vs)


def is_clique_coloring(g: Graph, c: Coloring | Sequence[int], cliques: list[int] | None = None) -> bool:
    """True iff no maximal clique of ``g`` is monochromatic under ``c``."""
    colors = _as_colors(g, c)
    if cliques is None:
        cliques = maximal_clique_masks(g)
    return not any(_monochromatic(m, colors) for m in cliques)


def is_proper_coloring(g: Graph, c: Coloring | Sequence[int]) -> bool:
    colors = _as_colors(g, c)
    return all(colors[u] != colors[v] for u, v in g.edges())


def brute_force_solve(g: Graph, k: int, max_n: int = 12) -> Coloring | None:
    """Exhaustive search over all k-colorings with vertex 0 fixed to colour 1.

    Returns the lexicographically first clique coloring in that order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if g.n > max_n:
        raise GuardError("graph-core", f"brute force limited to n <= {max_n}, got n={g.n}")
    if g.n == 0:
        return Coloring((), k)
    cliques = maximal_clique_masks(g)
    for rest in itertools.product(range(1, k + 1), repeat=g.n - 1):
        colors = (1,) + rest
        if is_clique_coloring(g, colors, cliques):
            return Coloring(colors, k)
    return None


def _search_order(g: Graph) -> list[int]:
    # each next vertex: most neighbours already placed, then highest degree, then lowest index
    order: list[int] = []
    placed = 0
    remaining = set(range(g.n))
    while remaining:
        v = max(remaining, key=lambda u: (popcount(g.nbr[u] & placed), g.degree(u), -u))
        order.append(v)
        placed |= 1 << v
        remaining.remove(v)
    return order


def iter_clique_colorings(
    g: Graph,
    k: int,
    *,
    proper: bool = False,
    same: Iterable[tuple[int, int]] = (),
    differ: Iterable[tuple[int, int]] = (),
    break_symmetry: bool = False,
) -> Iterator[tuple[int, ...]]:
    """Backtracking enumeration of clique colorings (or proper colorings).

    Every maximal clique (every edge, if ``proper``) is checked as soon as its
    last vertex in the search order is coloured.  ``same``/``differ`` add
    pairwise equality/inequality constraints.  With ``break_symmetry`` only
    colorings whose colours first appear in increasing order are produced.
    """
    if g.n == 0:
        yield ()
        return
    order = _search_order(g)
    rank = {v: i for i, v in enumerate(order)}
    constraints = maximal_clique_masks(g) if not proper else [mask_of(e) for e in g.edges()]
    checks: list[list[int]] = [[] for _ in range(g.n)]
    for m in constraints:
        last = max(members(m), key=rank.__getitem__)
        checks[rank[last]].append(m)
    pairs: list[list[tuple[int, bool]]] = [[] for _ in range(g.n)]
    for (a, b), eq in itertools.chain(((p, True) for p in same), ((p, False) for p in differ)):
        if rank[a] < rank[b]:
            a, b = b, a
        pairs[rank[a]].append((b, eq))

    colors = [0] * g.n

    def rec(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if i == g.n:
            yield tuple(colors)
            return
        v = order[i]
        top = min(k, used + 1) if break_symmetry else k
        for c in range(1, top + 1):
            colors[v] = c
            if any((colors[u] == c) != eq for u, eq in pairs[i]):
                continue
            if any(_monochromatic(m, colors) for m in checks[i]):
                continue
            yield from rec(i + 1, max(used, c))
        colors[v] = 0

    yield from rec(0, 0)


def search_solve(g: Graph, k: int, *, proper: bool = False) -> Coloring | None:
    """Exact backtracking solver for larger instances than brute force allows."""
    for colors in iter_clique_colorings(g, k, proper=proper, break_symmetry=True):
        return Coloring(colors, k)
    return None


def chromatic_number(g: Graph) -> int:
    k = 0 if g.n == 0 else 1
    while search_solve(g, k, proper=True) is None:
        k += 1
    return k


def components(g: Graph) -> list[int]:
    seen = 0
    out = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        comp = frontier = 1 << v
        while frontier:
            nxt = 0
            for u in members(frontier):
                nxt |= g.nbr[u]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(comp)
    return out


def forest_shape(g: Graph) -> str:
    """One of ``not_forest``, ``linear_forest``, ``caterpillar_forest``, ``other_forest``."""
    comps = components(g)
    if len(g.edges()) != g.n - len(comps):
        return "not_forest"
    if all(g.degree(v) <= 2 for v in range(g.n)):
        return "linear_forest"
    # a tree is a caterpillar iff deleting its leaves leaves a path
    spine = [v for v in range(g.n) if g.degree(v) >= 2]
    for v in spine:
        if sum(1 for u in members(g.nbr[v]) if g.degree(u) >= 2) > 2:
            return "other_forest"
    return "caterpillar_forest"


def has_triangle(g: Graph) -> bool:
    return any(g.nbr[u] & g.nbr[v] for u, v in g.edges())
