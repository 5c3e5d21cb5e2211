"""Graph families and reduction gadgets used as benchmarks and structural checks."""
from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass, field

from .graph import Graph, has_triangle, iter_clique_colorings
from .treedecomp import TreeDecomposition

MAX_MYCIELSKI_P = 7
MAX_GADGET_Q = 4


@dataclass(frozen=True)
class LabeledGraph:
    graph: Graph
    labels: dict[int, str] = field(default_factory=dict)

    def vertex(self, label: str) -> int:
        for v, lab in self.labels.items():
            if lab == label:
                return v
        raise KeyError(label)

    def with_label(self, prefix: str) -> list[int]:
        return sorted(v for v, lab in self.labels.items() if lab.startswith(prefix))


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for cl in self.clauses:
            if not cl:
                raise ValueError("empty clause")
            vars_ = [abs(l) for l in cl]
            if 0 in vars_ or max(vars_) > self.num_vars:
                raise ValueError(f"literal out of range in clause {cl}")
            if len(set(vars_)) != len(vars_):
                raise ValueError(f"variable repeated in clause {cl}")

    def nae_satisfiable(self) -> bool:
        for bits in itertools.product((False, True), repeat=self.num_vars):
            if all(self._nae(cl, bits) for cl in self.clauses):
                return True
        return False

    @staticmethod
    def _nae(clause, bits) -> bool:
        vals = {bits[abs(l) - 1] == (l > 0) for l in clause}
        return vals == {True, False}


@dataclass(frozen=True)
class ListColoringInstance:
    graph: Graph
    lists: tuple[frozenset[int], ...]
    q: int

    def __post_init__(self):
        if len(self.lists) != self.graph.n:
            raise ValueError("one list per vertex required")
        for v, lst in enumerate(self.lists):
            if not lst or not lst <= set(range(1, self.q + 1)):
                raise ValueError(f"list of vertex {v} must be a nonempty subset of 1..{self.q}")

    def list_colorable(self) -> bool:
        g = self.graph
        for colors in iter_clique_colorings(g, self.q, proper=True):
            if all(colors[v] in self.lists[v] for v in range(g.n)):
                return True
        return False


# -- standard families ------------------------------------------------------


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("paths need n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete graphs need n >= 1")
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def random_graph(n: int, p: float, seed: int) -> Graph:
    """G(n, p) drawn with ``random.Random(seed)`` (Mersenne Twister), pairs in lexicographic order."""
    if n < 1 or not 0.0 <= p <= 1.0:
        raise ValueError("need n >= 1 and 0 <= p <= 1")
    rng = random.Random(seed)
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def standard_graphs(kind: str, n: int, p: float = 0.5, seed: int = 0) -> Graph:
    if kind == "cycle":
        return cycle(n)
    if kind == "path":
        return path(n)
    if kind == "complete":
        return complete(n)
    if kind == "random":
        return random_graph(n, p, seed)
    raise ValueError(f"unknown family {kind!r}")


def random_partial_ktree(n: int, k: int, p: float, seed: int) -> tuple[Graph, TreeDecomposition]:
    """Random k-tree on n vertices with each edge kept with probability p, plus its width-k decomposition."""
    if n < k + 1:
        raise ValueError("need n >= k + 1")
    rng = random.Random(seed)
    bags = [frozenset(range(k + 1))]
    edges = set(itertools.combinations(range(k + 1), 2))
    cliques = [tuple(range(k + 1))]
    tree_edges = []
    for v in range(k + 1, n):
        host = rng.randrange(len(bags))
        base = list(cliques[host])
        drop = rng.randrange(k + 1)
        sep = base[:drop] + base[drop + 1 :]
        edges.update((u, v) for u in sep)
        cliques.append(tuple(sep + [v]))
        bags.append(frozenset(sep + [v]))
        tree_edges.append((host, len(bags) - 1))
    kept = [e for e in sorted(edges) if rng.random() < p]
    return Graph.from_edges(n, kept), TreeDecomposition(tuple(bags), tuple(tree_edges))


# -- Mycielski graphs ---------------------------------------------------------


def mycielski(p: int) -> Graph:
    """M_2 = K_2; M_p adds a shadow u_i of each v_i (adjacent to N(v_i)) and a hub w on all shadows."""
    if not 2 <= p <= MAX_MYCIELSKI_P:
        raise ValueError(f"p must be in 2..{MAX_MYCIELSKI_P}")
    n, edges = 2, [(0, 1)]
    for _ in range(p - 2):
        new = list(edges)
        for a, b in edges:
            new.append((a, n + b))
            new.append((b, n + a))
        new.extend((n + i, 2 * n) for i in range(n))
        n, edges = 2 * n + 1, new
    return Graph.from_edges(n, edges)


def mycielski_minus(p: int) -> tuple[Graph, tuple[int, int]]:
    """M_p without its lexicographically smallest edge ``(x, y)``, ``x < y``."""
    g = mycielski(p)
    x, y = min(g.edges())
    return Graph.from_edges(g.n, [e for e in g.edges() if e != (x, y)]), (x, y)


def color_selection_gadget(q: int) -> LabeledGraph:
    """q copies of M'_{q+1}; in copy i, y_i is replaced by false twins y_{i,j} (j != i).

    Twins y_{i,j} and y_{j,i} are joined.  Within copy i the surviving
    Mycielski vertices keep their order and the twins follow, ascending in j.
    """
    if not 2 <= q <= MAX_GADGET_Q:
        raise ValueError(f"q must be in 2..{MAX_GADGET_Q}")
    base, (x, y) = mycielski_minus(q + 1)
    keep = [v for v in range(base.n) if v != y]
    y_nbrs = base.neighbors(y)
    edges = []
    labels = {}
    twin = {}
    offset = 0
    for i in range(1, q + 1):
        pos = {v: offset + idx for idx, v in enumerate(keep)}
        edges.extend((pos[a], pos[b]) for a, b in base.edges() if y not in (a, b))
        labels[pos[x]] = f"x_{i}"
        nxt = offset + len(keep)
        for j in range(1, q + 1):
            if j == i:
                continue
            twin[i, j] = nxt
            labels[nxt] = f"y_{i}_{j}"
            edges.extend((nxt, pos[u]) for u in y_nbrs)
            nxt += 1
        offset = nxt
    for i in range(1, q + 1):
        for j in range(i + 1, q + 1):
            edges.append((twin[i, j], twin[j, i]))
    return LabeledGraph(Graph.from_edges(offset, edges), labels)


def color_selection_coloring(q: int) -> tuple[int, ...]:
    """Proper q-coloring of H_q with x_i and every y_{i,j} coloured i.

    Per copy: find a (q)-coloring of M'_{q+1}, then permute colours so x gets colour i.
    """
    base, (x, y) = mycielski_minus(q + 1)
    colors = next(iter_clique_colorings(base, q, proper=True), None)
    if colors is None or colors[x] != colors[y]:
        raise RuntimeError("M'_{q+1} lacks the expected coloring")
    h = color_selection_gadget(q)
    keep = [v for v in range(base.n) if v != y]
    out = []
    for i in range(1, q + 1):
        # transposition swapping colours[x] and i
        perm = {c: c for c in range(1, q + 1)}
        perm[colors[x]], perm[i] = i, colors[x]
        out.extend(perm[colors[v]] for v in keep)
        out.extend(i for j in range(1, q + 1) if j != i)
    assert len(out) == h.graph.n
    return tuple(out)


# -- reduction gadgets --------------------------------------------------------


def naesat_gadget(phi: CnfFormula) -> LabeledGraph:
    """2-clique-coloring instance of an NAE-SAT formula.

    Vertices: variables ``0..n-1``, then per clause its path (a, a', [b',] b),
    then hubs u, v.  A clause whose literals share one sign is monotone and
    gets a 4-vertex path with both ends on all its variables; otherwise a
    3-vertex path with a on the positive and b on the negative variables.
    Each such variable set is made a clique.
    """
    n = phi.num_vars
    edges = set()
    labels = {i: f"var_{i + 1}" for i in range(n)}
    nxt = n

    def clique(vs):
        edges.update(itertools.combinations(sorted(vs), 2))

    for ci, clause in enumerate(phi.clauses, start=1):
        pos = [l - 1 for l in clause if l > 0]
        neg = [-l - 1 for l in clause if l < 0]
        monotone = not pos or not neg
        names = ["a", "a'", "b'", "b"] if monotone else ["a", "a'", "b"]
        verts = list(range(nxt, nxt + len(names)))
        nxt += len(names)
        for name, v in zip(names, verts):
            labels[v] = f"{name}_{ci}"
        edges.update(zip(verts, verts[1:]))
        a, b = verts[0], verts[-1]
        if monotone:
            vs = pos + neg
            clique(vs)
            edges.update((u, a) for u in vs)
            edges.update((u, b) for u in vs)
        else:
            clique(pos)
            clique(neg)
            edges.update((u, a) for u in pos)
            edges.update((u, b) for u in neg)
    u, v = nxt, nxt + 1
    labels[u], labels[v] = "u", "v"
    edges.add((u, v))
    edges.update((i, u) for i in range(n))
    edges.update((i, v) for i in range(n))
    return LabeledGraph(Graph.from_edges(nxt + 2, sorted(edges)), labels)


def is_monotone(clause) -> bool:
    return all(l > 0 for l in clause) or all(l < 0 for l in clause)


def listcol_gadget(inst: ListColoringInstance) -> LabeledGraph:
    """q-clique-coloring instance of a triangle-free list-coloring instance.

    Vertices: the input graph, then H_q, then pendants v_j (for j not in
    L(v)) per vertex in order; v_j sees v and every x_l with l != j.
    """
    q = inst.q
    g = inst.graph
    if has_triangle(g):
        warnings.warn("list-coloring gadget equivalence holds only for triangle-free inputs", stacklevel=2)
    h = color_selection_gadget(q)
    off = g.n
    edges = list(g.edges())
    edges.extend((off + a, off + b) for a, b in h.graph.edges())
    labels = {v: f"g_{v + 1}" for v in range(g.n)}
    labels.update({off + v: lab for v, lab in h.labels.items()})
    x = {i: off + h.vertex(f"x_{i}") for i in range(1, q + 1)}
    nxt = off + h.graph.n
    for v in range(g.n):
        for j in range(1, q + 1):
            if j in inst.lists[v]:
                continue
            labels[nxt] = f"p_{v + 1}_{j}"
            edges.append((v, nxt))
            edges.extend((nxt, x[l]) for l in range(1, q + 1) if l != j)
            nxt += 1
    return LabeledGraph(Graph.from_edges(nxt, edges), labels)
