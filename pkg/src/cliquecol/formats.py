"""Line-oriented text formats (1-based vertices and node ids; ``c`` starts a comment).

graph     ``p cc n m`` (or ``p tw n m``) then m lines ``u v``
td        ``s td N W+1 n``, ``b i v1 v2 ...`` per bag, then N-1 lines ``i j``
bd        ``s bd N n``, ``root i``, ``leaf i v``, ``edge i j``
coloring  ``v c`` per vertex (an optional leading ``YES`` line is skipped)
cnf       DIMACS ``p cnf n m`` with zero-terminated clauses
lists     ``v c1 c2 ...`` per vertex
labels    ``label v role``
"""
from __future__ import annotations

from .branchdecomp import BranchDecomposition
from .gadgets import CnfFormula
from .graph import Coloring, Graph
from .treedecomp import NiceTreeDecomposition, TreeDecomposition


class ParseError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield no, line.split()


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"line {no}: expected an integer, got {tok!r}") from None


def parse_graph(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen = set()
    for no, tok in _lines(text):
        if tok[0] == "p":
            if n is not None:
                raise ParseError(f"line {no}: second header")
            if len(tok) != 4 or tok[1] not in ("cc", "tw"):
                raise ParseError(f"line {no}: malformed header, expected 'p cc n m'")
            n, m = _int(tok[2], no), _int(tok[3], no)
            if n < 0 or m < 0:
                raise ParseError(f"line {no}: negative counts")
            continue
        if n is None:
            raise ParseError(f"line {no}: edge before header")
        if len(tok) != 2:
            raise ParseError(f"line {no}: expected 'u v'")
        u, v = _int(tok[0], no), _int(tok[1], no)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"line {no}: vertex out of range 1..{n}")
        if u == v:
            raise ParseError(f"line {no}: self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"line {no}: duplicate edge {key[0]} {key[1]}")
        seen.add(key)
        edges.append((u - 1, v - 1))
    if n is None:
        raise ParseError("missing header")
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def emit_graph(g: Graph) -> str:
    edges = g.edges()
    out = [f"p cc {g.n} {len(edges)}"]
    out.extend(f"{u + 1} {v + 1}" for u, v in edges)
    return "\n".join(out) + "\n"


def _check_tree(num: int, edges: list[tuple[int, int]], what: str) -> None:
    if len(edges) != num - 1:
        raise ParseError(f"{what}: {num} nodes need {num - 1} tree edges, found {len(edges)}")
    adj: list[list[int]] = [[] for _ in range(num)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != num:
        raise ParseError(f"{what}: edges do not form a tree")


def parse_td(text: str, g: Graph | None = None) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for no, tok in _lines(text):
        if tok[0] == "s":
            if len(tok) != 5 or tok[1] != "td":
                raise ParseError(f"line {no}: malformed header, expected 's td N W n'")
            header = tuple(_int(x, no) for x in tok[2:])
            continue
        if header is None:
            raise ParseError(f"line {no}: content before header")
        num, _, nv = header
        if g is not None and nv != g.n:
            raise ParseError(f"line {no}: decomposition is for {nv} vertices, graph has {g.n}")
        if tok[0] == "b":
            if len(tok) < 2:
                raise ParseError(f"line {no}: bag line needs an id")
            i = _int(tok[1], no)
            if not 1 <= i <= num or i in bags:
                raise ParseError(f"line {no}: bad or repeated bag id {i}")
            vs = [_int(x, no) for x in tok[2:]]
            for v in vs:
                if not 1 <= v <= nv:
                    raise ParseError(f"line {no}: vertex {v} out of range 1..{nv}")
            bags[i] = frozenset(v - 1 for v in vs)
        else:
            if len(tok) != 2:
                raise ParseError(f"line {no}: expected tree edge 'i j'")
            a, b = _int(tok[0], no), _int(tok[1], no)
            if not (1 <= a <= num and 1 <= b <= num) or a == b:
                raise ParseError(f"line {no}: bad tree edge {a} {b}")
            edges.append((a - 1, b - 1))
    if header is None:
        raise ParseError("missing header")
    num = header[0]
    if len(bags) != num:
        raise ParseError(f"header declares {num} bags, found {len(bags)}")
    _check_tree(num, edges, "td")
    return TreeDecomposition(tuple(bags[i] for i in range(1, num + 1)), tuple(edges))


def emit_td(td: TreeDecomposition, n: int, kinds: NiceTreeDecomposition | None = None) -> str:
    out = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    if kinds is not None:
        for i, x in enumerate(kinds.nodes, start=1):
            extra = f" {x.vertex + 1}" if x.vertex is not None else ""
            out.append(f"c kind {i} {x.kind}{extra}")
        out.append(f"c root {kinds.root + 1}")
    for i, b in enumerate(td.bags, start=1):
        out.append(" ".join(["b", str(i), *(str(v + 1) for v in sorted(b))]))
    out.extend(f"{a + 1} {b + 1}" for a, b in sorted(tuple(sorted(e)) for e in td.edges))
    return "\n".join(out) + "\n"


def parse_bd(text: str, g: Graph | None = None) -> BranchDecomposition:
    header = None
    root = None
    leaf: dict[int, int] = {}
    edges = []
    for no, tok in _lines(text):
        if tok[0] == "s":
            if len(tok) != 4 or tok[1] != "bd":
                raise ParseError(f"line {no}: malformed header, expected 's bd N n'")
            header = (_int(tok[2], no), _int(tok[3], no))
            if g is not None and header[1] != g.n:
                raise ParseError(f"line {no}: decomposition is for {header[1]} vertices, graph has {g.n}")
            continue
        if header is None:
            raise ParseError(f"line {no}: content before header")
        num, nv = header

        def node(tokv: str) -> int:
            i = _int(tokv, no)
            if not 1 <= i <= num:
                raise ParseError(f"line {no}: node {i} out of range 1..{num}")
            return i - 1

        if tok[0] == "root" and len(tok) == 2:
            root = node(tok[1])
        elif tok[0] == "leaf" and len(tok) == 3:
            i, v = node(tok[1]), _int(tok[2], no)
            if not 1 <= v <= nv:
                raise ParseError(f"line {no}: vertex {v} out of range 1..{nv}")
            if i in leaf:
                raise ParseError(f"line {no}: node {i + 1} already holds a vertex")
            leaf[i] = v - 1
        elif tok[0] == "edge" and len(tok) == 3:
            a, b = node(tok[1]), node(tok[2])
            if a == b:
                raise ParseError(f"line {no}: loop edge")
            edges.append((a, b))
        else:
            raise ParseError(f"line {no}: unrecognised line {' '.join(tok)!r}")
    if header is None or root is None:
        raise ParseError("missing header or root line")
    num = header[0]
    _check_tree(num, edges, "bd")
    adj: list[list[int]] = [[] for _ in range(num)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    children: list[tuple[int, ...]] = [()] * num
    stack, seen = [root], {root}
    while stack:
        x = stack.pop()
        kids = sorted(y for y in adj[x] if y not in seen)
        children[x] = tuple(kids)
        seen.update(kids)
        stack.extend(kids)
    return BranchDecomposition(tuple(children), tuple(leaf.get(i) for i in range(num)), root)


def emit_bd(bd: BranchDecomposition, n: int) -> str:
    out = [f"s bd {bd.num_nodes} {n}", f"root {bd.root + 1}"]
    for i, v in enumerate(bd.leaf_vertex):
        if v is not None:
            out.append(f"leaf {i + 1} {v + 1}")
    for i, kids in enumerate(bd.children):
        out.extend(f"edge {i + 1} {c + 1}" for c in kids)
    return "\n".join(out) + "\n"


def parse_coloring(text: str, n: int, k: int | None = None) -> Coloring:
    colors: dict[int, int] = {}
    for no, tok in _lines(text):
        if len(tok) == 1 and tok[0] in ("YES", "NO"):
            continue
        if len(tok) != 2:
            raise ParseError(f"line {no}: expected 'vertex colour'")
        v, c = _int(tok[0], no), _int(tok[1], no)
        if not 1 <= v <= n:
            raise ParseError(f"line {no}: vertex {v} out of range 1..{n}")
        if v in colors:
            raise ParseError(f"line {no}: vertex {v} coloured twice")
        if c < 1:
            raise ParseError(f"line {no}: colours are positive integers")
        colors[v] = c
    missing = [v for v in range(1, n + 1) if v not in colors]
    if missing:
        raise ParseError(f"vertex {missing[0]} has no colour")
    values = tuple(colors[v] for v in range(1, n + 1))
    if k is None:
        k = max(values, default=1)
    elif max(values, default=1) > k:
        raise ParseError(f"colour {max(values)} exceeds k={k}")
    return Coloring(values, k)


def emit_coloring(c: Coloring) -> str:
    return "".join(f"{v} {col}\n" for v, col in enumerate(c.colors, start=1))


def parse_cnf(text: str) -> CnfFormula:
    header = None
    clauses = []
    current: list[int] = []
    for no, tok in _lines(text):
        if tok[0] == "p":
            if len(tok) != 4 or tok[1] != "cnf":
                raise ParseError(f"line {no}: malformed header, expected 'p cnf n m'")
            header = (_int(tok[2], no), _int(tok[3], no))
            continue
        if header is None:
            raise ParseError(f"line {no}: clause before header")
        for x in tok:
            lit = _int(x, no)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing header")
    if current:
        raise ParseError("last clause is not zero-terminated")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    try:
        return CnfFormula(header[0], tuple(clauses))
    except ValueError as e:
        raise ParseError(str(e)) from None


def emit_cnf(phi: CnfFormula) -> str:
    out = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    out.extend(" ".join(map(str, (*cl, 0))) for cl in phi.clauses)
    return "\n".join(out) + "\n"


def parse_lists(text: str, n: int) -> list[frozenset[int]]:
    lists: dict[int, frozenset[int]] = {}
    for no, tok in _lines(text):
        v = _int(tok[0], no)
        if not 1 <= v <= n or v in lists:
            raise ParseError(f"line {no}: bad or repeated vertex {v}")
        lists[v] = frozenset(_int(x, no) for x in tok[1:])
    missing = [v for v in range(1, n + 1) if v not in lists]
    if missing:
        raise ParseError(f"vertex {missing[0]} has no list")
    return [lists[v] for v in range(1, n + 1)]


def emit_labels(labels: dict[int, str]) -> str:
    return "".join(f"label {v + 1} {labels[v]}\n" for v in sorted(labels))
