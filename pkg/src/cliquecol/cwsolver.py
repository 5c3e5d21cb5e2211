"""k-clique-coloring by dynamic programming over a rooted branch decomposition.

State hierarchy, bottom to top:

* a *potentially bad clique* for a colour class ``C`` at node ``t`` is a
  nonempty clique ``X`` inside ``C`` that is maximal within the union of the
  ``t``-classes it touches;
* its *profile* is ``(insiders, outsiders)``: the touched classes, and the
  untouched classes holding a vertex complete to ``X``;
* the *type* of ``C`` is the set of profiles of its potentially bad cliques;
* the *signature* of a coloring counts colour classes per type.

Profiles, types and signatures are sorted tuples so equality is structural.
Classes are referred to by their minimum vertex.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .branchdecomp import BranchDecomposition, DecomposedGraph, Operator
from .graph import Coloring, Graph, GuardError, members

MAX_SIGNATURES = 10**6


class Profile(NamedTuple):
    insiders: tuple[int, ...]
    outsiders: tuple[int, ...]


CType = tuple  # sorted tuple of Profiles
Signature = tuple  # sorted tuple of (CType, count) with count > 0

EMPTY_TYPE: CType = ()


def make_profile(insiders, outsiders) -> Profile:
    return Profile(tuple(sorted(insiders)), tuple(sorted(outsiders)))


def make_type(profiles) -> CType:
    return tuple(sorted(set(profiles)))


def make_signature(counts: dict) -> Signature:
    return tuple(sorted((t, c) for t, c in counts.items() if c))


# -- potentially bad cliques and profiles -----------------------------------


def _touched(dg: DecomposedGraph, t: int, x: int) -> list[int]:
    return [k for k, m in dg.class_masks(t).items() if m & x]


def is_pbc(dg: DecomposedGraph, t: int, x: int, c: int) -> bool:
    """``x`` (bitmask) is a potentially bad clique for ``c`` at node ``t``."""
    if not x or x & ~c or x & ~dg.vmask[t]:
        return False
    g = dg.g
    if not g.is_clique(x):
        return False
    cm = dg.class_masks(t)
    span = 0
    for k in _touched(dg, t, x):
        span |= cm[k]
    return not g.common_neighbors(x) & span


def profile_of(dg: DecomposedGraph, t: int, x: int, c: int) -> Profile:
    if not is_pbc(dg, t, x, c):
        raise ValueError("not a potentially bad clique for the given class")
    cm = dg.class_masks(t)
    inside = _touched(dg, t, x)
    complete = dg.g.common_neighbors(x)
    outside = [k for k, m in cm.items() if k not in inside and m & complete]
    return make_profile(inside, outside)


def all_profiles(keys: Sequence[int]) -> list[Profile]:
    """Every pair of disjoint class sets with nonempty first coordinate."""
    out = []
    m = len(keys)
    for assign in range(3**m):
        ins, outs = [], []
        a = assign
        for k in keys:
            a, d = divmod(a, 3)
            if d == 1:
                ins.append(k)
            elif d == 2:
                outs.append(k)
        if ins:
            out.append(make_profile(ins, outs))
    return sorted(out)


def ctype_of(dg: DecomposedGraph, t: int, c: int, max_size: int = 16) -> CType:
    """Reference type of colour class ``c``: enumerate every clique inside it."""
    c &= dg.vmask[t]
    verts = members(c)
    if len(verts) > max_size:
        raise GuardError("cw-solver", f"reference type enumeration limited to {max_size} vertices")
    profiles = set()
    g = dg.g
    # grow cliques by increasing vertex index
    stack = [(0, 0)]
    while stack:
        x, start = stack.pop()
        if x and is_pbc(dg, t, x, c):
            profiles.add(profile_of(dg, t, x, c))
        for i in range(start, len(verts)):
            v = verts[i]
            if g.nbr[v] & x == x:
                stack.append((x | 1 << v, i + 1))
    return make_type(profiles)


# -- operator-level combinators ---------------------------------------------


def bubble_buddies(op: Operator, s) -> frozenset[int]:
    out: set[int] = set()
    for k in s:
        out |= op.bubble[op.rho[k]]
    return frozenset(out)


def compatible(op: Operator, pr_r: Profile, pr_s: Profile) -> bool:
    """Insiders of both sides form a maximal biclique of H' (insiders plus outsider buddies)."""
    qr, qs = pr_r.insiders, pr_s.insiders
    if not qr or not qs:
        return False
    for a in qr:
        if op.side(a) != "r":
            raise ValueError("first profile must live on the r side")
    for b in qs:
        if op.side(b) != "s":
            raise ValueError("second profile must live on the s side")
    adj = op.adj
    if any(not adj[a].issuperset(qs) for a in qr):
        return False
    bb = bubble_buddies(op, qr + qs)
    if any(adj[p].issuperset(qs) for p in pr_r.outsiders if p in bb):
        return False
    if any(adj[p].issuperset(qr) for p in pr_s.outsiders if p in bb):
        return False
    return True


def _merge(op: Operator, qr, pr_out, qs, ps_out) -> Profile:
    bb = bubble_buddies(op, tuple(qr) + tuple(qs))
    ins = {op.rho[k] for k in qr} | {op.rho[k] for k in qs}
    outs = set()
    for own_out, other_in in ((pr_out, qs), (ps_out, qr)):
        for p in own_out:
            if p not in bb and op.adj[p].issuperset(other_in):
                outs.add(op.rho[p])
    return make_profile(ins, outs)


def merge_profile(op: Operator, pr_r: Profile, pr_s: Profile) -> Profile:
    if not compatible(op, pr_r, pr_s):
        raise ValueError("profiles are not compatible")
    return _merge(op, pr_r.insiders, pr_r.outsiders, pr_s.insiders, pr_s.outsiders)


def liftable(op: Operator, side: str, pr: Profile) -> bool:
    """A clique of one child stays potentially bad at the parent."""
    bb = bubble_buddies(op, pr.insiders)
    other = op.opposite(side)
    if any(k in bb and op.adj[k].issuperset(pr.insiders) for k in other):
        return False
    return not bb.intersection(pr.outsiders)


def lift_profile(op: Operator, side: str, pr: Profile) -> Profile:
    """Merge against the empty opposite clique, whose outsiders are all opposite classes."""
    if not liftable(op, side, pr):
        raise ValueError("profile is not liftable")
    other = op.opposite(side)
    if side == "r":
        return _merge(op, pr.insiders, pr.outsiders, (), other)
    return _merge(op, (), other, pr.insiders, pr.outsiders)


def merge_ctype(op: Operator, t_r: CType, t_s: CType) -> CType:
    out = set()
    for pr in t_r:
        for ps in t_s:
            if compatible(op, pr, ps):
                out.add(_merge(op, pr.insiders, pr.outsiders, ps.insiders, ps.outsiders))
    for side, tau in (("r", t_r), ("s", t_s)):
        for pr in tau:
            if liftable(op, side, pr):
                out.add(lift_profile(op, side, pr))
    return make_type(out)


# -- signatures and the merge skeleton --------------------------------------


@dataclass(frozen=True)
class MergeSkeleton:
    """Support types of a signature pair and merge-type labels on every pair."""

    left: tuple[CType, ...]
    right: tuple[CType, ...]
    label: dict[tuple[int, int], CType]


def merge_skeleton(op: Operator, sig_r: Signature, sig_s: Signature, memo: dict | None = None) -> MergeSkeleton:
    memo = {} if memo is None else memo
    left = tuple(t for t, _ in sig_r)
    right = tuple(t for t, _ in sig_s)
    label = {}
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            key = (a, b)
            if key not in memo:
                memo[key] = merge_ctype(op, a, b)
            label[i, j] = memo[key]
    return MergeSkeleton(left, right, label)


def enumerate_assignments(rows: Sequence[int], cols: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All nonnegative integer matrices with the given row and column sums.

    Cells are filled row-major, smallest value first; each matrix appears once.
    """
    if sum(rows) != sum(cols):
        raise ValueError(f"marginal mismatch: rows sum to {sum(rows)}, columns to {sum(cols)}")
    a, b = len(rows), len(cols)
    mat = [[0] * b for _ in range(a)]
    col_left = list(cols)

    def fill(i: int, j: int, row_left: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == a:
            yield tuple(tuple(r) for r in mat)
            return
        if j == b - 1:
            if row_left > col_left[j]:
                return
            mat[i][j] = row_left
            col_left[j] -= row_left
            if i + 1 < a:
                yield from fill(i + 1, 0, rows[i + 1])
            elif not any(col_left):
                yield tuple(tuple(r) for r in mat)
            col_left[j] += row_left
            return
        room_after = sum(col_left[j + 1 :])
        for x in range(max(0, row_left - room_after), min(row_left, col_left[j]) + 1):
            mat[i][j] = x
            col_left[j] -= x
            yield from fill(i, j + 1, row_left - x)
            col_left[j] += x
        mat[i][j] = 0

    if a == 0 or b == 0:
        if not rows and not cols:
            yield ()
        return
    yield from fill(0, 0, rows[0])


def signature_assignments(sig_r: Signature, sig_s: Signature, k: int):
    if sum(c for _, c in sig_r) != k or sum(c for _, c in sig_s) != k:
        raise ValueError("signatures must sum to k")
    return enumerate_assignments([c for _, c in sig_r], [c for _, c in sig_s])


def leaf_signature(v: int, k: int) -> Signature:
    counts = {(make_profile((v,), ()),): 1}
    if k > 1:
        counts[EMPTY_TYPE] = k - 1
    return make_signature(counts)


def root_signature(k: int) -> Signature:
    return ((EMPTY_TYPE, k),)


def coloring_signature(dg: DecomposedGraph, t: int, classes: Sequence[int]) -> Signature:
    """Signature of a coloring of ``G_t`` given as colour-class bitmasks (reference)."""
    return make_signature(Counter(ctype_of(dg, t, c) for c in classes))


# -- the dynamic program ----------------------------------------------------


@dataclass
class CwResult:
    answer: bool
    coloring: Coloring | None = None
    tables: dict[int, dict] | None = None
    table_sizes: dict[int, int] = field(default_factory=dict)


def internal_table(op: Operator, table_r: dict, table_s: dict, k: int, max_signatures: int = MAX_SIGNATURES) -> dict:
    """Attained signatures at an internal node, each with one witness ``(sig_r, sig_s, matrix)``."""
    memo: dict = {}
    out: dict = {}
    for sig_r in table_r:
        for sig_s in table_s:
            sk = merge_skeleton(op, sig_r, sig_s, memo)
            for mat in signature_assignments(sig_r, sig_s, k):
                counts: dict = defaultdict(int)
                for (i, j), lab in sk.label.items():
                    if mat[i][j]:
                        counts[lab] += mat[i][j]
                sig = make_signature(counts)
                if sig not in out:
                    out[sig] = (sig_r, sig_s, mat)
                    if len(out) > max_signatures:
                        raise GuardError(
                            "cw-solver",
                            f"node {op.node}: more than {max_signatures} attained signatures "
                            f"(support sizes {len(sig_r)}x{len(sig_s)})",
                        )
    return out


def solve_cw(
    g: Graph,
    bd: BranchDecomposition | None,
    k: int,
    want_certificate: bool = False,
    *,
    max_signatures: int = MAX_SIGNATURES,
    keep_tables: bool = False,
) -> CwResult:
    if k < 1:
        raise ValueError("k must be at least 1")
    if g.n == 0:
        return CwResult(True, Coloring((), k) if want_certificate else None)
    dg = DecomposedGraph(g, bd)
    tables: dict[int, dict] = {}
    sizes = {}
    for t in bd.postorder():
        if not bd.children[t]:
            tables[t] = {leaf_signature(bd.leaf_vertex[t], k): None}
        else:
            r, s = bd.children[t]
            tables[t] = internal_table(dg.operator(t), tables[r], tables[s], k, max_signatures)
            if not (want_certificate or keep_tables):
                del tables[r], tables[s]
        sizes[t] = len(tables[t])
    answer = root_signature(k) in tables[bd.root]
    coloring = reconstruct(dg, tables, k) if answer and want_certificate else None
    return CwResult(answer, coloring, tables if keep_tables else None, sizes)


def reconstruct(dg: DecomposedGraph, tables: dict, k: int) -> Coloring:
    """Top-down: distribute colour slots among child types following stored witnesses.

    Slots of equal type are interchangeable, so they are matched in ascending
    slot order.
    """
    bd = dg.bd
    colors = [0] * dg.g.n
    stack = [(bd.root, root_signature(k), [EMPTY_TYPE] * k)]
    while stack:
        t, sig, slots = stack.pop()
        if not bd.children[t]:
            v = bd.leaf_vertex[t]
            (slot,) = [i for i, ty in enumerate(slots) if ty != EMPTY_TYPE]
            colors[v] = slot + 1
            continue
        sig_r, sig_s, mat = tables[t][sig]
        op = dg.operator(t)
        pool: dict = defaultdict(list)
        for i, ty in enumerate(slots):
            pool[ty].append(i)
        slots_r: list = [None] * k
        slots_s: list = [None] * k
        for i, (ty_r, _) in enumerate(sig_r):
            for j, (ty_s, _) in enumerate(sig_s):
                lab = merge_ctype(op, ty_r, ty_s)
                for _ in range(mat[i][j]):
                    slot = pool[lab].pop(0)
                    slots_r[slot] = ty_r
                    slots_s[slot] = ty_s
        r, s = bd.children[t]
        stack.append((r, sig_r, slots_r))
        stack.append((s, sig_s, slots_s))
    return Coloring(tuple(colors), k)
