"""Maximal-clique containment oracle built from a zeta transform.

After ``O*(2^n)`` preprocessing, ``query(S)`` answers in O(1) whether ``S``
contains a clique that is maximal in the ground graph.  The count table is
``h = g * c`` (subset convolution) where ``g`` indicates maximal cliques and
``c`` is identically one; with ``c == 1`` that product is the plain zeta
transform of ``g``, which is what ``build_oracle`` computes.  The general
ranked subset convolution is provided for cross-checking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GuardError, maximal_clique_masks, popcount

MAX_CONVOLUTION_BITS = 20
MAX_ORACLE_BITS = 26
_INT64_MAX = np.iinfo(np.int64).max


def zeta_transform(a: np.ndarray) -> np.ndarray:
    """``out[S] = sum(a[T] for T subset of S)``."""
    out = np.array(a, dtype=np.int64, copy=True)
    m = out.size.bit_length() - 1
    for i in range(m):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return out


def mobius_transform(a: np.ndarray) -> np.ndarray:
    """Inverse of ``zeta_transform``."""
    out = np.array(a, dtype=np.int64, copy=True)
    m = out.size.bit_length() - 1
    for i in range(m):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]
    return out


def _check_size(a, b) -> int:
    if len(a) != len(b):
        raise ValueError("operands must have equal length")
    size = len(a)
    m = size.bit_length() - 1
    if size != 1 << m:
        raise ValueError("operand length must be a power of two")
    if m > MAX_CONVOLUTION_BITS:
        raise GuardError("clique-oracle", f"subset convolution limited to m <= {MAX_CONVOLUTION_BITS}, got {m}")
    return m


def subset_convolution(a, b) -> np.ndarray:
    """``out[S] = sum over T subset of S of a[T] * b[S - T]``, via ranked transforms.

    Uses O(2^m m^2) arithmetic.  Raises OverflowError when int64 intermediates
    could overflow.
    """
    m = _check_size(a, b)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if (a < 0).any() or (b < 0).any():
        raise ValueError("entries must be nonnegative")
    sa, sb = int(a.sum()), int(b.sum())
    # zeta values <= sum, ranked products <= (m+1) sum_a sum_b, Mobius partials <= 2^m times that
    if sa * sb * (m + 1) << m > _INT64_MAX:
        raise OverflowError("subset convolution would overflow 64-bit intermediates")
    size = 1 << m
    rank = np.array([popcount(s) for s in range(size)], dtype=np.int64)
    fa = np.zeros((m + 1, size), dtype=np.int64)
    fb = np.zeros((m + 1, size), dtype=np.int64)
    for r in range(m + 1):
        fa[r] = zeta_transform(np.where(rank == r, a, 0))
        fb[r] = zeta_transform(np.where(rank == r, b, 0))
    out = np.zeros(size, dtype=np.int64)
    for r in range(m + 1):
        prod = np.zeros(size, dtype=np.int64)
        for i in range(r + 1):
            prod += fa[i] * fb[r - i]
        out = np.where(rank == r, mobius_transform(prod), out)
    return out


def naive_subset_convolution(a, b) -> list[int]:
    """O(3^m) reference enumeration over submasks."""
    size = len(a)
    out = [0] * size
    for s in range(size):
        t = s
        while True:
            out[s] += int(a[t]) * int(b[s ^ t])
            if t == 0:
                break
            t = (t - 1) & s
    return out


@dataclass(frozen=True)
class CliqueOracle:
    """Containment oracle over the subsets of an ``m``-element ground set.

    ``counts[X]`` is the number of family members contained in ``X``;
    ``answers[X]`` is ``counts[X] >= 1``.
    """

    m: int
    counts: np.ndarray
    answers: np.ndarray
    ground: Graph | None = None

    def query(self, s: int) -> bool:
        if s < 0 or s >> self.m:
            raise ValueError(f"set {s:#x} is not a subset of the {self.m}-element ground set")
        return bool(self.answers[s])


def containment_oracle(m: int, family: list[int]) -> CliqueOracle:
    """Oracle answering whether a subset of ``0..m-1`` contains a member of ``family``."""
    if m > MAX_ORACLE_BITS:
        raise GuardError("clique-oracle", f"oracle limited to {MAX_ORACLE_BITS} vertices, got {m}")
    g = np.zeros(1 << m, dtype=np.int64)
    for f in family:
        g[f] = 1
    h = zeta_transform(g)
    return CliqueOracle(m, h, h >= 1)


def maximal_clique_indicator(g: Graph) -> np.ndarray:
    ind = np.zeros(1 << g.n, dtype=np.int64)
    for c in maximal_clique_masks(g):
        ind[c] = 1
    return ind


def build_oracle(g: Graph) -> CliqueOracle:
    """Oracle for "does S contain a clique that is maximal in g"."""
    if g.n > MAX_ORACLE_BITS:
        raise GuardError("clique-oracle", f"oracle limited to {MAX_ORACLE_BITS} vertices, got {g.n}")
    o = containment_oracle(g.n, maximal_clique_masks(g))
    return CliqueOracle(o.m, o.counts, o.answers, g)


def query(o: CliqueOracle, s) -> bool:
    """``s`` is a bitmask or an iterable of ground-vertex indices."""
    if not isinstance(s, (int, np.integer)):
        mask = 0
        for v in s:
            mask |= 1 << v
        s = mask
    return o.query(int(s))
