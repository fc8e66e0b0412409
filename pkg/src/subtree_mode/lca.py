"""Constant-time LCA and binary-lifting level ancestors over a fixed tree.

The LCA index is a sparse table over the preorder sequence. For
``pre(u) < pre(v)`` every node in the preorder slice ``(pre(u), pre(v)]``
lies in the subtree of ``LCA(u, v)`` and the child of the LCA on the path
to ``v`` is among them, so the minimum preorder position of their parents
is exactly ``pre(LCA(u, v))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import LeafColoredTree


@dataclass(frozen=True)
class LcaIndex:
    preorder: np.ndarray     # node at each preorder position
    position: np.ndarray     # preorder position of each node
    depth: np.ndarray
    table: np.ndarray        # table[j, k] = min parent position over preorder[k : k + 2**j]
    log2: np.ndarray


@dataclass(frozen=True)
class LevelAncestorIndex:
    jump: np.ndarray         # jump[j, v] = ancestor of v at distance 2**j (root saturates)
    depth: np.ndarray


def _floor_log2(n: int) -> np.ndarray:
    out = np.zeros(n + 1, np.int64)
    for j in range(1, int(n).bit_length()):
        out[1 << j :] += 1
    return out


def build_lca(t: LeafColoredTree) -> LcaIndex:
    n = t.n_nodes
    pos = t.preorder_position
    base = np.zeros(n, np.int32)
    base[1:] = pos[t.parent[t.preorder[1:]]]
    levels = max(1, int(n).bit_length())
    table = np.empty((levels, n), np.int32)
    table[0] = base
    for j in range(1, levels):
        half = 1 << (j - 1)
        table[j] = table[j - 1]
        np.minimum(table[j - 1][: n - half], table[j - 1][half:], out=table[j][: n - half])
    return LcaIndex(t.preorder, pos, t.depth, table, _floor_log2(n))


def lca(idx: LcaIndex, u: int, v: int) -> int:
    if u == v:
        return int(u)
    a, b = int(idx.position[u]), int(idx.position[v])
    if a > b:
        a, b = b, a
    a += 1
    j = int(idx.log2[b - a + 1])
    m = min(idx.table[j, a], idx.table[j, b - (1 << j) + 1])
    return int(idx.preorder[m])


def lca_many(idx: LcaIndex, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`lca` over paired node arrays."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    pu, pv = idx.position[us], idx.position[vs]
    lo = np.minimum(pu, pv) + 1
    hi = np.maximum(pu, pv)
    same = us == vs
    lo = np.where(same, hi, lo)
    j = idx.log2[hi - lo + 1]
    m = np.minimum(idx.table[j, lo], idx.table[j, hi - (1 << j) + 1])
    return np.where(same, us, idx.preorder[m])


def build_level_ancestor(t: LeafColoredTree) -> LevelAncestorIndex:
    n = t.n_nodes
    levels = max(1, int(t.depth.max()).bit_length())
    jump = np.empty((levels, n), np.int32)
    jump[0] = np.where(t.parent >= 0, t.parent, np.arange(n))
    for j in range(1, levels):
        jump[j] = jump[j - 1][jump[j - 1]]
    return LevelAncestorIndex(jump, t.depth)


def ancestor_at_depth(idx: LevelAncestorIndex, v: int, target: int) -> int:
    d = int(idx.depth[v]) - target
    if d < 0:
        raise ValueError("target depth below node")
    j = 0
    while d:
        if d & 1:
            v = int(idx.jump[j, v])
        d >>= 1
        j += 1
    return int(v)


def child_toward(idx: LevelAncestorIndex, v: int, descendant: int) -> int:
    """The child of ``v`` on the path down to ``descendant``."""
    dv = int(idx.depth[v])
    if idx.depth[descendant] <= dv or ancestor_at_depth(idx, descendant, dv) != v:
        raise ValueError("not a strict descendant")
    return ancestor_at_depth(idx, descendant, dv + 1)
