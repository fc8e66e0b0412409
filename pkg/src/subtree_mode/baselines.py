"""Reference algorithms for subtree mode.

* :func:`brute_all_modes` - full per-node histograms by walking every subtree.
* :func:`ba1_all_modes` - bottom-up accumulation of length-``n_colors`` count
  arrays, ``O(N * n_colors)`` time.
* :func:`ba2_all_modes` - reduction to range mode over the in-order leaf
  colors, answered by a block-decomposition index with ``ceil(sqrt(N_L))``
  blocks, ``O(N sqrt N)`` time.
* :func:`ba3_all_modes` - pairwise tournament over the single-color trees,
  ``O(N log n_colors)`` time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .forest import build_leaf_lists, build_virtual_trees, split_forest
from .lca import build_lca, lca_many
from .modes import AntiModeTable, ModeTable, count_colors
from .tree import LeafColoredTree, contract_unary_paths

DEFAULT_MAX_CELLS = 2**32


class ResourceGuardError(RuntimeError):
    """An algorithm refused to run because its table would exceed the cell budget."""


def _guard(name: str, cells: int, max_cells: int | None) -> None:
    limit = DEFAULT_MAX_CELLS if max_cells is None else max_cells
    if cells > limit:
        raise ResourceGuardError(f"{name} needs {cells} table cells, budget is {limit}")


@dataclass(frozen=True)
class HistogramTable:
    """``counts[v, c]`` = number of leaves of color ``c`` under ``v``."""

    counts: np.ndarray

    def modes(self) -> ModeTable:
        c = np.argmax(self.counts, axis=1)
        return ModeTable(c, self.counts[np.arange(self.counts.shape[0]), c])

    def anti_modes(self) -> AntiModeTable:
        c = np.argmin(self.counts, axis=1)
        return AntiModeTable(c, self.counts[np.arange(self.counts.shape[0]), c])

    def top_k_freqs(self, v: int, k: int) -> list[int]:
        row = self.counts[v]
        return sorted((int(x) for x in row if x > 0), reverse=True)[:k]


def brute_all_modes(t: LeafColoredTree) -> HistogramTable:
    """Per-node histograms, each from an independent walk of the subtree."""
    parent = t.parent.tolist()
    color = t.color.tolist()
    kids: list[list[int]] = [[] for _ in parent]
    for v, p in enumerate(parent):
        if p >= 0:
            kids[p].append(v)
    counts = np.zeros((len(parent), t.n_colors), np.int64)
    for v in range(len(parent)):
        row = [0] * t.n_colors
        stack = [v]
        while stack:
            x = stack.pop()
            if kids[x]:
                stack.extend(kids[x])
            else:
                row[color[x]] += 1
        counts[v] = row
    return HistogramTable(counts)


@njit(cache=True)
def _ba1(preorder, parent, depth, color, n_colors):
    # Reverse preorder visits children before parents and keeps the set of
    # partially summed nodes on one root path, so one row per depth suffices.
    n = preorder.shape[0]
    rows = np.zeros((depth.max() + 2, n_colors), np.int64)
    mode_c = np.empty(n, np.int64)
    mode_f = np.empty(n, np.int64)
    for t in range(n - 1, -1, -1):
        v = preorder[t]
        d = depth[v]
        if color[v] >= 0:
            mode_c[v] = color[v]
            mode_f[v] = 1
            if d > 0:
                rows[d - 1, color[v]] += 1
            continue
        row = rows[d]
        best = 0
        for c in range(1, n_colors):
            if row[c] > row[best]:
                best = c
        mode_c[v] = best
        mode_f[v] = row[best]
        if d > 0:
            up = rows[d - 1]
            for c in range(n_colors):
                up[c] += row[c]
        row[:] = 0
    return mode_c, mode_f


def ba1_all_modes(t: LeafColoredTree, max_cells: int | None = None) -> ModeTable:
    _guard("BA1", t.n_nodes * t.n_colors, max_cells)
    c, f = _ba1(t.preorder, t.parent, t.depth, t.color, t.n_colors)
    return ModeTable(c, f)


@dataclass(frozen=True)
class RangeModeIndex:
    """Block-decomposition range-mode index.

    ``table_*[p, q]`` hold the mode of blocks ``p..q``; ``occ`` lists the
    positions of each color (grouped by ``occ_ptr``) and ``rank[x]`` is the
    index of position ``x`` inside its color's list.
    """

    values: np.ndarray
    block: int
    table_color: np.ndarray
    table_freq: np.ndarray
    occ: np.ndarray
    occ_ptr: np.ndarray
    rank: np.ndarray

    @property
    def n_blocks(self) -> int:
        return int(self.table_color.shape[0])

    def __len__(self) -> int:
        return int(self.values.shape[0])


@njit(cache=True)
def _block_table(values, block, n_blocks, n_colors):
    n = values.shape[0]
    tc = np.full((n_blocks, n_blocks), -1, np.int64)
    tf = np.zeros((n_blocks, n_blocks), np.int64)
    counts = np.zeros(n_colors, np.int64)
    for p in range(n_blocks):
        bc = -1
        bf = 0
        for j in range(p * block, n):
            c = values[j]
            counts[c] += 1
            if counts[c] > bf or (counts[c] == bf and c < bc):
                bf = counts[c]
                bc = c
            if (j + 1) % block == 0 or j == n - 1:
                q = j // block
                tc[p, q] = bc
                tf[p, q] = bf
        for j in range(p * block, n):
            counts[values[j]] = 0
    return tc, tf


def build_range_mode(a, s: int, n_colors: int | None = None) -> RangeModeIndex:
    """Index over color array ``a`` with ``s`` blocks; ``O(s * len(a))`` build."""
    values = np.ascontiguousarray(a, dtype=np.int64)
    n = values.shape[0]
    if n == 0:
        raise ValueError("empty array")
    if not 1 <= s <= n:
        raise ValueError("need 1 <= s <= len(a)")
    if values.min() < 0:
        raise ValueError("colors must be non-negative")
    n_colors = int(values.max()) + 1 if n_colors is None else n_colors
    block = -(-n // s)
    n_blocks = -(-n // block)
    tc, tf = _block_table(values, block, n_blocks, n_colors)
    occ = np.argsort(values, kind="stable")
    occ_ptr = np.zeros(n_colors + 1, np.int64)
    np.cumsum(np.bincount(values, minlength=n_colors), out=occ_ptr[1:])
    rank = np.empty(n, np.int64)
    rank[occ] = np.arange(n) - occ_ptr[values[occ]]
    return RangeModeIndex(values, block, tc, tf, occ, occ_ptr, rank)


@njit(cache=True)
def _rm_query(values, block, tc, tf, occ, occ_ptr, rank, i, j):
    p = (i + block - 1) // block
    q = (j + 1) // block - 1
    if p <= q:
        c = tc[p, q]
        f = tf[p, q]
        pre_end = p * block
        suf_start = (q + 1) * block
    else:
        c = -1
        f = 0
        pre_end = j + 1
        suf_start = j + 1
    for x in range(i, pre_end):
        col = values[x]
        r = rank[x]
        base = occ_ptr[col]
        cnt = occ_ptr[col + 1] - base
        if r > 0 and occ[base + r - 1] >= i:
            continue
        # col occurs at least f + 1 times in [i, j] iff its (r + f)-th occurrence is <= j
        while r + f < cnt and occ[base + r + f] <= j:
            f += 1
            c = col
    for x in range(suf_start, j + 1):
        col = values[x]
        r = rank[x]
        base = occ_ptr[col]
        cnt = occ_ptr[col + 1] - base
        if r + 1 < cnt and occ[base + r + 1] <= j:
            continue
        while r - f >= 0 and occ[base + r - f] >= i:
            f += 1
            c = col
    return c, f


def range_mode_query(idx: RangeModeIndex, i: int, j: int) -> tuple[int, int]:
    """Mode color and frequency of ``values[i..j]`` (inclusive)."""
    if not 0 <= i <= j < len(idx):
        raise IndexError(f"range [{i}, {j}] out of bounds for length {len(idx)}")
    c, f = _rm_query(idx.values, idx.block, idx.table_color, idx.table_freq,
                     idx.occ, idx.occ_ptr, idx.rank, i, j)
    return int(c), int(f)


@njit(cache=True)
def _rm_query_all(values, block, tc, tf, occ, occ_ptr, rank, lo, hi):
    n = lo.shape[0]
    out_c = np.empty(n, np.int64)
    out_f = np.empty(n, np.int64)
    for v in range(n):
        out_c[v], out_f[v] = _rm_query(values, block, tc, tf, occ, occ_ptr, rank, lo[v], hi[v])
    return out_c, out_f


def ba2_all_modes(t: LeafColoredTree, max_cells: int | None = None) -> ModeTable:
    n_leaves = t.n_leaves
    s = math.isqrt(n_leaves - 1) + 1 if n_leaves > 1 else 1
    _guard("BA2", s * s + n_leaves + t.n_colors, max_cells)
    idx = build_range_mode(t.color[t.leaf_sequence], s, t.n_colors)
    lo, hi = t.leaf_interval
    c, f = _rm_query_all(idx.values, idx.block, idx.table_color, idx.table_freq,
                         idx.occ, idx.occ_ptr, idx.rank, lo, hi)
    return ModeTable(c, f)


@njit(cache=True)
def _merge_leaf_lists(g_ptr, leaves, rank):
    n_new = (g_ptr.shape[0] - 1 + 1) // 2
    out = np.empty_like(leaves)
    new_ptr = np.zeros(n_new + 1, np.int64)
    k = 0
    for g in range(n_new):
        a, a_end = g_ptr[2 * g], g_ptr[2 * g + 1]
        if 2 * g + 1 < g_ptr.shape[0] - 1:
            b, b_end = g_ptr[2 * g + 1], g_ptr[2 * g + 2]
        else:
            b, b_end = a_end, a_end
        while a < a_end or b < b_end:
            if b >= b_end or (a < a_end and rank[leaves[a]] < rank[leaves[b]]):
                out[k] = leaves[a]
                a += 1
            else:
                out[k] = leaves[b]
                b += 1
            k += 1
        new_ptr[g + 1] = k
    return out, new_ptr


@njit(cache=True)
def _annotate(old_ptr, old_ref, old_f, old_c, new_ptr, new_ref, new_parent, new_post, scratch_f, scratch_c):
    n_old = old_ptr.shape[0] - 1
    n_new = new_ptr.shape[0] - 1
    best_f = np.zeros(new_ref.shape[0], np.int64)
    best_c = np.full(new_ref.shape[0], -1, np.int64)
    for g in range(n_new):
        hi_group = min(2 * g + 2, n_old)
        for og in range(2 * g, hi_group):
            for x in range(old_ptr[og], old_ptr[og + 1]):
                w = old_ref[x]
                f = old_f[x]
                c = old_c[x]
                if f > scratch_f[w] or (f == scratch_f[w] and c < scratch_c[w]):
                    scratch_f[w] = f
                    scratch_c[w] = c
        for y in range(new_ptr[g], new_ptr[g + 1]):
            w = new_ref[y]
            if scratch_f[w] > 0:
                best_f[y] = scratch_f[w]
                best_c[y] = scratch_c[w]
        for og in range(2 * g, hi_group):
            for x in range(old_ptr[og], old_ptr[og + 1]):
                scratch_f[old_ref[x]] = 0
                scratch_c[old_ref[x]] = -1
    # a node of the merged tree absent from one side inherits that side's
    # best from the child holding its leaves
    for y in new_post:
        p = new_parent[y]
        if p >= 0 and (best_f[y] > best_f[p] or (best_f[y] == best_f[p] and best_c[y] < best_c[p])):
            best_f[p] = best_f[y]
            best_c[p] = best_c[y]
    return best_f, best_c


def ba3_all_modes(t: LeafColoredTree) -> ModeTable:
    tc, cmap = contract_unary_paths(t)
    lca_idx = build_lca(tc)
    forest = split_forest(tc, lca_idx)
    g_ptr = build_leaf_lists(tc).ptr
    leaves = build_leaf_lists(tc).leaves
    node_ptr, ref = forest.tree_ptr, forest.image
    best_f = count_colors(forest).counts
    best_c = forest.color.copy()
    scratch_f = np.zeros(tc.n_nodes, np.int64)
    scratch_c = np.full(tc.n_nodes, -1, np.int64)
    rank = tc.leaf_rank
    while g_ptr.shape[0] - 1 > 1:
        leaves, g_ptr = _merge_leaf_lists(g_ptr, leaves, rank)
        join = lca_many(lca_idx, leaves[:-1], leaves[1:])
        new_ref, parent, _, _, post, new_ptr = build_virtual_trees(
            g_ptr, leaves, tc.depth[leaves], join, tc.depth[join]
        )
        best_f, best_c = _annotate(node_ptr, ref, best_f, best_c, new_ptr, new_ref,
                                   parent, post, scratch_f, scratch_c)
        node_ptr, ref = new_ptr, new_ref
    mode_c = np.full(tc.n_nodes, -1, np.int64)
    mode_f = np.zeros(tc.n_nodes, np.int64)
    mode_c[ref] = best_c
    mode_f[ref] = best_f
    return ModeTable(cmap.expand(mode_c), cmap.expand(mode_f))
