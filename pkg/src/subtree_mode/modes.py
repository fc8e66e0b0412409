"""Per-subtree mode, anti-mode and top-k colors in linear time.

The pipeline splits the (unary-contracted) tree into single-color trees,
counts leaves in every single-color tree, then merges the counts over
the input tree: the mode frequency of ``v`` is the maximum of its children's mode
frequencies and of the counts stored at single-color nodes mapped onto
``v``. A color whose leaves under ``v`` lie in one child is covered by that
child; a color split across children has a single-color node at ``v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .forest import SingleColorForest, split_forest
from .lca import build_lca, build_level_ancestor
from .tree import NO_COLOR, LeafColoredTree, TreeFormatError, contract_unary_paths


@dataclass(frozen=True)
class ModeTable:
    color: np.ndarray
    freq: np.ndarray

    def __len__(self) -> int:
        return int(self.color.shape[0])

    def __getitem__(self, v: int) -> tuple[int, int]:
        return int(self.color[v]), int(self.freq[v])


@dataclass(frozen=True)
class AntiModeTable:
    color: np.ndarray
    freq: np.ndarray

    def __len__(self) -> int:
        return int(self.color.shape[0])

    def __getitem__(self, v: int) -> tuple[int, int]:
        return int(self.color[v]), int(self.freq[v])


@dataclass(frozen=True)
class TopKTable:
    """Row ``v`` holds ``length[v]`` pairs, frequencies non-increasing."""

    color: np.ndarray   # (N, k), -1 padded
    freq: np.ndarray    # (N, k), 0 padded
    length: np.ndarray

    @property
    def k(self) -> int:
        return int(self.color.shape[1])

    def __len__(self) -> int:
        return int(self.color.shape[0])

    def __getitem__(self, v: int) -> list[tuple[int, int]]:
        n = int(self.length[v])
        return list(zip(self.color[v, :n].tolist(), self.freq[v, :n].tolist()))


@dataclass(frozen=True)
class SubtreeCountTable:
    """``counts[u]`` = leaves below forest node ``u`` in its single-color tree."""

    counts: np.ndarray


@njit(cache=True)
def _count_leaves(parent, is_leaf, postorder):
    counts = is_leaf.astype(np.int64)
    for u in postorder:
        p = parent[u]
        if p >= 0:
            counts[p] += counts[u]
    return counts


def count_colors(forest: SingleColorForest) -> SubtreeCountTable:
    return SubtreeCountTable(_count_leaves(forest.parent, forest.is_leaf, forest.postorder))


@njit(cache=True)
def _merge_max(preorder, parent, color, f_phi, f_count, f_color, f_leaf):
    n = parent.shape[0]
    best_f = np.zeros(n, np.int64)
    best_c = np.full(n, -1, np.int64)
    for v in range(n):
        if color[v] >= 0:
            best_f[v] = 1
            best_c[v] = color[v]
    for u in range(f_phi.shape[0]):
        if f_leaf[u]:
            continue
        v = f_phi[u]
        f = f_count[u]
        c = f_color[u]
        if f > best_f[v] or (f == best_f[v] and c < best_c[v]):
            best_f[v] = f
            best_c[v] = c
    for t in range(n - 1, 0, -1):
        v = preorder[t]
        p = parent[v]
        f = best_f[v]
        c = best_c[v]
        if f > best_f[p] or (f == best_f[p] and c < best_c[p]):
            best_f[p] = f
            best_c[p] = c
    return best_c, best_f


class _Prepared:
    """Contracted tree plus the split forest and its counts."""

    def __init__(self, t: LeafColoredTree):
        self.tc, self.cmap = contract_unary_paths(t)
        self.lca = build_lca(self.tc)
        self.forest = split_forest(self.tc, self.lca)
        self.counts = count_colors(self.forest).counts


def scm_all_modes(t: LeafColoredTree) -> ModeTable:
    """Mode color and frequency of every subtree (ties go to the smallest color)."""
    prep = _Prepared(t)
    tc, f = prep.tc, prep.forest
    c, fr = _merge_max(tc.preorder, tc.parent, tc.color, f.image, prep.counts, f.color, f.is_leaf)
    return ModeTable(prep.cmap.expand(c), prep.cmap.expand(fr))


@njit(cache=True)
def _ancestor(jump, depth, v, target):
    d = depth[v] - target
    j = 0
    while d > 0:
        if d & 1:
            v = jump[j, v]
        d >>= 1
        j += 1
    return v


@njit(cache=True)
def _absent_witness(seq_colors, n_colors):
    # For every leaf rank p, the color whose first occurrence at or after p
    # is latest (colors that never occur count as infinitely late).
    # Kept as a recency list: each occurrence moves its color to the front.
    m = seq_colors.shape[0]
    nxt = np.arange(1, n_colors + 1)
    prv = np.arange(-1, n_colors - 1)
    nxt[n_colors - 1] = -1
    head = 0
    tail = n_colors - 1
    first = np.full(n_colors, np.iinfo(np.int64).max)
    wit = np.empty(m, np.int64)
    wit_pos = np.empty(m, np.int64)
    for p in range(m - 1, -1, -1):
        c = seq_colors[p]
        first[c] = p
        if c != head:
            a = prv[c]
            b = nxt[c]
            nxt[a] = b
            if b >= 0:
                prv[b] = a
            else:
                tail = a
            prv[c] = -1
            nxt[c] = head
            prv[head] = c
            head = c
        wit[p] = tail
        wit_pos[p] = first[tail]
    return wit, wit_pos


@njit(cache=True)
def _anti_push(preorder, child_ptr, color, depth, jump, n_colors,
               totals, root_wit, absent, absent_color,
               f_phi, f_count, f_color, f_leaf, fc_ptr, fc_idx, rev_ptr, rev_nodes):
    n = preorder.shape[0]
    inf = np.iinfo(np.int64).max
    best_f = np.full(n, inf, np.int64)
    best_c = np.full(n, -1, np.int64)
    best_w = np.full(n, -1, np.int64)   # input-tree node holding all best_c leaves of v
    root = preorder[0]
    for c in range(n_colors):
        if totals[c] < best_f[root]:
            best_f[root] = totals[c]
            best_c[root] = c
            best_w[root] = root_wit[c]
    for t in range(n):
        v = preorder[t]
        if absent[v]:
            best_f[v] = 0
            best_c[v] = absent_color[v]
            best_w[v] = -1
        if child_ptr[v + 1] == child_ptr[v]:
            continue
        dv = depth[v]
        f = best_f[v]
        c = best_c[v]
        split = False
        for r in range(rev_ptr[v], rev_ptr[v + 1]):
            u = rev_nodes[r]
            if f_leaf[u]:
                continue
            i = f_color[u]
            if i == c:
                split = True
            # each child of u sits under a different child of v
            for q in range(fc_ptr[u], fc_ptr[u + 1]):
                w = fc_idx[q]
                x = _ancestor(jump, depth, f_phi[w], dv + 1)
                g = f_count[w]
                if g < best_f[x] or (g == best_f[x] and i < best_c[x]):
                    best_f[x] = g
                    best_c[x] = i
                    best_w[x] = f_phi[w]
        if f > 0 and not split:
            x = _ancestor(jump, depth, best_w[v], dv + 1)
            if f < best_f[x] or (f == best_f[x] and c < best_c[x]):
                best_f[x] = f
                best_c[x] = c
                best_w[x] = best_w[v]
    return best_c, best_f


def distinct_colors(t: LeafColoredTree, forest: SingleColorForest) -> np.ndarray:
    """Number of distinct leaf colors under every node of ``t``.

    Leaves below ``v`` minus, for each internal single-color node mapped
    into the subtree of ``v``, its number of children minus one.
    """
    n_child = np.bincount(forest.parent[forest.parent >= 0], minlength=forest.n_nodes)
    internal = ~forest.is_leaf
    excess = np.bincount(forest.image[internal], weights=n_child[internal] - 1, minlength=t.n_nodes)
    in_pre = np.concatenate(([0], np.cumsum(excess[t.preorder])))
    pos = t.preorder_position
    below = in_pre[pos + t.subtree_size] - in_pre[pos]
    return t.leaf_count - below.astype(np.int64)


def scm_anti_modes(t: LeafColoredTree) -> AntiModeTable:
    """Least frequent color of every subtree, over all ``n_colors`` colors.

    A color with no leaf under ``v`` has frequency 0 there.
    """
    prep = _Prepared(t)
    tc, f = prep.tc, prep.forest
    la = build_level_ancestor(tc)
    lo, hi = tc.leaf_interval
    wit, _ = _absent_witness(tc.color[tc.leaf_sequence], tc.n_colors)
    absent = distinct_colors(tc, f) < tc.n_colors
    absent_color = np.where(absent, wit[lo], -1)
    totals = np.bincount(f.color[f.is_leaf], minlength=tc.n_colors)
    roots = _tree_roots(f, tc.n_colors)
    root_wit = np.where(roots >= 0, f.image[np.maximum(roots, 0)], -1)
    fc_ptr, fc_idx = _forest_children(f)
    c, fr = _anti_push(
        tc.preorder, tc.child_ptr, tc.color, tc.depth, la.jump, tc.n_colors,
        totals, root_wit, absent, absent_color,
        f.image, prep.counts, f.color, f.is_leaf, fc_ptr, fc_idx, f.rev_ptr, f.rev_nodes,
    )
    return AntiModeTable(prep.cmap.expand(c), prep.cmap.expand(fr))


def _tree_roots(f: SingleColorForest, n_colors: int) -> np.ndarray:
    roots = np.full(n_colors, -1, np.int64)
    r = np.flatnonzero(f.parent < 0)
    roots[f.color[r]] = r
    return roots


def _forest_children(f: SingleColorForest) -> tuple[np.ndarray, np.ndarray]:
    has_parent = np.flatnonzero(f.parent >= 0)
    idx = has_parent[np.argsort(f.parent[has_parent], kind="stable")]
    ptr = np.zeros(f.n_nodes + 1, np.int64)
    np.cumsum(np.bincount(f.parent[has_parent], minlength=f.n_nodes), out=ptr[1:])
    return ptr, idx


@njit(cache=True)
def _merge_top_k(preorder, child_ptr, child_idx, color, k, n_colors,
                 rev_ptr, rev_nodes, f_count, f_color, f_leaf):
    n = preorder.shape[0]
    top_f = np.zeros((n, k), np.int64)
    top_c = np.full((n, k), -1, np.int64)
    length = np.zeros(n, np.int64)
    best = np.zeros(n_colors, np.int64)
    cand = np.empty(n_colors, np.int64)
    keys = np.empty(n_colors, np.int64)
    for t in range(n - 1, -1, -1):
        v = preorder[t]
        if color[v] >= 0:
            top_f[v, 0] = 1
            top_c[v, 0] = color[v]
            length[v] = 1
            continue
        m = 0
        for j in range(child_ptr[v], child_ptr[v + 1]):
            ch = child_idx[j]
            for e in range(length[ch]):
                c = top_c[ch, e]
                if best[c] == 0:
                    cand[m] = c
                    m += 1
                if top_f[ch, e] > best[c]:
                    best[c] = top_f[ch, e]
        for r in range(rev_ptr[v], rev_ptr[v + 1]):
            u = rev_nodes[r]
            if f_leaf[u]:
                continue
            c = f_color[u]
            if best[c] == 0:
                cand[m] = c
                m += 1
            if f_count[u] > best[c]:
                best[c] = f_count[u]
        for e in range(m):
            keys[e] = -best[cand[e]] * n_colors + cand[e]
        order = np.argsort(keys[:m])
        take = min(k, m)
        for e in range(take):
            c = cand[order[e]]
            top_c[v, e] = c
            top_f[v, e] = best[c]
        length[v] = take
        for e in range(m):
            best[cand[e]] = 0
    return top_c, top_f, length


def scm_top_k(t: LeafColoredTree, k: int) -> TopKTable:
    """The ``k`` most frequent colors under every node, by non-increasing frequency.

    Rows are shorter than ``k`` when fewer colors occur under the node.
    Ties are broken toward smaller color ids.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    k = min(int(k), t.n_colors)
    prep = _Prepared(t)
    tc, f = prep.tc, prep.forest
    c, fr, ln = _merge_top_k(tc.preorder, tc.child_ptr, tc.child_idx, tc.color, k, tc.n_colors,
                             f.rev_ptr, f.rev_nodes, prep.counts, f.color, f.is_leaf)
    s = prep.cmap.surviving
    return TopKTable(c[s], fr[s], ln[s])


def node_colored_modes(
    parent: Sequence[int] | np.ndarray,
    color: Sequence[int] | np.ndarray,
    n_colors: int | None = None,
) -> ModeTable:
    """Modes when every node, internal ones included, carries a color.

    Each internal node gets an extra leaf child holding its color; the
    internal colors are then dropped and the leaf-colored problem solved.
    """
    parent = np.asarray(parent, dtype=np.int64)
    color = np.asarray(color, dtype=np.int64)
    n = parent.shape[0]
    if np.any(color < 0):
        raise TreeFormatError("uncolored node")
    has_child = np.zeros(n, bool)
    has_child[parent[parent >= 0]] = True
    internal = np.flatnonzero(has_child)
    new_parent = np.concatenate((parent, internal))
    new_color = np.concatenate((np.where(has_child, NO_COLOR, color), color[internal]))
    t = LeafColoredTree.from_parents(new_parent, new_color, n_colors)
    table = scm_all_modes(t)
    return ModeTable(table.color[:n], table.freq[:n])


def format_answer_table(modes: ModeTable, anti: AntiModeTable | None = None) -> str:
    """One line per node: ``node_id c_max f_max [c_min f_min]``."""
    cols = [np.arange(len(modes)), modes.color, modes.freq]
    if anti is not None:
        cols += [anti.color, anti.freq]
    rows = np.column_stack(cols).tolist()
    return "".join(" ".join(map(str, r)) + "\n" for r in rows)


def parse_answer_table(text: str | Iterable[str]) -> tuple[ModeTable, AntiModeTable | None]:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    rows = [list(map(int, ln.split())) for ln in lines if ln.strip() and not ln.startswith("#")]
    if not rows:
        return ModeTable(np.zeros(0, np.int64), np.zeros(0, np.int64)), None
    arr = np.array(rows, dtype=np.int64)
    n = int(arr[:, 0].max()) + 1
    if arr.shape[0] != n or np.unique(arr[:, 0]).shape[0] != n:
        raise ValueError("answer table must have one line per node id 0..N-1")
    arr = arr[np.argsort(arr[:, 0])]
    modes = ModeTable(arr[:, 1].copy(), arr[:, 2].copy())
    anti = AntiModeTable(arr[:, 3].copy(), arr[:, 4].copy()) if arr.shape[1] >= 5 else None
    return modes, anti
