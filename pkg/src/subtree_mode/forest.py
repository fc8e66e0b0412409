"""Splitting a leaf-colored tree into single-color virtual trees.

For color ``i`` the single-color tree has the color-``i`` leaves as leaves and
one internal node per distinct LCA of two such leaves. Each node carries
``image``, the node of the input tree it stands for.

Construction is the left-to-right stack discipline used to build a suffix
tree from an LCP array: leaves arrive in in-order sequence together with
the input-tree depth of their LCA with the previous leaf; the stack holds
the open rightmost path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .lca import LcaIndex, lca_many
from .tree import LeafColoredTree


@njit(cache=True)
def _build_segment(leaf_ref, leaf_depth, join_ref, join_depth, lo, hi,
                   node_ref, node_parent, node_depth, node_leaf, post, n0, p0):
    # Tree over leaves lo..hi-1; join_*[k] describes the LCA of leaves k, k+1.
    # Nodes are written from n0 on in creation order; post receives them in
    # the order they are closed, which is a postorder.
    m = hi - lo
    if m <= 0:
        return n0, p0
    stack = np.empty(m, np.int64)
    n = n0
    p = p0
    node_ref[n] = leaf_ref[lo]
    node_depth[n] = leaf_depth[lo]
    node_leaf[n] = True
    node_parent[n] = -1
    stack[0] = n
    sp = 1
    n += 1
    for k in range(lo + 1, hi):
        d = join_depth[k - 1]
        last = -1
        while sp > 0 and node_depth[stack[sp - 1]] > d:
            last = stack[sp - 1]
            sp -= 1
            post[p] = last
            p += 1
            if sp > 0 and node_depth[stack[sp - 1]] >= d:
                node_parent[last] = stack[sp - 1]
        if sp == 0 or node_depth[stack[sp - 1]] < d:
            node_ref[n] = join_ref[k - 1]
            node_depth[n] = d
            node_leaf[n] = False
            node_parent[n] = -1
            node_parent[last] = n
            stack[sp] = n
            sp += 1
            n += 1
        node_ref[n] = leaf_ref[k]
        node_depth[n] = leaf_depth[k]
        node_leaf[n] = True
        node_parent[n] = -1
        stack[sp] = n
        sp += 1
        n += 1
    while sp > 0:
        last = stack[sp - 1]
        sp -= 1
        post[p] = last
        p += 1
        if sp > 0:
            node_parent[last] = stack[sp - 1]
    return n, p


@njit(cache=True)
def _build_segments(seg_ptr, leaf_ref, leaf_depth, join_ref, join_depth):
    total = leaf_ref.shape[0]
    cap = max(2 * total, 1)
    node_ref = np.empty(cap, np.int64)
    node_parent = np.empty(cap, np.int64)
    node_depth = np.empty(cap, np.int64)
    node_leaf = np.empty(cap, np.bool_)
    post = np.empty(cap, np.int64)
    n_seg = seg_ptr.shape[0] - 1
    node_ptr = np.zeros(n_seg + 1, np.int64)
    n = 0
    p = 0
    for s in range(n_seg):
        n, p = _build_segment(leaf_ref, leaf_depth, join_ref, join_depth,
                              seg_ptr[s], seg_ptr[s + 1],
                              node_ref, node_parent, node_depth, node_leaf, post, n, p)
        node_ptr[s + 1] = n
    return node_ref[:n], node_parent[:n], node_depth[:n], node_leaf[:n], post[:p], node_ptr


def build_virtual_trees(seg_ptr, leaf_ref, leaf_depth, join_ref, join_depth):
    """Stack construction over several leaf sequences at once.

    ``seg_ptr`` splits the leaf arrays into independent sequences;
    ``join_ref[k]``/``join_depth[k]`` describe the node joining leaves
    ``k`` and ``k + 1`` (ignored across segment boundaries). Returns
    ``(ref, parent, depth, is_leaf, postorder, node_ptr)`` with parent
    indices global to the returned arrays.
    """
    args = [np.ascontiguousarray(a, dtype=np.int64) for a in (seg_ptr, leaf_ref, leaf_depth)]
    if len(join_ref) == 0:
        join_ref = join_depth = np.zeros(1, np.int64)
    jr = np.ascontiguousarray(join_ref, dtype=np.int64)
    jd = np.ascontiguousarray(join_depth, dtype=np.int64)
    return _build_segments(args[0], args[1], args[2], jr, jd)


@dataclass(frozen=True)
class LeafList:
    """Color-``i`` leaves in in-order rank are ``leaves[ptr[i]:ptr[i+1]]``."""

    leaves: np.ndarray
    ptr: np.ndarray

    def __getitem__(self, i: int) -> np.ndarray:
        return self.leaves[self.ptr[i] : self.ptr[i + 1]]

    def __len__(self) -> int:
        return self.ptr.shape[0] - 1


def build_leaf_lists(t: LeafColoredTree) -> LeafList:
    seq = t.leaf_sequence
    by_color = seq[np.argsort(t.color[seq], kind="stable")]
    counts = np.bincount(t.color[seq], minlength=t.n_colors)
    ptr = np.zeros(t.n_colors + 1, np.int64)
    np.cumsum(counts, out=ptr[1:])
    return LeafList(by_color, ptr)


@dataclass(frozen=True)
class SingleColorTree:
    color: int
    image: np.ndarray          # input-tree node represented by each node
    parent: np.ndarray       # local parent id, -1 at the root
    is_leaf: np.ndarray
    postorder: np.ndarray    # local ids, children before parents

    @property
    def n_nodes(self) -> int:
        return int(self.image.shape[0])

    @property
    def root(self) -> int:
        return int(self.postorder[-1]) if self.n_nodes else -1

    def children(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.parent == u)


def _adjacent_joins(t: LeafColoredTree, lca_idx: LcaIndex, leaves: np.ndarray):
    if leaves.shape[0] < 2:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    join = lca_many(lca_idx, leaves[:-1], leaves[1:])
    return join, t.depth[join]


def build_single_color_tree(t: LeafColoredTree, lca_idx: LcaIndex, leaves, color: int = -1) -> SingleColorTree:
    """Virtual tree over ``leaves`` (sorted by in-order rank) in ``O(len(leaves))``."""
    leaves = np.asarray(leaves, dtype=np.int64)
    if color < 0 and leaves.shape[0]:
        color = int(t.color[leaves[0]])
    join, join_depth = _adjacent_joins(t, lca_idx, leaves)
    ref, parent, _, is_leaf, post, _ = build_virtual_trees(
        np.array([0, leaves.shape[0]]), leaves, t.depth[leaves], join, join_depth
    )
    return SingleColorTree(int(color), ref, parent, is_leaf, post)


@dataclass(frozen=True)
class SingleColorForest:
    """All single-color trees in flat arrays.

    Nodes of the color-``i`` tree occupy ``tree_ptr[i]:tree_ptr[i+1]``; ``parent``
    indexes into the flat arrays. ``rev_nodes[rev_ptr[v]:rev_ptr[v+1]]``
    lists the forest nodes mapped onto input-tree node ``v``.
    """

    image: np.ndarray
    parent: np.ndarray
    color: np.ndarray
    is_leaf: np.ndarray
    postorder: np.ndarray
    tree_ptr: np.ndarray
    rev_ptr: np.ndarray
    rev_nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.image.shape[0])

    @property
    def n_trees(self) -> int:
        return int(self.tree_ptr.shape[0] - 1)

    def at(self, v: int) -> list[tuple[int, int]]:
        """``(color, forest node)`` pairs with ``image == v``."""
        nodes = self.rev_nodes[self.rev_ptr[v] : self.rev_ptr[v + 1]]
        return [(int(self.color[u]), int(u)) for u in nodes]

    def tree(self, i: int) -> SingleColorTree:
        a, b = int(self.tree_ptr[i]), int(self.tree_ptr[i + 1])
        parent = self.parent[a:b]
        parent = np.where(parent >= 0, parent - a, -1)
        post = self.postorder[(self.postorder >= a) & (self.postorder < b)] - a
        return SingleColorTree(i, self.image[a:b], parent, self.is_leaf[a:b], post)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.tree_ptr)


def split_forest(t: LeafColoredTree, lca_idx: LcaIndex) -> SingleColorForest:
    lists = build_leaf_lists(t)
    leaves = lists.leaves
    join, join_depth = _adjacent_joins(t, lca_idx, leaves)
    image, parent, _, is_leaf, post, node_ptr = build_virtual_trees(
        lists.ptr, leaves, t.depth[leaves], join, join_depth
    )
    color = np.repeat(np.arange(t.n_colors, dtype=np.int64), np.diff(node_ptr))
    rev_nodes = np.argsort(image, kind="stable")
    rev_ptr = np.zeros(t.n_nodes + 1, np.int64)
    np.cumsum(np.bincount(image, minlength=t.n_nodes), out=rev_ptr[1:])
    return SingleColorForest(image, parent, color, is_leaf, post, node_ptr, rev_ptr, rev_nodes)


def forest_to_text(forest: SingleColorForest) -> str:
    """Per-tree dump: ``local_id local_parent [color] phi=<input-tree node>``."""
    out = []
    for i in range(forest.n_trees):
        tree = forest.tree(i)
        out.append(f"# color={i} nodes={tree.n_nodes}")
        for u in range(tree.n_nodes):
            col = f" {i}" if tree.is_leaf[u] else ""
            out.append(f"{u} {tree.parent[u]}{col} phi={tree.image[u]}")
    return "\n".join(out) + "\n"
