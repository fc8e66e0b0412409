"""Leaf-colored rooted trees stored as flat index arrays.

A tree on ``N`` nodes is a ``parent`` array (root -> -1), a CSR child
adjacency (``child_ptr``/``child_idx``) whose per-node order is the order in
which the children appeared in the input, and a ``color`` array that holds a
color id for every leaf and ``NO_COLOR`` for every internal node.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

NO_COLOR = -1


class TreeFormatError(ValueError):
    """Raised for malformed tree input (cycles, several roots, bad colors)."""


@njit(cache=True)
def _dfs_arrays(parent, child_ptr, child_idx, root):
    n = parent.shape[0]
    preorder = np.empty(n, np.int64)
    depth = np.zeros(n, np.int64)
    size = np.ones(n, np.int64)
    stack = np.empty(n, np.int64)
    stack[0] = root
    sp = 1
    k = 0
    while sp > 0:
        sp -= 1
        v = stack[sp]
        preorder[k] = v
        k += 1
        for j in range(child_ptr[v + 1] - 1, child_ptr[v] - 1, -1):
            c = child_idx[j]
            depth[c] = depth[v] + 1
            stack[sp] = c
            sp += 1
    for t in range(k - 1, 0, -1):
        v = preorder[t]
        size[parent[v]] += size[v]
    return preorder, depth, size, k


@njit(cache=True)
def _unary_representatives(preorder, child_ptr, child_idx):
    n = preorder.shape[0]
    rep = np.empty(n, np.int64)
    for t in range(n - 1, -1, -1):
        v = preorder[t]
        if child_ptr[v + 1] - child_ptr[v] == 1:
            rep[v] = rep[child_idx[child_ptr[v]]]
        else:
            rep[v] = v
    return rep


@njit(cache=True)
def _branching_ancestor(preorder, parent, n_children):
    # nearest strict ancestor that does not have exactly one child
    n = preorder.shape[0]
    up = np.full(n, -1, np.int64)
    for t in range(1, n):
        v = preorder[t]
        p = parent[v]
        if n_children[p] != 1:
            up[v] = p
        else:
            up[v] = up[p]
    return up


def _csr(parent: np.ndarray, order: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = parent.shape[0]
    seq = order[parent[order] >= 0]
    seq = seq[np.argsort(parent[seq], kind="stable")]
    counts = np.bincount(parent[seq], minlength=n)
    ptr = np.zeros(n + 1, np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, seq.astype(np.int64)


class LeafColoredTree:
    """Validated, immutable rooted tree whose leaves carry colors in ``[0, n_colors)``.

    Build one with :meth:`from_parents` or :func:`parse_tree`; the
    constructor checks that there is exactly one root, that every node is
    reachable from it, that every leaf is colored and that no internal
    node is.
    """

    def __init__(self, parent, child_ptr, child_idx, color, n_colors: int):
        self.parent = parent
        self.child_ptr = child_ptr
        self.child_idx = child_idx
        self.color = color
        self.n_colors = int(n_colors)
        self._validate()

    @classmethod
    def from_parents(
        cls,
        parent: Sequence[int] | np.ndarray,
        color: Sequence[int] | np.ndarray,
        n_colors: int | None = None,
        order: Sequence[int] | np.ndarray | None = None,
    ) -> "LeafColoredTree":
        """Build a tree from a parent array.

        ``order`` lists node ids in input order and fixes the child order;
        it defaults to id order. ``n_colors`` defaults to ``1 + max color``.
        """
        parent = np.asarray(parent, dtype=np.int64)
        color = np.asarray(color, dtype=np.int64)
        n = parent.shape[0]
        if n == 0:
            raise TreeFormatError("empty tree")
        if color.shape != parent.shape:
            raise TreeFormatError("parent and color arrays differ in length")
        if np.any(parent < -1) or np.any(parent >= n):
            raise TreeFormatError("parent id out of range")
        if np.any(parent == np.arange(n)):
            raise TreeFormatError("cycle detected")
        order = np.arange(n, dtype=np.int64) if order is None else np.asarray(order, dtype=np.int64)
        if n_colors is None:
            n_colors = int(color.max()) + 1 if np.any(color >= 0) else 0
        ptr, idx = _csr(parent, order)
        return cls(parent, ptr, idx, color, n_colors)

    def _validate(self) -> None:
        roots = np.flatnonzero(self.parent == -1)
        if roots.size == 0:
            raise TreeFormatError("cycle detected")
        if roots.size > 1:
            raise TreeFormatError("multiple roots")
        self.root = int(roots[0])
        preorder, depth, size, seen = _dfs_arrays(self.parent, self.child_ptr, self.child_idx, self.root)
        if seen != self.n_nodes:
            raise TreeFormatError("cycle detected")
        self.preorder, self.depth, self.subtree_size = preorder, depth, size
        leaf = self.is_leaf
        if np.any(self.color[leaf] < 0):
            raise TreeFormatError("uncolored leaf")
        if np.any(self.color[~leaf] != NO_COLOR):
            raise TreeFormatError("colored internal node")
        max_color = int(self.color.max())
        if max_color >= self.n_colors:
            raise TreeFormatError(f"color {max_color} outside declared range [0, {self.n_colors})")

    @property
    def n_nodes(self) -> int:
        return int(self.parent.shape[0])

    @cached_property
    def n_children(self) -> np.ndarray:
        return np.diff(self.child_ptr)

    @cached_property
    def is_leaf(self) -> np.ndarray:
        return self.n_children == 0

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.is_leaf))

    def children(self, v: int) -> np.ndarray:
        return self.child_idx[self.child_ptr[v] : self.child_ptr[v + 1]]

    @cached_property
    def preorder_position(self) -> np.ndarray:
        pos = np.empty(self.n_nodes, np.int64)
        pos[self.preorder] = np.arange(self.n_nodes)
        return pos

    @cached_property
    def leaf_sequence(self) -> np.ndarray:
        """Leaves in depth-first (in-order) visiting order."""
        return self.preorder[self.is_leaf[self.preorder]]

    @cached_property
    def leaf_rank(self) -> np.ndarray:
        rank = np.full(self.n_nodes, -1, np.int64)
        rank[self.leaf_sequence] = np.arange(self.leaf_sequence.shape[0])
        return rank

    @cached_property
    def leaf_interval(self) -> tuple[np.ndarray, np.ndarray]:
        """Per node, the inclusive rank interval ``[lo, hi]`` of its leaves."""
        in_pre = self.is_leaf[self.preorder].astype(np.int64)
        before = np.concatenate(([0], np.cumsum(in_pre)))
        pos = self.preorder_position
        lo = before[pos]
        hi = before[pos + self.subtree_size] - 1
        return lo, hi

    @property
    def leaf_count(self) -> np.ndarray:
        lo, hi = self.leaf_interval
        return hi - lo + 1

    def __repr__(self) -> str:
        return f"LeafColoredTree(N={self.n_nodes}, leaves={self.n_leaves}, colors={self.n_colors})"


@dataclass(frozen=True)
class ContractionMap:
    """Maps nodes of a tree onto their representatives after unary-path contraction.

    ``surviving[v]`` is the contracted id of the bottom node of the maximal
    unary path through ``v``; ``original[u]`` is the original id of
    contracted node ``u``.
    """

    surviving: np.ndarray
    original: np.ndarray

    def expand(self, values: np.ndarray) -> np.ndarray:
        """Lift a per-contracted-node array back to the original nodes."""
        return values[self.surviving]


def contract_unary_paths(t: LeafColoredTree) -> tuple[LeafColoredTree, ContractionMap]:
    nch = t.n_children
    keep = nch != 1
    if keep.all():
        ident = np.arange(t.n_nodes, dtype=np.int64)
        return t, ContractionMap(ident, ident)
    rep = _unary_representatives(t.preorder, t.child_ptr, t.child_idx)
    up = _branching_ancestor(t.preorder, t.parent, nch)
    original = np.flatnonzero(keep)
    new_id = np.full(t.n_nodes, -1, np.int64)
    new_id[original] = np.arange(original.shape[0])
    old_up = up[original]
    new_parent = np.where(old_up >= 0, new_id[np.maximum(old_up, 0)], -1)
    # children of a surviving node, in original child order, are the
    # representatives of its original children
    owner = np.repeat(np.arange(t.n_nodes), nch)
    entries = t.child_idx[keep[owner]]
    order = np.concatenate((new_id[rep[[t.root]]], new_id[rep[entries]]))
    contracted = LeafColoredTree.from_parents(new_parent, t.color[original], t.n_colors, order)
    return contracted, ContractionMap(new_id[rep], original)


def leaf_order(t: LeafColoredTree) -> tuple[np.ndarray, np.ndarray]:
    """Leaves in in-order sequence, plus each node's rank in it (-1 for internal nodes)."""
    return t.leaf_sequence, t.leaf_rank


def parse_tree(source: str | Iterable[str]) -> LeafColoredTree:
    """Parse the ``node_id parent_id [color]`` text format.

    An optional ``#N=<n> DELTA=<d>`` header fixes the node and color
    counts; other lines starting with ``#`` are comments.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    declared_n = declared_delta = None
    ids, parents, colors = [], [], []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            if "N" in fields or "DELTA" in fields:
                try:
                    declared_n = int(fields["N"]) if "N" in fields else declared_n
                    declared_delta = int(fields["DELTA"]) if "DELTA" in fields else declared_delta
                except ValueError:
                    raise TreeFormatError(f"line {lineno}: bad header {line!r}") from None
            continue
        toks = line.split()
        if len(toks) not in (2, 3):
            raise TreeFormatError(f"line {lineno}: expected 'node_id parent_id [color]'")
        try:
            vals = [int(x) for x in toks]
        except ValueError:
            raise TreeFormatError(f"line {lineno}: non-integer field") from None
        ids.append(vals[0])
        parents.append(vals[1])
        colors.append(vals[2] if len(vals) == 3 else NO_COLOR)
        if len(vals) == 3 and vals[2] < 0:
            raise TreeFormatError(f"line {lineno}: negative color")
    n = len(ids)
    if n == 0:
        raise TreeFormatError("empty tree")
    if declared_n is not None and declared_n != n:
        raise TreeFormatError(f"header declares N={declared_n} but {n} nodes were read")
    ids_arr = np.asarray(ids, dtype=np.int64)
    if ids_arr.min() < 0 or ids_arr.max() >= n or np.unique(ids_arr).shape[0] != n:
        raise TreeFormatError("node ids must be distinct and cover 0..N-1")
    parent = np.empty(n, np.int64)
    color = np.empty(n, np.int64)
    parent[ids_arr] = parents
    color[ids_arr] = colors
    return LeafColoredTree.from_parents(parent, color, declared_delta, order=ids_arr)


def read_tree(path: str | Path) -> LeafColoredTree:
    with open(path, encoding="utf-8") as fh:
        return parse_tree(fh.read())


def serialize_tree(t: LeafColoredTree) -> str:
    out = [f"#N={t.n_nodes} DELTA={t.n_colors}"]
    parent, color = t.parent.tolist(), t.color.tolist()
    for v in range(t.n_nodes):
        if color[v] >= 0:
            out.append(f"{v} {parent[v]} {color[v]}")
        else:
            out.append(f"{v} {parent[v]}")
    return "\n".join(out) + "\n"


@njit(cache=True)
def _attach(uniform, max_arity):
    n = uniform.shape[0] + 1
    parent = np.empty(n, np.int64)
    parent[0] = -1
    open_nodes = np.empty(n, np.int64)
    load = np.zeros(n, np.int64)
    open_nodes[0] = 0
    n_open = 1
    for v in range(1, n):
        slot = int(uniform[v - 1] * n_open)
        p = open_nodes[slot]
        parent[v] = p
        load[p] += 1
        if max_arity > 0 and load[p] >= max_arity:
            n_open -= 1
            open_nodes[slot] = open_nodes[n_open]
        open_nodes[n_open] = v
        n_open += 1
    return parent


def random_tree(
    n_nodes: int,
    n_colors: int,
    seed: int,
    max_arity: int | None = None,
) -> LeafColoredTree:
    """Uniform-attachment random tree with uniformly colored leaves.

    Node ``v`` attaches to a uniformly chosen earlier node that still has
    fewer than ``max_arity`` children.
    """
    if n_nodes < 1 or n_colors < 1:
        raise ValueError("need at least one node and one color")
    if max_arity is not None and max_arity < 1:
        raise ValueError("max_arity must be positive")
    rng = np.random.default_rng(seed)
    parent = _attach(rng.random(n_nodes - 1), max_arity or 0)
    is_leaf = np.bincount(parent[1:], minlength=n_nodes) == 0
    color = np.where(is_leaf, rng.integers(0, n_colors, n_nodes), NO_COLOR)
    return LeafColoredTree.from_parents(parent, color, n_colors)
