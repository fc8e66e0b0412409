"""Generalized suffix tree over a document collection.

Documents are integer sequences over ``[0, sigma)``. The concatenation
appends after document ``i`` the delimiter ``sigma + i``, so delimiters are
unique and sort after every letter. The tree is built from the suffix array
and LCP array with the same stack construction used for single-color trees;
suffix links come from ``slink(LCA(p, q)) = LCA(p + 1, q + 1)`` over leaves.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .forest import build_virtual_trees
from .lca import build_lca, lca_many
from .tree import LeafColoredTree


class DocumentFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DocumentCollection:
    docs: tuple[np.ndarray, ...]
    sigma: int
    alphabet: str | None = None   # letter for each code when built from text

    @classmethod
    def from_texts(cls, texts: Sequence[str]) -> "DocumentCollection":
        alphabet = "".join(sorted(set("".join(texts))))
        lookup = {ch: i for i, ch in enumerate(alphabet)}
        docs = tuple(np.array([lookup[ch] for ch in s], dtype=np.int64) for s in texts)
        return cls._checked(docs, max(len(alphabet), 1), alphabet)

    @classmethod
    def from_codes(cls, docs: Iterable[Sequence[int]], sigma: int) -> "DocumentCollection":
        arrs = tuple(np.asarray(d, dtype=np.int64) for d in docs)
        return cls._checked(arrs, sigma, None)

    @classmethod
    def _checked(cls, docs, sigma, alphabet):
        if not docs:
            raise DocumentFormatError("empty collection")
        for i, d in enumerate(docs):
            if d.size == 0:
                raise DocumentFormatError(f"document {i} is empty")
            if d.min() < 0:
                raise DocumentFormatError(f"document {i} has a negative letter code")
            if d.max() >= sigma:
                raise DocumentFormatError(f"document {i} contains reserved delimiter code {int(d.max())}")
        return cls(docs, sigma, alphabet)

    def __len__(self) -> int:
        return len(self.docs)

    def encode(self, pattern: str | Sequence[int]) -> np.ndarray:
        """Letter codes for ``pattern``; letters outside the alphabet become ``-1``."""
        if isinstance(pattern, str):
            if self.alphabet is None:
                raise TypeError("collection was built from codes; pass integer patterns")
            return np.array([self.alphabet.find(ch) for ch in pattern], dtype=np.int64)
        return np.asarray(pattern, dtype=np.int64)

    def decode(self, codes) -> str:
        if self.alphabet is None:
            return " ".join(str(int(c)) for c in codes)
        return "".join(self.alphabet[int(c)] for c in codes)

    def concatenation(self) -> tuple[np.ndarray, np.ndarray]:
        """``(text, doc_of)``: the delimiter-joined string and the owning document per position."""
        parts, owner = [], []
        for i, d in enumerate(self.docs):
            parts += [d, np.array([self.sigma + i])]
            owner.append(np.full(d.size + 1, i, dtype=np.int64))
        return np.concatenate(parts), np.concatenate(owner)


def suffix_array(s: np.ndarray) -> np.ndarray:
    """Prefix doubling, ``O(n log^2 n)``."""
    n = s.shape[0]
    _, rank = np.unique(s, return_inverse=True)
    rank = rank.astype(np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while n > 1 and np.unique(rank).size < n:
        second = np.full(n, -1, np.int64)
        second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r, sec = rank[sa], second[sa]
        step = np.empty(n, np.int64)
        step[0] = 0
        step[1:] = (r[1:] != r[:-1]) | (sec[1:] != sec[:-1])
        rank = np.empty(n, np.int64)
        rank[sa] = np.cumsum(step)
        k *= 2
    return sa


@njit(cache=True)
def lcp_array(s, sa):
    """``lcp[k]`` = longest common prefix of suffixes ``sa[k]`` and ``sa[k+1]``."""
    n = s.shape[0]
    rank = np.empty(n, np.int64)
    for k in range(n):
        rank[sa[k]] = k
    lcp = np.zeros(max(n - 1, 0), np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and s[i + h] == s[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return lcp


@dataclass(frozen=True)
class Locus:
    node: int        # explicit node at or just below the end of the match
    matched: int
    on_edge: bool


@dataclass(frozen=True)
class GeneralizedSuffixTree:
    collection: DocumentCollection
    text: np.ndarray
    doc_of: np.ndarray
    sa: np.ndarray
    lcp: np.ndarray
    tree: LeafColoredTree          # leaf colors are document ids
    string_depth: np.ndarray
    start: np.ndarray              # a suffix start whose path runs through the node
    suffix_start: np.ndarray       # leaf suffix start, -1 at internal nodes
    suffix_link: np.ndarray        # -1 at the root and at leaves
    leaf_of_position: np.ndarray
    _child: dict = field(repr=False, compare=False)

    @property
    def root(self) -> int:
        return self.tree.root

    @property
    def n_nodes(self) -> int:
        return self.tree.n_nodes

    def parent(self, v: int) -> int:
        return int(self.tree.parent[v])

    def child(self, v: int, letter: int) -> int:
        return self._child.get((int(v), int(letter)), -1)

    def edge(self, v: int) -> np.ndarray:
        p = self.tree.parent[v]
        lo = self.start[v] + (self.string_depth[p] if p >= 0 else 0)
        return self.text[lo : self.start[v] + self.string_depth[v]]

    def label(self, v: int) -> np.ndarray:
        return self.text[self.start[v] : self.start[v] + self.string_depth[v]]


def build_gst(docs: DocumentCollection) -> GeneralizedSuffixTree:
    text, doc_of = docs.concatenation()
    n = text.shape[0]
    sa = suffix_array(text)
    lcp = lcp_array(text, sa)
    ks = np.arange(n, dtype=np.int64)
    ref, parent, depth, is_leaf, post, _ = build_virtual_trees(
        np.array([0, n]), ks, n - sa, ks[:-1], lcp
    )
    m = ref.shape[0]
    start = np.where(is_leaf, sa[ref], sa[np.minimum(ref + 1, n - 1)])
    color = np.where(is_leaf, doc_of[start], -1)
    tree = LeafColoredTree.from_parents(parent, color, n_colors=len(docs), order=post)
    suffix_start = np.where(is_leaf, start, -1)
    leaf_of_position = np.empty(n, np.int64)
    leaf_of_position[start[is_leaf]] = np.flatnonzero(is_leaf)

    slink = np.full(m, -1, np.int64)
    inner = np.flatnonzero(~is_leaf & (parent >= 0))
    if inner.size:
        # the join that created an internal node separates two of its leaves
        k = ref[inner]
        lca_idx = build_lca(tree)
        slink[inner] = lca_many(lca_idx, leaf_of_position[sa[k] + 1], leaf_of_position[sa[k + 1] + 1])
    nonroot = np.flatnonzero(parent >= 0)
    first = text[start[nonroot] + depth[parent[nonroot]]]
    child = dict(zip(zip(parent[nonroot].tolist(), first.tolist()), nonroot.tolist()))
    return GeneralizedSuffixTree(docs, text, doc_of, sa, lcp, tree, depth, start,
                                 suffix_start, slink, leaf_of_position, child)


def spell(gst: GeneralizedSuffixTree, pattern) -> Locus | None:
    """Locus of ``pattern`` (codes or text), or None when it does not occur."""
    p = gst.collection.encode(pattern) if isinstance(pattern, str) else np.asarray(pattern, np.int64)
    node = gst.root
    matched = 0
    m = p.shape[0]
    sd = gst.string_depth
    if m and (p.min() < 0 or p.max() >= gst.collection.sigma):
        return None
    while matched < m:
        nxt = gst.child(node, p[matched])
        if nxt < 0:
            return None
        take = min(int(sd[nxt]), m) - matched
        lo = int(gst.start[nxt]) + matched
        if not np.array_equal(gst.text[lo : lo + take], p[matched : matched + take]):
            return None
        matched += take
        node = nxt
    return Locus(node, matched, matched < sd[node])


def leaf_color_tree(gst: GeneralizedSuffixTree) -> LeafColoredTree:
    return gst.tree


def read_documents(path: str | Path) -> DocumentCollection:
    """Read a collection: one document per line, FASTA, or a coded file.

    A coded file starts with ``#SIGMA=<sigma>`` and lists each document as
    whitespace-separated integer codes on its own line.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return parse_documents(lines)


def parse_documents(lines: Iterable[str]) -> DocumentCollection:
    lines = [ln.rstrip("\r\n") for ln in lines]
    body = [ln for ln in lines if ln.strip()]
    if not body:
        raise DocumentFormatError("no documents")
    if body[0].startswith("#SIGMA="):
        try:
            sigma = int(body[0].split("=", 1)[1])
            docs = [[int(x) for x in ln.split()] for ln in body[1:]]
        except ValueError as e:
            raise DocumentFormatError(str(e)) from None
        return DocumentCollection.from_codes(docs, sigma)
    if body[0].startswith(">"):
        docs, cur = [], None
        for ln in body:
            if ln.startswith(">"):
                if cur is not None:
                    docs.append("".join(cur))
                cur = []
            elif cur is None:
                raise DocumentFormatError("sequence data before first FASTA header")
            else:
                cur.append(ln.strip())
        docs.append("".join(cur))
        return DocumentCollection.from_texts(docs)
    return DocumentCollection.from_texts(body)
