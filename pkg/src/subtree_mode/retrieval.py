"""Document retrieval, uniform pattern mining and consistent q-gram counting.

All three run on a generalized suffix tree whose explicit nodes carry the
per-node mode and anti-mode of the document colors below them. A pattern
ending inside an edge reads the answers of the node at the bottom of that
edge.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .modes import AntiModeTable, ModeTable, TopKTable, scm_all_modes, scm_anti_modes, scm_top_k
from .suffix import DocumentCollection, GeneralizedSuffixTree, build_gst, spell


@dataclass
class DocRetrievalIndex:
    gst: GeneralizedSuffixTree
    modes: ModeTable
    anti: AntiModeTable
    _top: dict = field(default_factory=dict, repr=False)

    @property
    def collection(self) -> DocumentCollection:
        return self.gst.collection

    def top_k(self, k: int) -> TopKTable:
        if k not in self._top:
            self._top[k] = scm_top_k(self.gst.tree, k)
        return self._top[k]


def build_retrieval_index(docs: DocumentCollection | list[str]) -> DocRetrievalIndex:
    if not isinstance(docs, DocumentCollection):
        docs = DocumentCollection.from_texts(docs)
    gst = build_gst(docs)
    return DocRetrievalIndex(gst, scm_all_modes(gst.tree), scm_anti_modes(gst.tree))


def dr1(idx: DocRetrievalIndex, pattern) -> tuple[int, int] | None:
    """Document with the most occurrences of ``pattern`` and that count; None if it never occurs."""
    loc = spell(idx.gst, pattern)
    return None if loc is None else idx.modes[loc.node]


def dr_bottom1(idx: DocRetrievalIndex, pattern) -> tuple[int, int] | None:
    """Document with the fewest occurrences (possibly 0); None if the pattern never occurs."""
    loc = spell(idx.gst, pattern)
    return None if loc is None else idx.anti[loc.node]


def dr_topk(idx: DocRetrievalIndex, pattern, k: int) -> list[tuple[int, int]]:
    if k < 1:
        raise ValueError("k must be at least 1")
    loc = spell(idx.gst, pattern)
    if loc is None:
        return []
    k_eff = min(k, len(idx.collection))
    return idx.top_k(k_eff)[loc.node]


@dataclass(frozen=True)
class UniformPattern:
    """Prefixes of length ``lo..hi`` of the path label of ``node``."""

    node: int
    lo: int
    hi: int
    f_max: int
    f_min: int

    def expand(self, gst: GeneralizedSuffixTree) -> list[np.ndarray]:
        label = gst.label(self.node)
        return [label[:n] for n in range(self.lo, self.hi + 1)]


def _delimiter_reach(gst: GeneralizedSuffixTree) -> np.ndarray:
    # number of letters from each position up to the next delimiter
    pos = np.arange(gst.text.shape[0])
    delim = np.where(gst.text >= gst.collection.sigma, pos, gst.text.shape[0])
    nxt = np.minimum.accumulate(delim[::-1])[::-1]
    return nxt - pos


def upm_mine(idx: DocRetrievalIndex, epsilon: int) -> Iterator[UniformPattern]:
    """Compact stream of all epsilon-uniform patterns that occur somewhere.

    Nodes come in preorder, so the expanded patterns come out in
    lexicographic order of letter codes.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    gst = idx.gst
    t = gst.tree
    sd = gst.string_depth
    reach = _delimiter_reach(gst)[gst.start]
    fmax, fmin = idx.modes.freq, idx.anti.freq
    for v in t.preorder.tolist():
        p = t.parent[v]
        if p < 0 or fmax[v] - fmin[v] > epsilon:
            continue
        lo = int(sd[p]) + 1
        hi = int(min(sd[v], reach[v]))
        if lo <= hi:
            yield UniformPattern(v, lo, hi, int(fmax[v]), int(fmin[v]))


def upm_patterns(idx: DocRetrievalIndex, epsilon: int, limit: int | None = None) -> list[str]:
    out: list[str] = []
    for up in upm_mine(idx, epsilon):
        for codes in up.expand(idx.gst):
            if limit is not None and len(out) >= limit:
                return out
            out.append(idx.collection.decode(codes))
    return out


def cqs(idx: DocRetrievalIndex, pattern, q: int, epsilon: int) -> int:
    """Distinct q-grams of ``pattern`` that occur in the collection and whose
    count inside ``pattern`` lies in ``[f_min - epsilon, f_max + epsilon]``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    gst = idx.gst
    p = idx.collection.encode(pattern) if isinstance(pattern, str) else np.asarray(pattern, np.int64)
    m = p.shape[0]
    if q > m:
        return 0
    grams = Counter(p[i : i + q].tobytes() for i in range(m - q + 1))
    sd = gst.string_depth.tolist()
    start = gst.start.tolist()
    parent = gst.tree.parent.tolist()
    slink = gst.suffix_link.tolist()
    text = gst.text.tolist()
    pl = p.tolist()
    fmax, fmin = idx.modes.freq, idx.anti.freq
    root = gst.root
    seen: set[int] = set()
    count = 0
    # (v, n): the match P[i:i+n] ends on the edge into v, sd(parent(v)) < n <= sd(v)
    v, n = root, 0
    for i in range(m - q + 1):
        while n < q:
            if n == sd[v]:
                c = gst.child(v, pl[i + n])
                if c < 0:
                    break
                v = c
            elif text[start[v] + n] != pl[i + n]:
                break
            n += 1
        if n == q and v not in seen:
            # distinct q-grams have distinct loci
            seen.add(v)
            occ = grams[p[i : i + q].tobytes()]
            if fmin[v] - epsilon <= occ <= fmax[v] + epsilon:
                count += 1
        if n == 0:
            continue
        u = parent[v]
        w = root if u == root else slink[u]
        n -= 1
        # skip/count back down to depth n for P[i+1:i+1+n]
        while sd[w] < n:
            w = gst.child(w, pl[i + 1 + sd[w]])
        v = w
    return count
