"""Mode over the colored sinks reachable from a DAG node, and the boolean
matrix product gadget built on it.

Each distinct sink counts once, however many paths reach it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

import numpy as np

from .tree import LeafColoredTree


class DagFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SinkColoredDag:
    n_nodes: int
    src: np.ndarray
    dst: np.ndarray
    color: np.ndarray       # -1 at non-sinks
    out_ptr: np.ndarray
    out_idx: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int, edges, color) -> "SinkColoredDag":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        color = np.asarray(color, dtype=np.int64)
        if color.shape != (n_nodes,):
            raise DagFormatError("need one color entry per node")
        if e.size and (e.min() < 0 or e.max() >= n_nodes):
            raise DagFormatError("edge endpoint out of range")
        ts = TopologicalSorter({v: [] for v in range(n_nodes)})
        for a, b in e.tolist():
            ts.add(b, a)
        try:
            tuple(ts.static_order())
        except CycleError:
            raise DagFormatError("cycle detected") from None
        outdeg = np.bincount(e[:, 0], minlength=n_nodes)
        sink = outdeg == 0
        if np.any(color[sink] < 0):
            raise DagFormatError("uncolored sink")
        if np.any(color[~sink] >= 0):
            raise DagFormatError("colored non-sink")
        order = np.argsort(e[:, 0], kind="stable")
        ptr = np.zeros(n_nodes + 1, np.int64)
        np.cumsum(outdeg, out=ptr[1:])
        return cls(n_nodes, e[:, 0], e[:, 1], color, ptr, e[order, 1])

    @classmethod
    def from_tree(cls, t: LeafColoredTree) -> "SinkColoredDag":
        kids = np.flatnonzero(t.parent >= 0)
        return cls.from_edges(t.n_nodes, np.stack([t.parent[kids], kids], axis=1), t.color)

    def successors(self, u: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[u] : self.out_ptr[u + 1]]

    def to_text(self) -> str:
        lines = [f"# nodes={self.n_nodes} edges={self.src.shape[0]}"]
        lines += [f"{a} {b}" for a, b in zip(self.src.tolist(), self.dst.tolist())]
        lines += [f"{v} color={c}" for v, c in enumerate(self.color.tolist()) if c >= 0]
        return "\n".join(lines) + "\n"


def sink_histogram(dag: SinkColoredDag, u: int) -> Counter:
    seen = {u}
    stack = [u]
    hist: Counter = Counter()
    while stack:
        x = stack.pop()
        succ = dag.successors(x)
        if succ.size == 0:
            hist[int(dag.color[x])] += 1
        for y in succ.tolist():
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return hist


def dm_query(dag: SinkColoredDag, u: int) -> tuple[int, int]:
    """Most frequent color among distinct sinks reachable from ``u`` (smallest color on ties)."""
    hist = sink_histogram(dag, u)
    c = min(hist, key=lambda k: (-hist[k], k))
    return c, hist[c]


@dataclass(frozen=True)
class BmmInstance:
    """Three-layer gadget: query nodes, one root per row of ``a`` and per
    column of ``b``, then sinks colored by the shared index."""

    a: np.ndarray
    b: np.ndarray
    dag: SinkColoredDag

    @property
    def n(self) -> int:
        return int(self.a.shape[0])

    def y(self, j: int, i: int) -> int:
        return j * self.n + i

    def row_root(self, i: int) -> int:
        return self.n * self.n + i

    def col_root(self, j: int) -> int:
        return self.n * self.n + self.n + j


def build_bmm_dag(a, b) -> BmmInstance:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError("need two square matrices of equal size")
    n = a.shape[0]
    edges = []
    colors = [-1] * (n * n + 2 * n)
    for j in range(n):
        for i in range(n):
            y = j * n + i
            edges += [(y, n * n + i), (y, n * n + n + j)]

    def sink(root: int, color: int) -> None:
        colors.append(color)
        edges.append((root, len(colors) - 1))

    for i in range(n):
        ks = np.flatnonzero(a[i])
        for k in ks.tolist():
            sink(n * n + i, k)
        if ks.size == 0:
            sink(n * n + i, n + i)          # filler color, never shared
    for j in range(n):
        ks = np.flatnonzero(b[:, j])
        for k in ks.tolist():
            sink(n * n + n + j, k)
        if ks.size == 0:
            sink(n * n + n + j, 2 * n + j)
    dag = SinkColoredDag.from_edges(len(colors), edges, colors)
    return BmmInstance(a, b, dag)


def bmm_via_dm(a, b) -> np.ndarray:
    inst = build_bmm_dag(a, b)
    n = inst.n
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            k, _ = dm_query(inst.dag, inst.y(j, i))
            out[i, j] = k < n and inst.a[i, k] and inst.b[k, j]
    return out


def _parse_rows(rows: list[str], n: int) -> np.ndarray:
    m = []
    for r in rows:
        cells = r.split() if len(r.split()) > 1 else list(r.strip())
        if len(cells) != n or any(c not in "01" for c in cells):
            raise DagFormatError(f"bad matrix row {r!r}")
        m.append([int(c) for c in cells])
    return np.array(m, dtype=np.int64).reshape(n, n)


def parse_matrix_pair(source: str | Iterable[str]) -> tuple[np.ndarray, np.ndarray]:
    """``n``, then ``n`` rows of ``a``, then ``n`` rows of ``b``; rows are 0/1
    digits, optionally space separated; ``#`` starts a comment line."""
    lines = source.splitlines() if isinstance(source, str) else list(source)
    body = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise DagFormatError("empty matrix file")
    try:
        n = int(body[0])
    except ValueError:
        raise DagFormatError("first line must be the matrix size") from None
    if n < 1 or len(body) != 1 + 2 * n:
        raise DagFormatError(f"expected {2 * n} matrix rows after the size line")
    return _parse_rows(body[1 : 1 + n], n), _parse_rows(body[1 + n :], n)


def format_matrix(m: np.ndarray) -> str:
    return "".join(" ".join(str(int(x)) for x in row) + "\n" for row in m)
