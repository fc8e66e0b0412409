import numpy as np
import pytest

from oracles import bool_product, reachable_histogram
from subtree_mode.dag import (
    DagFormatError,
    SinkColoredDag,
    bmm_via_dm,
    build_bmm_dag,
    dm_query,
    format_matrix,
    parse_matrix_pair,
)
from subtree_mode.modes import scm_all_modes
from subtree_mode.tree import random_tree

A4 = [[1, 0], [0, 1]]
B4 = [[0, 1], [1, 0]]


def test_two_by_two_instance():
    inst = build_bmm_dag(A4, B4)
    assert dm_query(inst.dag, inst.y(0, 1)) == (1, 2)
    assert bmm_via_dm(A4, B4).tolist() == [[0, 1], [1, 0]]


def test_identity():
    eye = np.eye(5, dtype=int)
    np.testing.assert_array_equal(bmm_via_dm(eye, eye), eye)


def test_zero_rows_and_columns():
    a = [[0, 0], [1, 0]]
    b = [[0, 1], [0, 0]]
    assert bmm_via_dm(a, b).tolist() == bool_product(a, b)


def test_random_products():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 17))
        a = (rng.random((n, n)) < rng.random()).astype(int)
        b = (rng.random((n, n)) < rng.random()).astype(int)
        assert bmm_via_dm(a, b).tolist() == bool_product(a.tolist(), b.tolist())


def test_gadget_frequencies_and_layers():
    rng = np.random.default_rng(5)
    n = 6
    a = (rng.random((n, n)) < 0.4).astype(int)
    b = (rng.random((n, n)) < 0.4).astype(int)
    inst = build_bmm_dag(a, b)
    dag = inst.dag
    ab = bool_product(a.tolist(), b.tolist())
    for i in range(n):
        for j in range(n):
            _, f = dm_query(dag, inst.y(j, i))
            assert (f == 2) == bool(ab[i][j]) and f <= 2
    ys = set(range(n * n))
    roots = set(range(n * n, n * n + 2 * n))
    for s, d in zip(dag.src.tolist(), dag.dst.tolist()):
        assert (s in ys and d in roots) or (s in roots and d >= n * n + 2 * n)


def test_tree_as_dag_matches_modes():
    t = random_tree(200, 5, seed=9)
    dag = SinkColoredDag.from_tree(t)
    m = scm_all_modes(t)
    for v in range(t.n_nodes):
        assert dm_query(dag, v)[1] == m.freq[v]


def test_random_dags_against_reachability():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(2, 30))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.15]
        out = {u for u, _ in edges}
        color = [-1 if v in out else int(rng.integers(0, 4)) for v in range(n)]
        dag = SinkColoredDag.from_edges(n, edges, color)
        for u in range(n):
            hist = reachable_histogram(n, edges, color, u)
            c, f = dm_query(dag, u)
            assert f == max(hist.values()) and hist[c] == f


def test_shared_sink_counted_once():
    # two paths from 0 reach sink 3; sink 4 has a different color
    dag = SinkColoredDag.from_edges(5, [(0, 1), (0, 2), (1, 3), (2, 3), (2, 4)], [-1, -1, -1, 0, 1])
    assert dm_query(dag, 0) == (0, 1)


def test_dag_validation():
    with pytest.raises(DagFormatError, match="cycle"):
        SinkColoredDag.from_edges(3, [(0, 1), (1, 2), (2, 1)], [-1, -1, -1])
    with pytest.raises(DagFormatError, match="uncolored sink"):
        SinkColoredDag.from_edges(2, [(0, 1)], [-1, -1])
    with pytest.raises(DagFormatError, match="colored non-sink"):
        SinkColoredDag.from_edges(2, [(0, 1)], [0, 0])


def test_matrix_text():
    a, b = parse_matrix_pair("# swap\n2\n10\n01\n0 1\n1 0\n")
    assert a.tolist() == A4 and b.tolist() == B4
    assert format_matrix(np.array(B4)) == "0 1\n1 0\n"
    for bad in ("", "x\n", "2\n10\n01\n01\n", "2\n12\n01\n01\n10\n"):
        with pytest.raises(DagFormatError):
            parse_matrix_pair(bad)


def test_edge_list_dump():
    text = build_bmm_dag(A4, B4).dag.to_text()
    assert text.splitlines()[0].startswith("# nodes=")
    assert "color=1" in text
