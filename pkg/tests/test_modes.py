import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import (
    BLUE,
    DATA,
    SAMPLE,
    GREEN,
    ORANGE,
    RED,
    node_colored_histograms,
    random_instance,
    tree_histograms,
)
from subtree_mode.modes import (
    distinct_colors,
    format_answer_table,
    node_colored_modes,
    parse_answer_table,
    scm_all_modes,
    scm_anti_modes,
    scm_top_k,
)
from subtree_mode.forest import split_forest
from subtree_mode.lca import build_lca
from subtree_mode.tree import TreeFormatError, contract_unary_paths, parse_tree, random_tree, read_tree


@pytest.fixture(scope="module")
def sample():
    return read_tree(DATA / "sample.tree")


def test_sample_modes(sample):
    m = scm_all_modes(sample)
    assert m[SAMPLE["a"]] == (GREEN, 4)
    assert m[SAMPLE["b"]] == (GREEN, 3)
    assert m[SAMPLE["c"]] == (ORANGE, 2)
    assert m[SAMPLE["d"]] == (GREEN, 2)
    # h holds one red and one green leaf; ties go to the smaller id
    assert m[SAMPLE["h"]] == (GREEN, 1)
    for v in range(11):
        assert m[v] == (int(sample.color[v]), 1)


def test_sample_anti_modes(sample):
    a = scm_anti_modes(sample)
    h = tree_histograms(sample)
    assert a[SAMPLE["a"]][1] == 2 and a[SAMPLE["a"]][0] in (RED, BLUE)
    assert a[SAMPLE["e"]][1] == 0 and h[SAMPLE["e"], a[SAMPLE["e"]][0]] == 0
    for name, expect in zip("bcdefgh", (1, 1, 0, 0, 0, 0, 0)):
        c, f = a[SAMPLE[name]]
        assert f == expect and h[SAMPLE[name], c] == expect


def test_sample_top2_root(sample):
    assert scm_top_k(sample, 2)[SAMPLE["a"]] == [(GREEN, 4), (ORANGE, 3)]


def test_one_leaf():
    t = parse_tree("0 -1 7")
    assert scm_all_modes(t)[0] == (7, 1)
    c, f = scm_anti_modes(t)[0]
    assert f == 0 and c != 7 and 0 <= c < 8


def test_monochrome_anti_mode_is_leaf_count():
    t = random_tree(300, 1, seed=4)
    a = scm_anti_modes(t)
    np.testing.assert_array_equal(a.freq, t.leaf_count)


def _check_attains(h, table, expected):
    np.testing.assert_array_equal(table.freq, expected)
    np.testing.assert_array_equal(h[np.arange(h.shape[0]), table.color], expected)


@pytest.mark.parametrize("seed", range(150))
def test_random_modes_and_anti_modes(seed):
    t = random_instance(seed)
    h = tree_histograms(t)
    _check_attains(h, scm_all_modes(t), h.max(axis=1))
    _check_attains(h, scm_anti_modes(t), h.min(axis=1))


@pytest.mark.parametrize("seed", range(80))
def test_random_top_k(seed):
    t = random_instance(seed)
    h = tree_histograms(t)
    for k in sorted({1, 2, t.n_colors}):
        table = scm_top_k(t, k)
        for v in range(t.n_nodes):
            row = table[v]
            expect = sorted((x for x in h[v] if x > 0), reverse=True)[:k]
            assert [f for _, f in row] == expect
            assert all(h[v, c] == f for c, f in row)
            assert len({c for c, _ in row}) == len(row)


def test_top_k_rejects_zero(sample):
    with pytest.raises(ValueError):
        scm_top_k(sample, 0)


def test_top_1_matches_modes():
    t = random_tree(500, 6, seed=2)
    np.testing.assert_array_equal(scm_top_k(t, 1).freq[:, 0], scm_all_modes(t).freq)


@pytest.mark.parametrize("seed", range(30))
def test_order_invariants(seed):
    t = random_instance(seed)
    m, a = scm_all_modes(t), scm_anti_modes(t)
    kids = np.flatnonzero(t.parent >= 0)
    par = t.parent[kids]
    assert np.all(m.freq[par] >= m.freq[kids])
    assert np.all(a.freq[par] >= a.freq[kids])
    assert np.all(a.freq <= m.freq)
    assert np.all(m.freq * t.n_colors >= t.leaf_count)


@pytest.mark.parametrize("seed", range(30))
def test_dissolved_nodes_share_answers(seed):
    t = random_tree(150, 3, seed=seed, max_arity=2)
    _, cmap = contract_unary_paths(t)
    m, a = scm_all_modes(t), scm_anti_modes(t)
    rep = cmap.original[cmap.surviving]
    assert np.any(rep != np.arange(t.n_nodes))
    np.testing.assert_array_equal(m.freq, m.freq[rep])
    np.testing.assert_array_equal(a.freq, a.freq[rep])
    assert np.all(t.n_children[rep] != 1)


@pytest.mark.parametrize("seed", range(20))
def test_distinct_color_counts(seed):
    t = random_instance(seed)
    tc, _ = contract_unary_paths(t)
    d = distinct_colors(tc, split_forest(tc, build_lca(tc)))
    h = tree_histograms(tc)
    np.testing.assert_array_equal(d, (h > 0).sum(axis=1))


def test_node_colored_examples():
    assert node_colored_modes([-1], [5])[0] == (5, 1)
    assert node_colored_modes([-1, 0, 0], [0, 1, 1])[0] == (1, 2)
    with pytest.raises(TreeFormatError):
        node_colored_modes([-1, 0], [0, -1])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 120), st.integers(1, 6), st.integers(0, 10**6))
def test_node_colored_random(n, delta, seed):
    rng = np.random.default_rng(seed)
    parent = [-1] + [int(rng.integers(0, v)) for v in range(1, n)]
    color = rng.integers(0, delta, n).tolist()
    m = node_colored_modes(parent, color, delta)
    h = node_colored_histograms(parent, color, delta)
    _check_attains(h, m, h.max(axis=1))


def test_answer_table_round_trip(sample):
    m, a = scm_all_modes(sample), scm_anti_modes(sample)
    text = format_answer_table(m, a)
    assert f"{SAMPLE['a']} 0 4 " in text
    back_m, back_a = parse_answer_table(text)
    np.testing.assert_array_equal(back_m.freq, m.freq)
    np.testing.assert_array_equal(back_m.color, m.color)
    np.testing.assert_array_equal(back_a.freq, a.freq)
    only_m, none = parse_answer_table(format_answer_table(m))
    assert none is None and np.array_equal(only_m.color, m.color)
