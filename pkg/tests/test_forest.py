import numpy as np
import pytest

from oracles import DATA, SAMPLE, ancestors, lca_closure, random_instance, recursive_leaf_order
from subtree_mode.forest import (
    build_leaf_lists,
    build_single_color_tree,
    forest_to_text,
    split_forest,
)
from subtree_mode.lca import build_lca
from subtree_mode.modes import count_colors
from subtree_mode.tree import parse_tree, read_tree


@pytest.fixture(scope="module")
def sample():
    t = read_tree(DATA / "sample.tree")
    return t, build_lca(t)


def test_sample_leaf_lists(sample):
    lists = build_leaf_lists(sample[0])
    assert [lists[i].tolist() for i in range(4)] == [[0, 3, 5, 8], [2, 6], [1, 9], [4, 7, 10]]


def test_sample_green_tree(sample):
    t, idx = sample
    tree = build_single_color_tree(t, idx, [0, 3, 5, 8])
    image = tree.image.tolist()
    inner = {image[u] for u in range(tree.n_nodes) if not tree.is_leaf[u]}
    assert inner == {SAMPLE["a"], SAMPLE["b"], SAMPLE["d"]}
    assert image[tree.root] == SAMPLE["a"]
    up = {image[u]: (image[tree.parent[u]] if tree.parent[u] >= 0 else -1) for u in range(tree.n_nodes)}
    assert up == {0: SAMPLE["d"], 3: SAMPLE["d"], SAMPLE["d"]: SAMPLE["b"], 5: SAMPLE["b"],
                  SAMPLE["b"]: SAMPLE["a"], 8: SAMPLE["a"], SAMPLE["a"]: -1}


def test_single_leaf_list(sample):
    t, idx = sample
    tree = build_single_color_tree(t, idx, [4])
    assert tree.n_nodes == 1 and tree.image.tolist() == [4] and tree.root == 0


def test_empty_color_gives_empty_tree():
    t = parse_tree("#N=3 DELTA=3\n0 -1\n1 0 0\n2 0 2\n")
    f = split_forest(t, build_lca(t))
    assert f.sizes.tolist() == [1, 0, 1]
    assert f.tree(1).n_nodes == 0 and f.tree(1).root == -1


def test_sample_reverse_index_at_b(sample):
    t, idx = sample
    f = split_forest(t, idx)
    counts = count_colors(f).counts
    at_b = f.at(SAMPLE["b"])
    assert [c for c, _ in at_b] == [0]
    assert counts[at_b[0][1]] == 3


def test_sample_counts(sample):
    t, idx = sample
    f = split_forest(t, idx)
    counts = count_colors(f).counts
    green = {int(f.image[u]): int(counts[u]) for u in range(f.tree_ptr[0], f.tree_ptr[1])}
    assert (green[SAMPLE["d"]], green[SAMPLE["b"]], green[SAMPLE["a"]]) == (2, 3, 4)


def test_monochrome_star():
    t = parse_tree("0 -1\n1 0 0\n2 0 0\n3 0 0\n")
    f = split_forest(t, build_lca(t))
    tree = f.tree(0)
    assert tree.n_nodes == 4
    assert sorted(tree.image.tolist()) == [0, 1, 2, 3]
    assert sorted(tree.children(tree.root).tolist()) == [u for u in range(4) if u != tree.root]


@pytest.mark.parametrize("seed", range(60))
def test_against_pairwise_closure(seed):
    t = random_instance(seed, max_nodes=120)
    idx = build_lca(t)
    parent = t.parent.tolist()
    order = recursive_leaf_order(parent, t.root)
    lists = build_leaf_lists(t)
    for i in range(t.n_colors):
        assert lists[i].tolist() == [v for v in order if t.color[v] == i]
        if len(lists[i]) == 0:
            continue
        tree = build_single_color_tree(t, idx, lists[i])
        image = tree.image.tolist()
        assert len(set(image)) == len(image)
        got = {image[u]: (image[tree.parent[u]] if tree.parent[u] >= 0 else -1) for u in range(tree.n_nodes)}
        assert got == lca_closure(parent, lists[i].tolist())
        for u in range(tree.n_nodes):
            if not tree.is_leaf[u]:
                assert len(tree.children(u)) >= 2


@pytest.mark.parametrize("seed", range(80))
def test_size_bound_and_leaf_cover(seed):
    t = random_instance(seed)
    f = split_forest(t, build_lca(t))
    assert f.n_nodes < 2 * t.n_leaves
    leaf_images = np.sort(f.image[f.is_leaf])
    np.testing.assert_array_equal(leaf_images, np.flatnonzero(t.is_leaf))


@pytest.mark.parametrize("seed", range(30))
def test_ancestry_preserved_exhaustive(seed):
    t = random_instance(seed, max_nodes=32)
    f = split_forest(t, build_lca(t))
    parent = t.parent.tolist()
    for i in range(f.n_trees):
        tree = f.tree(i)
        local = tree.parent.tolist()
        for u in range(tree.n_nodes):
            for w in range(tree.n_nodes):
                in_tree = u in ancestors(local, w)
                in_t = int(tree.image[u]) in ancestors(parent, int(tree.image[w]))
                assert in_tree == in_t


@pytest.mark.parametrize("seed", range(30))
def test_node_leaf_sets_match(seed):
    t = random_instance(seed, max_nodes=100)
    f = split_forest(t, build_lca(t))
    counts = count_colors(f).counts
    lo, hi = t.leaf_interval
    seq = t.leaf_sequence
    for u in range(f.n_nodes):
        v = f.image[u]
        under = seq[lo[v] : hi[v] + 1]
        assert counts[u] == np.count_nonzero(t.color[under] == f.color[u])


def test_forest_text_dump(sample):
    t, idx = sample
    text = forest_to_text(split_forest(t, idx))
    assert text.startswith("# color=0 nodes=7\n")
    assert text.count("# color=") == 4
    assert f"phi={SAMPLE['d']}" in text
