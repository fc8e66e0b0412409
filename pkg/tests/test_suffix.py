import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import occurrences, random_docs
from subtree_mode.lca import build_lca, lca
from subtree_mode.suffix import (
    DocumentCollection,
    DocumentFormatError,
    build_gst,
    leaf_color_tree,
    lcp_array,
    parse_documents,
    read_documents,
    spell,
    suffix_array,
)


def colors_under(gst, v):
    t = gst.tree
    lo, hi = t.leaf_interval
    return np.bincount(t.color[t.leaf_sequence[lo[v] : hi[v] + 1]], minlength=t.n_colors)


def test_banana():
    docs = DocumentCollection.from_texts(["banana"])
    gst = build_gst(docs)
    assert sorted(gst.suffix_start[gst.suffix_start >= 0].tolist()) == list(range(7))
    loc = spell(gst, "an")
    assert loc.on_edge and loc.matched == 2
    assert docs.decode(gst.label(loc.node)) == "ana" and gst.string_depth[loc.node] == 3
    assert spell(gst, "ana") == type(loc)(loc.node, 3, False)
    assert spell(gst, "nab") is None


def test_two_documents_colors():
    gst = build_gst(DocumentCollection.from_texts(["aaaab", "aab"]))
    assert gst.tree.n_leaves == 10
    np.testing.assert_array_equal(gst.tree.color[gst.suffix_start == -1], -1)
    starts = gst.suffix_start
    leaves = np.flatnonzero(starts >= 0)
    assert all(gst.tree.color[v] == (0 if starts[v] < 6 else 1) for v in leaves)
    v = spell(gst, "aa").node
    assert colors_under(gst, v).tolist() == [3, 1]


def test_single_letter_document():
    gst = build_gst(DocumentCollection.from_texts(["a"]))
    assert gst.n_nodes == 3
    assert len(gst.tree.children(gst.root)) == 2
    assert leaf_color_tree(gst).n_colors == 1


def test_reserved_code_rejected():
    with pytest.raises(DocumentFormatError, match="reserved delimiter"):
        DocumentCollection.from_codes([[0, 1, 2]], sigma=2)
    with pytest.raises(DocumentFormatError):
        DocumentCollection.from_texts(["ab", ""])


def test_suffix_and_lcp_arrays_against_sorting():
    rng = np.random.default_rng(0)
    for _ in range(50):
        s = rng.integers(0, 3, int(rng.integers(1, 40)))
        s = np.append(s, 3)
        sa = suffix_array(s)
        expect = sorted(range(len(s)), key=lambda i: s[i:].tolist())
        assert sa.tolist() == expect
        lcp = lcp_array(s, sa)
        for k in range(len(s) - 1):
            a, b = s[sa[k] :].tolist(), s[sa[k + 1] :].tolist()
            n = 0
            while n < min(len(a), len(b)) and a[n] == b[n]:
                n += 1
            assert lcp[k] == n


@pytest.mark.parametrize("seed", range(40))
def test_structure_and_suffix_links(seed):
    docs = DocumentCollection.from_texts(random_docs(seed))
    gst = build_gst(docs)
    t = gst.tree
    sd = gst.string_depth
    assert t.n_leaves == gst.text.shape[0]
    for v in range(gst.n_nodes):
        p = t.parent[v]
        if p >= 0:
            assert sd[v] == sd[p] + gst.edge(v).shape[0]
            assert gst.child(p, gst.edge(v)[0]) == v
        else:
            assert sd[v] == 0
        if not t.is_leaf[v]:
            assert p < 0 or len(t.children(v)) >= 2
    idx = build_lca(t)
    for v in range(gst.n_nodes):
        w = gst.suffix_link[v]
        if w < 0:
            continue
        assert sd[w] == sd[v] - 1
        np.testing.assert_array_equal(gst.label(w), gst.label(v)[1:])
        steps, x = 0, v
        while x != gst.root:
            x = gst.suffix_link[x]
            steps += 1
        assert steps <= sd[v]
    rng = np.random.default_rng(seed)
    n = gst.text.shape[0]
    for p, q in rng.integers(0, n - 1, (30, 2)).tolist():
        if p == q or gst.text[p] >= docs.sigma:
            continue
        u = lca(idx, gst.leaf_of_position[p], gst.leaf_of_position[q])
        if u != gst.root:
            assert gst.suffix_link[u] == lca(idx, gst.leaf_of_position[p + 1], gst.leaf_of_position[q + 1])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.text("abc", min_size=1, max_size=25), min_size=1, max_size=4), st.text("abcd", max_size=6))
def test_locus_counts_match_naive(texts, pattern):
    gst = build_gst(DocumentCollection.from_texts(texts))
    counts = [occurrences(s, pattern) for s in texts]
    loc = spell(gst, pattern)
    if pattern and sum(counts) == 0:
        assert loc is None
        return
    if not pattern:
        assert loc.node == gst.root and loc.matched == 0
        return
    assert colors_under(gst, loc.node).tolist() == counts


def test_whole_document_spells():
    texts = ["abcab", "cab"]
    gst = build_gst(DocumentCollection.from_texts(texts))
    loc = spell(gst, "abcab")
    assert loc.matched == 5 and colors_under(gst, loc.node).sum() >= 1


def test_readers(tmp_path):
    p = tmp_path / "lines.txt"
    p.write_text("aaaab\naab\n")
    assert [d.tolist() for d in read_documents(p).docs] == [[0, 0, 0, 0, 1], [0, 0, 1]]
    fasta = parse_documents([">one", "AC", "GT", ">two", "TT"])
    assert fasta.decode(fasta.docs[0]) == "ACGT" and fasta.decode(fasta.docs[1]) == "TT"
    coded = parse_documents(["#SIGMA=2", "0 1 1", "1 0"])
    assert coded.sigma == 2 and coded.docs[1].tolist() == [1, 0]
    with pytest.raises(DocumentFormatError):
        parse_documents(["#SIGMA=2", "0 5"])
    with pytest.raises(DocumentFormatError):
        parse_documents([])
