"""Document retrieval on a generalized suffix tree: most and least frequent
document per pattern, top-k documents, uniform patterns and q-gram consistency."""
from subtree_mode import build_retrieval_index, cqs, dr1, dr_bottom1, dr_topk
from subtree_mode.retrieval import upm_patterns

docs = ["abracadabra", "cadabra", "abba", "bacab"]
idx = build_retrieval_index(docs)
gst = idx.gst
print(f"{len(docs)} documents, suffix tree with {gst.n_nodes} nodes")

for p in ["a", "ab", "bra", "cab", "zzz"]:
    print(f"  {p!r:>6}: most={dr1(idx, p)}  least={dr_bottom1(idx, p)}  top2={dr_topk(idx, p, 2)}")

# patterns whose per-document counts differ by at most epsilon
for eps in (0, 1):
    pats = upm_patterns(idx, eps, limit=12)
    print(f"\nuniform patterns, epsilon={eps}: {pats}")

for q in (1, 2, 3):
    print(f"consistent {q}-grams of 'abcab': {cqs(idx, 'abcab', q, 1)}")
