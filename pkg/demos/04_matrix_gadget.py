"""Boolean matrix product read off mode queries on a sink-colored DAG."""
import numpy as np

from subtree_mode import bmm_via_dm, build_bmm_dag, dm_query

rng = np.random.default_rng(3)
a = rng.random((5, 5)) < 0.3
b = rng.random((5, 5)) < 0.3
inst = build_bmm_dag(a, b)
print(f"DAG: {inst.dag.n_nodes} nodes, {len(inst.dag.src)} edges")

# query node (j, i) reaches row i of a and column j of b; a shared color means a hit
c, f = dm_query(inst.dag, inst.y(2, 1))
print(f"mode below y(2,1): color {c} x{f}, so (AB)[1,2] = {int(f >= 2)}")

prod = bmm_via_dm(a, b)
expect = (a.astype(int) @ b.astype(int)) > 0
print("A =\n", a.astype(int))
print("B =\n", b.astype(int))
print("AB via mode queries =\n", np.asarray(prod).astype(int))
assert (np.asarray(prod).astype(bool) == expect).all()
print("matches numpy")
