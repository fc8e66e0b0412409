"""The baseline algorithms side by side on a random tree, plus the range-mode index they rely on."""
import time

import numpy as np

from subtree_mode import (
    ba1_all_modes,
    ba2_all_modes,
    ba3_all_modes,
    build_range_mode,
    random_tree,
    range_mode_query,
    scm_all_modes,
)

rng = np.random.default_rng(7)
a = rng.integers(0, 5, 40)
idx = build_range_mode(a, 6)
print("array:", " ".join(map(str, a.tolist())))
print(f"{idx.n_blocks} blocks of width {idx.block}")
for i, j in [(0, 39), (3, 11), (17, 18), (20, 33)]:
    c, f = range_mode_query(idx, i, j)
    assert f == np.bincount(a[i : j + 1]).max()
    print(f"  mode of a[{i}..{j}] = {c} (x{f})")

t = random_tree(200_000, 64, seed=1)
print(f"\nrandom tree: {t.n_nodes} nodes, {t.n_leaves} leaves, {t.n_colors} colors")
ref = None
for name, fn in [("scm", scm_all_modes), ("ba1", ba1_all_modes), ("ba2", ba2_all_modes), ("ba3", ba3_all_modes)]:
    fn(random_tree(50, 4, seed=0))  # compile kernels first
    t0 = time.perf_counter()
    freq = fn(t).freq
    dt = time.perf_counter() - t0
    ref = freq if ref is None else ref
    print(f"  {name}: {dt:6.2f}s  same as scm: {bool((freq == ref).all())}")
