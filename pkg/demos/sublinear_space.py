"""
Trading space for query time
============================

The warm-up oracles keep a dense distance graph per piece. The compressed
mode stores only the nonzero points of each Monge density matrix. A larger
r means fewer, bigger pieces at the r-division and fewer stored numbers.
At these small sizes the per-query time is dominated by constant overhead.
"""

import time

import numpy as np

from alignoracle.core import AlignmentGraph, CostModel
from alignoracle.sublinear import build_ddg, build_warmup, compress_ddg, verify_monge

rng = np.random.default_rng(3)
S = bytes(rng.choice(list(b"ACGT"), 64).astype(np.uint8))
T = bytes(rng.choice(list(b"ACGT"), 64).astype(np.uint8))
g = AlignmentGraph(S, T, CostModel.lcs())

# one piece in detail: its DDG is Monge and compresses to few points
o = build_warmup(g, mode="compressed")
P = o.A.pieces_at_depth(o.dr)[5]
d = build_ddg(g, P)
c = compress_ddg(d)
print(f"piece {P.rect}: k={d.k}, {d.k * d.k} entries, {c.nonzeros} nonzero points,"
      f" Monge violations: {len(verify_monge(d))}")

root = int(np.sqrt(g.num_vertices))
qs = np.array([(0, 0, 64, 64), (10, 3, 50, 60), (5, 40, 60, 41)])
print(f"{'r':>6} {'mode':>11} {'stored (r-div)':>15} {'stored (all)':>13} {'us/query':>9}")
for r in (root // 2, root, 4 * root, 16 * root):
    for mode in ("warmup", "compressed"):
        o = build_warmup(g, r=r, mode=mode)
        o.batch_dist(qs)
        t0 = time.perf_counter()
        for _ in range(200):
            o.batch_dist(qs)
        us = 1e6 * (time.perf_counter() - t0) / (200 * len(qs))
        print(f"{r:>6} {mode:>11} {o.stored_numbers_rdivision:>15} {o.stored_numbers:>13} {us:>9.1f}")
