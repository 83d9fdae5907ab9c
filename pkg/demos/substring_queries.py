"""
Substring queries at scale
==========================

Index two random DNA strings once, answer many substring queries in a
batch and compare a sample against the textbook dynamic program.
"""

import time

import numpy as np

from alignoracle.cli import dp_distances
from alignoracle.core import CostModel, score_from_distance
from alignoracle.oracle import preprocess

rng = np.random.default_rng(1)
S = bytes(rng.choice(list(b"ACGT"), 96).astype(np.uint8))
T = bytes(rng.choice(list(b"ACGT"), 160).astype(np.uint8))

t0 = time.perf_counter()
o = preprocess(S, T, CostModel.levenshtein())
print(f"build: {time.perf_counter() - t0:.2f}s, levels t={o.info['t']}, "
      f"{o.info['diagrams']} diagrams, {o.info['records']} records")

# rows are (i, j, a, b) for S[i:j] against T[a:b]
i = np.sort(rng.integers(0, len(S) + 1, size=(50000, 2)), axis=1)
a = np.sort(rng.integers(0, len(T) + 1, size=(50000, 2)), axis=1)
qs = np.stack([i[:, 0], i[:, 1], a[:, 0], a[:, 1]], axis=1)

t0 = time.perf_counter()
d = o.batch_dist(qs[:, [0, 2, 1, 3]])
dt = time.perf_counter() - t0
print(f"{len(qs)} queries in {dt:.3f}s ({1e6 * dt / len(qs):.2f} us each)")

t0 = time.perf_counter()
ref = dp_distances(o.g, qs[:2000])
print(f"DP on 2000 of them: {time.perf_counter() - t0:.3f}s, "
      f"mismatches: {int((ref != d[:2000]).sum())}")

q = qs[0].tolist()
print("example", q, "edit distance",
      score_from_distance(o.g.cost, *q, int(d[0])))
print("stats:", o.query_stats().counts)
