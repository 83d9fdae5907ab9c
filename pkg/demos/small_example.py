"""
A first look at the alignment oracle
====================================

Build the oracle for two short strings, then ask for distances,
LCS scores and the alignment itself on a few substrings.
"""

from alignoracle.core import CostModel
from alignoracle.oracle import alignment_path, alignment_score, cigar, dist_query, preprocess

S, T = b"abac", b"abcab"
o = preprocess(S, T, CostModel.lcs())

# vertex (i, a) stands for the prefix pair S[:i], T[:a]
d, mid = dist_query(o, (0, 0), (4, 5))
print("dist (0,0)->(4,5):", d)
print("LCS(S, T):", alignment_score(o, 0, 4, 0, 5))

# the path is read back from the stored shortest-path trees
script, matched = alignment_path(o, 0, 4, 0, 5)
print("script:", "".join(script), "=", cigar(script), " common subsequence:", matched.decode())

# every substring pair is a query on the same index
for i, j, a, b in [(1, 4, 0, 3), (0, 2, 2, 5), (2, 2, 1, 4)]:
    print(f"LCS(S[{i}:{j}]={S[i:j].decode()!r}, T[{a}:{b}]={T[a:b].decode()!r}) =",
          alignment_score(o, i, j, a, b))

# the same index under edit distance
e = preprocess(S, T, CostModel.levenshtein())
print("edit distance:", alignment_score(e, 0, 4, 0, 5))
