import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alignoracle.core import AlignmentGraph, CostModel, dp_distance
from alignoracle.decomposition import build_decomposition
from alignoracle.sublinear import (
    Ddg, build_ddg, build_warmup, compress_ddg, ddg_entry, sublinear_query,
    transform_weights, verify_monge,
)
from conftest import FIG1, max_score, random_strings

models = [CostModel.lcs(), CostModel.levenshtein(), CostModel.weighted(2, 1, 0)]


def test_transform_lcs_weights():
    assert transform_weights(2, 0, 0) == (0, 2, 1)
    with pytest.raises(ValueError):
        transform_weights(2, 2, 0)


@given(st.binary(min_size=1, max_size=7), st.binary(min_size=1, max_size=7))
def test_transformed_distance_gives_best_score(x, y):
    x = bytes(c % 3 + 97 for c in x)
    y = bytes(c % 3 + 97 for c in y)
    # LCS written as weights: 1 per match, nothing otherwise
    o = build_warmup(x, y, CostModel.weighted(1, 0, 0))
    assert o.alignment_score(0, len(x), 0, len(y)) == max_score(x, y, 1, 0, 0)


def test_ddg_2x2_piece():
    g = AlignmentGraph(b"ab", b"ab", CostModel.levenshtein())
    A = build_decomposition(2, 2)
    P = next(P for P in A.pieces_at_depth(A.max_depth) if P.rect == (0, 0, 1, 1))
    d = build_ddg(g, P)
    assert d.k == 3
    # top: (0,1), (0,0), (1,0); bot: (1,0), (1,1), (0,1)
    assert d.top == [(0, 1), (0, 0), (1, 0)] and d.bot == [(1, 0), (1, 1), (0, 1)]
    assert d.M[1].tolist() == [1, 0, 1]          # from (0,0): down, diagonal match, right
    assert d.M[0, 2] == 0                        # (0,1) to itself
    assert d.M[0, 1] == 1                        # (0,1) down to (1,1)
    assert d.M[0, 0] == 1 + 1                    # reverse copy to (0,0), then down
    assert d.M[2, 0] == 0


@pytest.mark.parametrize("cost", models, ids=lambda c: c.kind)
def test_ddg_reachable_entries_are_distances(cost):
    g = AlignmentGraph(*random_strings(1, 16, 16, b"ab"), cost)
    A = build_decomposition(16, 16)
    for pid in range(0, A.num_pieces, 7):
        P = A.piece(pid)
        d = build_ddg(g, P)
        assert d.k == (P.x2 - P.x1) + (P.y2 - P.y1) + 1
        for i, j in itertools.product(range(d.k), repeat=2):
            if d.reachable(i, j):
                assert d.M[i, j] == dp_distance(g, d.top[i], d.bot[j])
        assert verify_monge(d) == []


def test_additive_matrix_compresses_to_nothing():
    k = 6
    M = np.add.outer(np.arange(k), np.arange(k))
    A = build_decomposition(4, 4)
    d = Ddg(A.root, k, M, 1)
    c = compress_ddg(d)
    assert c.nonzeros == 0
    assert all(ddg_entry(c, i, j) == i + j - 2 for i in range(1, k + 1) for j in range(1, k + 1))


def test_ddg_entry_edges():
    g = AlignmentGraph(*FIG1)
    A = build_decomposition(g.mp, g.np_)
    d = build_ddg(g, A.root)
    c = compress_ddg(d)
    k = d.k
    assert ddg_entry(c, k, k) == d.M[-1, -1]
    assert [ddg_entry(c, i, k) for i in range(1, k + 1)] == d.M[:, -1].tolist()
    assert [ddg_entry(c, k, j) for j in range(1, k + 1)] == d.M[-1].tolist()
    with pytest.raises(ValueError):
        ddg_entry(c, 0, 1)
    with pytest.raises(ValueError):
        ddg_entry(c, 1, k + 1)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("cost", models, ids=lambda c: c.kind)
def test_compressed_reconstruction(seed, cost):
    g = AlignmentGraph(*random_strings(seed, 16, 32), cost)
    A = build_decomposition(g.mp, g.np_)
    w = cost.w_bound
    for pid in range(A.num_pieces):
        d = build_ddg(g, A.piece(pid))
        c = compress_ddg(d)
        assert c.nonzeros <= 2 * (d.k - 1) * w
        for i in range(1, d.k + 1):
            for j in range(1, d.k + 1):
                assert ddg_entry(c, i, j) == d.M[i - 1, j - 1]


def test_planted_monge_violation():
    M = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    # rows 0/1, cols 0/1: M[1,0]-M[0,0] = 1 > M[1,1]-M[0,1] = -1
    bad = verify_monge(M, 5)
    assert bad == [{"kind": "monge", "i": 1, "j": 1, "lhs": 1, "rhs": -1},
                   {"kind": "monge", "i": 2, "j": 2, "lhs": 1, "rhs": -1}]
    A = build_decomposition(2, 2)
    with pytest.raises(ValueError, match="monge"):
        compress_ddg(Ddg(A.root, 3, M, 5))


def test_planted_bounded_difference_violation():
    M = np.array([[0, 0, 0], [0, 0, 0], [2, 2, 2]])
    bad = verify_monge(M, 1)
    assert bad == [{"kind": "bounded", "i": 2, "j": j, "lhs": 2, "rhs": 1} for j in (1, 2, 3)]


@pytest.mark.parametrize("mode", ["warmup", "compressed"])
def test_fig1_query(mode):
    o = build_warmup(*FIG1, mode=mode)
    assert sublinear_query(o, (0, 0), (4, 5)) == 6
    assert o.alignment_score(0, 4, 0, 5) == 3


def test_same_piece_query_uses_dp():
    g = AlignmentGraph(*random_strings(0, 16, 16))
    o = build_warmup(g, r=25)
    o.reset_query_stats()
    assert sublinear_query(o, (1, 1), (3, 3)) == dp_distance(g, (1, 1), (3, 3))
    assert o.query_stats()["same_piece_dp"] == 1


@pytest.mark.parametrize("mode", ["warmup", "compressed"])
@pytest.mark.parametrize("cost", models, ids=lambda c: c.kind)
def test_exhaustive_16x16(mode, cost):
    g = AlignmentGraph(*random_strings(3, 16, 16), cost)
    o = build_warmup(g, r=9, mode=mode)
    for ux, uy in itertools.product(range(17), repeat=2):
        qs = [(ux, uy, vx, vy) for vx in range(ux, 17) for vy in range(uy, 17)]
        want = [dp_distance(g, (ux, uy), (vx, vy)) for _, _, vx, vy in qs]
        assert o.batch_dist(qs).tolist() == want


@given(st.integers(0, 10 ** 6), st.sampled_from(["warmup", "compressed"]),
       st.integers(1, 300))
def test_random_r_property(seed, mode, r):
    g = AlignmentGraph(*random_strings(seed, 12, 20, b"ab"), CostModel.levenshtein())
    o = build_warmup(g, r=r, mode=mode)
    rng = np.random.default_rng(seed)
    for _ in range(30):
        u = (int(rng.integers(0, 13)), int(rng.integers(0, 21)))
        v = (int(rng.integers(0, 13)), int(rng.integers(0, 21)))
        assert sublinear_query(o, u, v) == dp_distance(g, u, v)


def test_space_shrinks_with_r():
    g = AlignmentGraph(*random_strings(5, 32, 32))
    N = g.num_vertices
    r = int(np.sqrt(N))
    small = build_warmup(g, r=r, mode="compressed")
    big = build_warmup(g, r=4 * r, mode="compressed")
    assert big.stored_numbers_rdivision < small.stored_numbers_rdivision
    assert big.stored_numbers < small.stored_numbers
