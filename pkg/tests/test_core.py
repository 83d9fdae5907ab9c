import numpy as np
import pytest
from hypothesis import given, strategies as st

from alignoracle.core import (
    AlignmentGraph, CostModel, build_alignment_graph, dp_distance, dp_shortest_path,
    dp_table, path_weight, score_from_distance, transform_weights,
)
from conftest import FIG1, LCS5, lcs_len, levenshtein, max_score

small = st.binary(min_size=1, max_size=9).map(lambda b: bytes(c % 3 + 97 for c in b))


def test_fig1_graph_shape_and_first_diagonal():
    g = build_alignment_graph(*FIG1, CostModel.lcs())
    assert (g.m, g.n) == (4, 5)
    assert g.edge_weight((0, 0), (1, 1)) == 1
    assert g.edge_weight((0, 1), (1, 2)) is None     # 'a' vs 'b'


def test_single_match_and_no_matches():
    g = AlignmentGraph(b"a", b"a")
    assert g.edge_weight((0, 0), (1, 1)) == 1
    assert dp_distance(g, (0, 0), (1, 1)) == 1
    g = AlignmentGraph(b"ab", b"cd")
    assert all(g.edge_weight((x, y), (x + 1, y + 1)) is None for x in range(2) for y in range(2))


def test_fig1_distance_and_score():
    g = AlignmentGraph(*FIG1)
    assert dp_distance(g, (0, 0), (4, 5)) == 6
    assert score_from_distance(g.cost, 0, 4, 0, 5, 6) == 3


def test_lcs_example_score():
    g = AlignmentGraph(*LCS5)
    d = dp_distance(g, (0, 0), (10, 9))
    assert score_from_distance(g.cost, 0, 10, 0, 9, d) == 5


def test_trivial_distances():
    g = AlignmentGraph(*FIG1)
    for v in [(0, 0), (2, 3), (4, 5)]:
        assert dp_distance(g, v, v) == 0
    assert dp_distance(g, (1, 1), (1, 4)) == 3
    assert dp_distance(g, (2, 2), (1, 3)) is None


def test_empty_substring_scores():
    g = AlignmentGraph(*FIG1, CostModel.levenshtein())
    assert score_from_distance(g.cost, 1, 4, 2, 2, dp_distance(g, (1, 2), (4, 2))) == 3
    g = AlignmentGraph(*FIG1)
    assert score_from_distance(g.cost, 1, 4, 2, 2, dp_distance(g, (1, 2), (4, 2))) == 0


def test_padding_does_not_change_distances():
    g = AlignmentGraph(b"abc", b"abcab")       # padded to 4 x 8
    assert (g.mp, g.np_) == (4, 8)
    assert g.edge_weight((3, 0), (4, 1)) is None
    assert dp_distance(g, (0, 0), (3, 5)) == 3 + 5 - 3


def test_transform_weights():
    assert transform_weights(2, 0, 0) == (0, 2, 1)
    with pytest.raises(ValueError):
        transform_weights(2, 2, 0)
    with pytest.raises(ValueError):
        CostModel.weighted(1, 1, 0)


@given(small, small)
def test_lcs_and_levenshtein_match_textbook(x, y):
    g = AlignmentGraph(x, y)
    d = dp_distance(g, (0, 0), (len(x), len(y)))
    assert score_from_distance(g.cost, 0, len(x), 0, len(y), d) == lcs_len(x, y)
    g = AlignmentGraph(x, y, CostModel.levenshtein())
    assert dp_distance(g, (0, 0), (len(x), len(y))) == levenshtein(x, y)


@given(small, small, st.sampled_from([(2, 1, 1), (3, 1, 0), (4, -1, -2), (2, 0, 0)]))
def test_weighted_score_identity(x, y, w):
    cost = CostModel.weighted(*w)
    g = AlignmentGraph(x, y, cost)
    d = dp_distance(g, (0, 0), (len(x), len(y)))
    assert score_from_distance(cost, 0, len(x), 0, len(y), d) == max_score(x, y, *w)


@given(small, small, st.data())
def test_shortest_path_weight(x, y, data):
    g = AlignmentGraph(x, y, CostModel.levenshtein())
    i = data.draw(st.integers(0, len(x)))
    a = data.draw(st.integers(0, len(y)))
    j = data.draw(st.integers(i, len(x)))
    b = data.draw(st.integers(a, len(y)))
    p = dp_shortest_path(g, (i, a), (j, b))
    assert p[0] == (i, a) and p[-1] == (j, b)
    assert path_weight(g, p) == dp_distance(g, (i, a), (j, b))


def test_dp_table_marks_unreachable():
    g = AlignmentGraph(*FIG1)
    t = dp_table(g, (2, 2))
    assert t[1, 3] == -1 and t[2, 2] == 0
    assert np.all(t[2:, 2:] >= 0)
