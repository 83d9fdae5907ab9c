import itertools

import pytest
from hypothesis import given, strategies as st

from alignoracle.core import AlignmentGraph, CostModel, dp_distance, path_weight
from alignoracle.mssp import build_sp_forest, extract_path, side_of_path, sp_dist
from conftest import FIG1, random_strings

models = [CostModel.lcs(), CostModel.levenshtein(), CostModel.weighted(3, 1, 0)]


def scan_side(path, v, axis):
    """Side of v against an explicit monotone path (lower-left = LEFT)."""
    if axis == "row":
        cols = [y for x, y in path if x == v[0]]
        if v[1] < min(cols):
            return "LEFT"
        return "RIGHT" if v[1] > max(cols) else "ON"
    rows = [x for x, y in path if y == v[1]]
    if v[0] > max(rows):
        return "LEFT"
    return "RIGHT" if v[0] < min(rows) else "ON"


def test_leaf_single_source():
    g = AlignmentGraph(b"ab", b"ab", CostModel.levenshtein())
    idx = build_sp_forest(g, (0, 0, 1, 1), [(0, 0)])
    assert sp_dist(idx, (0, 0), (0, 1)) == 1
    assert sp_dist(idx, (0, 0), (1, 0)) == 1
    assert sp_dist(idx, (0, 0), (1, 1)) == 0


def test_fig1_whole_grid():
    g = AlignmentGraph(*FIG1)
    idx = build_sp_forest(g, (0, 0, 4, 5), [(0, 0)])
    assert sp_dist(idx, (0, 0), (4, 5)) == 6
    p = extract_path(idx, (0, 0), (4, 5))
    assert len(p) - 1 == 6 and path_weight(g, p) == 6
    matched = bytes(g.S[a.x] for a, b in zip(p, p[1:]) if b.x == a.x + 1 and b.y == a.y + 1)
    assert matched == b"aba"


def test_trivial_queries():
    g = AlignmentGraph(*FIG1)
    idx = build_sp_forest(g, (0, 0, 4, 5), [(1, 1), (2, 3)])
    assert sp_dist(idx, (1, 1), (1, 1)) == 0
    assert extract_path(idx, (2, 3), (2, 3)) == [(2, 3)]
    assert sp_dist(idx, (2, 3), (1, 4)) is None
    with pytest.raises(ValueError):
        sp_dist(idx, (0, 0), (1, 1))


@pytest.mark.parametrize("cost", models, ids=lambda c: c.kind)
@pytest.mark.parametrize("seed", [0, 1])
def test_forward_and_reverse_match_dp(cost, seed):
    g = AlignmentGraph(*random_strings(seed, 8, 8, b"ab"), cost)
    region = (0, 0, 8, 8)
    verts = list(itertools.product(range(9), range(9)))
    fwd = build_sp_forest(g, region, verts, "forward")
    rev = build_sp_forest(g, region, verts, "reverse")
    for s in verts:
        for v in verts:
            assert sp_dist(fwd, s, v) == dp_distance(g, s, v)
            assert sp_dist(rev, s, v) == dp_distance(g, v, s)


@pytest.mark.parametrize("direction", ["forward", "reverse"])
def test_tree_paths_are_shortest(direction):
    g = AlignmentGraph(*random_strings(3, 8, 8, b"ab"), CostModel.levenshtein())
    src = [(0, 0), (8, 8), (4, 4), (2, 6)]
    idx = build_sp_forest(g, (0, 0, 8, 8), src, direction)
    for s in src:
        for v in itertools.product(range(9), range(9)):
            d = sp_dist(idx, s, v)
            if d is None:
                continue
            p = extract_path(idx, s, v)
            # always returned in edge direction
            ends = (s, v) if direction == "forward" else (v, s)
            assert (p[0], p[-1]) == ends
            assert path_weight(g, p) == d


def test_straight_path_side():
    g = AlignmentGraph(b"aaaaaaaa", b"bbbbbbbb")
    idx = build_sp_forest(g, (0, 0, 8, 8), [(0, 2)])
    assert extract_path(idx, (0, 2), (5, 2))[-1] == (5, 2)
    assert side_of_path(idx, (0, 2), (5, 2), (3, 3), "row") == "RIGHT"
    assert side_of_path(idx, (0, 2), (5, 2), (3, 1), "row") == "LEFT"
    assert side_of_path(idx, (0, 2), (5, 2), (3, 2), "row") == "ON"


@given(st.integers(0, 10 ** 6), st.sampled_from(["forward", "reverse"]),
       st.sampled_from(["row", "column"]))
def test_side_matches_path_scan(seed, direction, axis):
    g = AlignmentGraph(*random_strings(seed, 8, 8, b"ab"), CostModel.levenshtein())
    s = (0, 0) if direction == "forward" else (8, 8)
    idx = build_sp_forest(g, (0, 0, 8, 8), [s], direction)
    for e in itertools.product(range(9), range(9)):
        path = extract_path(idx, s, e)
        span = {x for x, _ in path} if axis == "row" else {y for _, y in path}
        for v in itertools.product(range(9), range(9)):
            if (v[0] if axis == "row" else v[1]) in span:
                assert side_of_path(idx, s, e, v, axis) == scan_side(path, v, axis), (e, v)
