import numpy as np
import pytest

from alignoracle.core import AlignmentGraph, CostModel, dp_distance
from alignoracle.decomposition import build_decomposition, cover_outside
from alignoracle.voronoi import (
    VoronoiProblem, VoronoiRepr, SiteRecord, brute_last, brute_voronoi, build_gamma_index,
    build_vd, dp_provider, gamma_search, partition, redundant_sites, voronoi_lasts, zoom,
)
from conftest import random_strings


def diagram(seed, m, n, cost=None, depth=None):
    """A random VD(u, Q) problem: weights are true distances from u in Q."""
    rng = np.random.default_rng(seed)
    g = AlignmentGraph(*random_strings(seed, m, n, b"abc"), cost or CostModel.lcs())
    A = build_decomposition(g.mp, g.np_)
    while True:
        pid = int(rng.integers(1, A.num_pieces))
        Q = A.piece(pid)
        if depth is not None and Q.depth != depth:
            continue
        sites = A.bot(Q)
        if not sites:
            continue
        u = (int(rng.integers(Q.x1, Q.x2 + 1)), int(rng.integers(Q.y1, Q.y2 + 1)))
        om = [dp_distance(g, u, s) for s in sites]
        if any(w is not None for w in om):
            return g, A, Q, u, om


def cells(assign):
    out = {}
    for (x, y), j in np.ndenumerate(assign):
        if j >= 0:
            out.setdefault(int(j), []).append((x, y))
    return out


def test_single_site_owns_everything_reachable():
    g = AlignmentGraph(*random_strings(1, 8, 8, b"ab"))
    A = build_decomposition(8, 8)
    Q = A.pieces_at_depth(2)[0]                   # rows 0..4, cols 0..4
    sites = A.bot(Q)
    om = [None] * len(sites)
    om[3] = 0
    assign = brute_voronoi(g, A, Q, om)
    s = sites[3]
    for (x, y), j in np.ndenumerate(assign):
        reach = x >= s[0] and y >= s[1] and not A.is_internal(Q, (x, y))
        assert (j == 3) == reach


def test_tie_goes_to_larger_key():
    g = AlignmentGraph(b"aaaaaaaa", b"bbbbbbbb")    # no matches: d = dx + dy
    A = build_decomposition(8, 8)
    Q = A.pieces_at_depth(2)[0]
    sites = A.bot(Q)
    a, b = sites.index((4, 2)), sites.index((4, 3))
    om = [None] * len(sites)
    om[a], om[b] = 1, 0
    assign = brute_voronoi(g, A, Q, om)
    # (5, 3): 1 + 2 via (4, 2) against 0 + 1 via (4, 3)
    assert assign[5, 3] == b
    om[a], om[b] = 0, 1
    assign = brute_voronoi(g, A, Q, om)
    # (5, 4): 0 + 3 against 1 + 2 is a tie; the larger weight wins
    assert assign[5, 4] == b


@pytest.mark.parametrize("seed", range(8))
def test_staircase_cells(seed):
    g, A, Q, u, om = diagram(seed, 8, 16)
    for j, cell in cells(brute_voronoi(g, A, Q, om)).items():
        rows = {}
        for x, y in cell:
            rows.setdefault(x, []).append(y)
        xs = sorted(rows)
        for x in xs:
            ys = sorted(rows[x])
            assert ys == list(range(ys[0], ys[-1] + 1))
        assert xs == list(range(xs[0], xs[-1] + 1))
        for x0, x1 in zip(xs, xs[1:]):
            i0, j0 = min(rows[x0]), max(rows[x0])
            i1, j1 = min(rows[x1]), max(rows[x1])
            assert i0 <= i1 <= j0 <= j1


def test_partition_single_site():
    g, A, Q, u, om = diagram(3, 16, 16, depth=3)
    prob = VoronoiProblem(g, A, Q, om, dp_provider(g, A.bot(Q)))
    checked = 0
    for j, w in enumerate(om):
        if w is None:
            continue
        s = A.bot(Q)[j]
        for H in cover_outside(A, Q):
            reach = [v for v in A.top(H) if v[0] >= s[0] and v[1] >= s[1]]
            res = partition(prob, H, "top", U=[j])
            if reach:
                assert res == [(j, reach)]
                checked += 1
            else:
                assert res == []
    assert checked


@pytest.mark.parametrize("seed", range(10))
def test_partition_matches_brute(seed):
    g, A, Q, u, om = diagram(seed, 16, 16)
    prob = VoronoiProblem(g, A, Q, om, dp_provider(g, A.bot(Q)))
    assign = brute_voronoi(g, A, Q, om)
    for H in cover_outside(A, Q):
        for which in ("top", "bot"):
            side = A.top(H) if which == "top" else A.bot(H)
            res = partition(prob, H, which)
            got = {tuple(v): s for s, vs in res for v in vs}
            want = {v: int(assign[v]) for v in side if assign[v] >= 0}
            assert got == want
            # sites appear in increasing order along the side
            order = [s for s, _ in res]
            assert order == sorted(order)


def test_zoom_without_lasts_emits_nothing():
    g, A, Q, u, om = diagram(5, 16, 16)
    prob = VoronoiProblem(g, A, Q, om, dp_provider(g, A.bot(Q)))
    lasts = brute_last(brute_voronoi(g, A, Q, om))
    for H in cover_outside(A, Q):
        inside = [j for j, v in lasts.items() if H.contains(v) and v not in A.bot(H)]
        if not inside:
            calls = int(prob.stats[3])
            assert zoom(prob, None, H) == {}
            assert int(prob.stats[3]) == calls + 1
            return
    pytest.skip("every cover piece holds a last vertex")


def test_fig7_redundant_site():
    top = [1, 2, 4, 5, 6, 7]
    bot = [1, 2, 4, 6, 7]
    assert redundant_sites(top, bot) == [2]
    assert [s for s in top if s != 2] == [1, 4, 5, 6, 7]


@pytest.mark.parametrize("seed", range(6))
def test_dropping_redundant_site_keeps_lasts(seed):
    g, A, Q, u, om = diagram(seed, 16, 16)
    prob = VoronoiProblem(g, A, Q, om, dp_provider(g, A.bot(Q)))
    full = brute_last(brute_voronoi(g, A, Q, om))
    for H in cover_outside(A, Q):
        top = [s for s, _ in partition(prob, H, "top")]
        bot = [s for s, _ in partition(prob, H, "bot")]
        for s2 in redundant_sites(top, bot):
            # U = top is safe for H; so is U minus s2
            om2 = [w if j in top and j != s2 else None for j, w in enumerate(om)]
            sub = brute_last(brute_voronoi(g, A, Q, om2))
            inner = lambda d: {j: v for j, v in d.items() if H.contains(v) and v not in A.bot(H)}
            assert inner(sub) == inner(full)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("cost", [CostModel.lcs(), CostModel.levenshtein()], ids=["lcs", "edit"])
def test_zoom_lasts_match_brute(seed, cost):
    g, A, Q, u, om = diagram(seed, 16, 32, cost)
    prob = VoronoiProblem(g, A, Q, om, dp_provider(g, A.bot(Q)))
    got = {j: tuple(v) for j, v in voronoi_lasts(prob).items()}
    assert got == brute_last(brute_voronoi(g, A, Q, om))


def test_root_diagram_is_empty():
    g = AlignmentGraph(*random_strings(0, 8, 8))
    A = build_decomposition(8, 8)
    vd = build_vd(g, A, (0, 0), A.root, [], dp_provider(g, []))
    assert vd.records == [] and vd.nonempty() == []


def test_build_vd_records():
    g, A, Q, u, om = diagram(11, 16, 16)
    vd = build_vd(g, A, u, Q, om, dp_provider(g, A.bot(Q)))
    ref = brute_last(brute_voronoi(g, A, Q, om))
    assert {j: r.last for j, r in vd.nonempty()} == ref
    for j, r in vd.nonempty():
        assert r.d_last == om[j] + dp_distance(g, A.bot(Q)[j], r.last)
    lasts = [r.last for _, r in vd.nonempty()]
    assert len(set(lasts)) == len(lasts)


def _repr(Q, lasts, k):
    recs = [None] * k
    for j, v in lasts.items():
        recs[j] = SiteRecord(v, None, 0)
    return VoronoiRepr((0, 0), Q, [None] * k, [0] * k, recs)


def test_gamma_empty_and_single():
    A = build_decomposition(8, 8)
    Q = A.pieces_at_depth(2)[0]
    gi = build_gamma_index(_repr(Q, {}, 5))
    assert all(gi.version("row", x) == [] for x in range(5, 9))
    gi = build_gamma_index(_repr(Q, {2: (6, 7)}, 5))
    for x in range(5, 9):
        assert gi.version("row", x) == ([2] if x <= 6 else [])
    assert gamma_search(gi, "row", 5, lambda s: "RIGHT") == (2, None)
    assert gamma_search(gi, "row", 5, lambda s: "ON") == (2, None)


@pytest.mark.parametrize("seed", range(8))
def test_gamma_versions(seed):
    g, A, Q, u, om = diagram(seed, 16, 16)
    vd = build_vd(g, A, u, Q, om, dp_provider(g, A.bot(Q)))
    gi = build_gamma_index(vd)
    nonempty = vd.nonempty()
    prev = None
    for x in range(Q.x2 + 1, g.mp + 1):
        want = [j for j, r in nonempty if r.last[0] >= x]
        got = gi.version("row", x)
        assert got == want
        if prev is not None:       # later versions are subsequences of earlier ones
            it = iter(prev)
            assert all(s in it for s in got)
        prev = got
    for y in range(Q.y2 + 1, g.np_ + 1):
        assert gi.version("column", y) == [j for j, r in nonempty if r.last[1] >= y]


@pytest.mark.parametrize("seed", range(6))
def test_gamma_search_brackets_target(seed):
    g, A, Q, u, om = diagram(seed, 16, 16)
    vd = build_vd(g, A, u, Q, om, dp_provider(g, A.bot(Q)))
    gi = build_gamma_index(vd)
    for x in range(Q.x2 + 1, g.mp + 1):
        ver = gi.version("row", x)
        for t in ver:
            probe = lambda s: "ON" if s == t else ("RIGHT" if s < t else "LEFT")
            assert gamma_search(gi, "row", x, probe) == (t, None)
            # a point strictly between t and its successor
            probe = lambda s: "RIGHT" if s <= t else "LEFT"
            pred, succ = gamma_search(gi, "row", x, probe)
            assert pred == t
            nxt = ver[ver.index(t) + 1] if ver.index(t) + 1 < len(ver) else None
            assert succ == nxt
