"""Preprocessing driver and query engine of the alignment oracle.

Stored structures, for a division with levels t..0:

* for every level-i piece P (0 < i < t), shortest-path trees from each
  vertex of bot(P): reversed inside P and forward inside P's parent Q;
* for every level-i piece P (i < t - 1) and w in bot(P) (every vertex for
  i = 0), the Voronoi diagram VD(w, Q) of P's parent Q with weights
  dist(w, .), stored as per-site (last, mid) records, plus per-axis
  persistent point-location trees.

A query (u, v) walks up u's ancestors collecting at most twice as many
candidate vertices per level (GetNextCandidates) and finally combines the
two tree distances through the best candidate.
"""

import time
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import (
    INF, AlignmentGraph, CostModel, Vertex,
    dp_box, dp_dist, dp_path, score_from_distance, struct_class,
)
from .decomposition import (
    DecompositionTree, DivisionTree, anc_k, bot_index, bot_len,
    bot_vertex, cover_k, level_piece, lev_k, piece_id, piece_rect,
    share_piece,
)
from .mssp import build_tree, new_pool, tree_dist, tree_path, tree_side
from .voronoi import (
    VS, GPool, N_STATS, gamma_axis_k, new_gpool, register_provider, zoom_k,
)

KIND_MID, KIND_SMALL, KIND_LINE = 0, 1, 2
SAME_PIECE = "SAME_PIECE"

OC = struct_class(__name__, "OC", [
    "sc", "tc", "wts", "geo", "nv",
    # shortest-path trees
    "pool", "piece_slot", "sbox", "soff",
    # diagrams
    "vd_map", "vd_q", "vd_rec", "vd_k", "vd_gam",
    "r_last", "r_kind", "r_mid", "r_slot", "r_om", "r_dlast",
    "gp", "crit", "roots",
    # instrumentation
    "qstats", "glog", "glog_n",
])

# query statistics slots
Q_QUERIES, Q_LINE, Q_SAME, Q_GNC, Q_PROBES, Q_WVIOL, Q_NOVD, Q_EMPTYW, Q_EMPTYG, \
    Q_MINLEV, Q_MAXW, Q_GSEARCH, Q_BADLEV = range(13)
N_QSTATS = 13
QSTAT_NAMES = ["queries", "line", "same_piece", "gnc_calls", "mssp_probes",
               "w_growth_violations", "missing_vd", "empty_w", "empty_gamma",
               "min_vd_level", "max_w", "gamma_searches", "bad_levels"]


# ---------------------------------------------------------------- lookups

@njit(cache=True)
def vd_lookup(oc, level, qpid, wx, wy):
    geo = oc.geo
    d = geo.ldepth[level]
    bi0 = min(wx // geo.hr[d], geo.nbr[d] - 1)
    bj0 = min(wy // geo.hc[d], geo.nbc[d] - 1)
    k = qpid - geo.off[d]
    bi = k // geo.nbc[d]
    bj = k % geo.nbc[d]
    di = bi0 - bi
    dj = bj0 - bj
    if di < 0 or di > 1 or dj < 0 or dj > 1:
        return -1
    return oc.vd_map[((level * oc.nv) + wx * (geo.W + 1) + wy) * 4 + di * 2 + dj]


@njit(cache=True)
def _slot_dists(oc, slot, ux, uy, vx, vy):
    """(reverse-tree dist u->mid, forward-tree dist mid->v) for a slot."""
    b = oc.sbox[slot]
    d1 = tree_dist(oc.pool, oc.soff[slot, 0], b[0], b[1], b[2], b[3], ux, uy)
    d2 = tree_dist(oc.pool, oc.soff[slot, 1], b[4], b[5], b[6], b[7], vx, vy)
    return d1, d2


# ---------------------------------------------------------------- probes

@njit(cache=True)
def _probe(oc, vd, j, vx, vy, colmode):
    """-1 if v is before site j's path, 0 on it, +1 after it."""
    r = oc.vd_rec[vd] + j
    geo = oc.geo
    W1 = geo.W + 1
    kind = oc.r_kind[r]
    qx1, qy1, qx2, qy2 = piece_rect(geo, oc.vd_q[vd])
    sx, sy = bot_vertex(geo, qx1, qy1, qx2, qy2, j)
    lx = oc.r_last[r] // W1
    ly = oc.r_last[r] % W1
    oc.qstats[Q_PROBES] += 1
    if kind == KIND_LINE:
        if colmode:
            if vx == sx:
                return 0
            return -1 if vx > sx else 1
        if vy == sy:
            return 0
        return -1 if vy < sy else 1
    if kind == KIND_SMALL:
        p = dp_path(oc.sc, oc.tc, oc.wts, sx, sy, lx, ly)
        lo = INF
        hi = -1
        for t in range(p.shape[0]):
            if colmode:
                if p[t, 1] == vy:
                    lo = min(lo, p[t, 0])
                    hi = max(hi, p[t, 0])
            elif p[t, 0] == vx:
                lo = min(lo, p[t, 1])
                hi = max(hi, p[t, 1])
        c = vx if colmode else vy
        if lo <= c <= hi:
            return 0
        if colmode:
            return -1 if c > hi else 1
        return -1 if c < lo else 1
    mx = oc.r_mid[r] // W1
    my = oc.r_mid[r] % W1
    slot = oc.r_slot[r]
    b = oc.sbox[slot]
    if colmode:
        prefix = vy < my or (vy == my and vx <= mx)
    else:
        prefix = vx < mx or (vx == mx and vy <= my)
    if prefix:
        return tree_side(oc.pool, oc.soff[slot, 0], b[0], b[1], b[2], b[3], False, colmode,
                         sx, sy, vx, vy)
    return tree_side(oc.pool, oc.soff[slot, 1], b[4], b[5], b[6], b[7], True, colmode,
                     lx, ly, vx, vy)


@njit(cache=True)
def _glog(oc, vd, vid, out, n):
    if oc.glog.shape[0] > 0 and oc.glog_n[0] < oc.glog.shape[0]:
        t = oc.glog_n[0]
        oc.glog[t, 0] = vd
        oc.glog[t, 1] = vid
        oc.glog[t, 2] = out[0] if n > 0 else -1
        oc.glog[t, 3] = out[1] if n > 1 else -1
        oc.glog_n[0] = t + 1


@njit(cache=True)
def gnc_k(oc, wx, wy, level, ux, uy, vx, vy, out):
    """GetNextCandidates: writes up to two vertex ids of bot(R_level(u)) to out."""
    geo = oc.geo
    W1 = geo.W + 1
    oc.qstats[Q_GNC] += 1
    qpid = level_piece(geo, level, ux, uy)
    qx1, qy1, qx2, qy2 = piece_rect(geo, qpid)
    if qx1 <= vx <= qx2 and qy1 <= vy <= qy2:
        # v on the boundary of Q: it is its own candidate
        out[0] = vx * W1 + vy
        return 1
    vd = vd_lookup(oc, level, qpid, wx, wy)
    if vd < 0:
        oc.qstats[Q_NOVD] += 1
        return 0
    if level < oc.qstats[Q_MINLEV]:
        oc.qstats[Q_MINLEV] = level
    colmode = not (vx > qx2)
    g = oc.vd_gam[vd]
    base = g[2] if colmode else g[0]
    nc = g[3] if colmode else g[1]
    coord = vy if colmode else vx
    # version index = number of critical coordinates below coord
    lo = 0
    hi = nc
    while lo < hi:
        md = (lo + hi) // 2
        if oc.crit[base + md] < coord:
            lo = md + 1
        else:
            hi = md
    rbase = g[5] if colmode else g[4]
    cur = oc.roots[rbase + lo]
    oc.qstats[Q_GSEARCH] += 1
    if cur < 0:
        oc.qstats[Q_EMPTYG] += 1
        _glog(oc, vd, vx * W1 + vy, out, 0)
        return 0
    pred = -1
    succ = -1
    found = -1
    while cur >= 0:
        j = oc.gp.site[cur]
        r = _probe(oc, vd, j, vx, vy, colmode)
        if r == 0:
            found = j
            break
        if r > 0:
            pred = j
            cur = oc.gp.right[cur]
        else:
            succ = j
            cur = oc.gp.left[cur]
    n = 0
    for j in (found, pred, succ):
        if j >= 0 and (found < 0 or j == found) and n < 2:
            sx, sy = bot_vertex(geo, qx1, qy1, qx2, qy2, j)
            out[n] = sx * W1 + sy
            n += 1
    _glog(oc, vd, vx * W1 + vy, out, n)
    return n


# ---------------------------------------------------------------- queries

@njit(cache=True)
def dist_query_k(oc, ux, uy, vx, vy):
    """Returns (distance or -1, kind, mid vertex id, slot)."""
    geo = oc.geo
    W1 = geo.W + 1
    oc.qstats[Q_QUERIES] += 1
    if vx < ux or vy < uy:
        return -1, KIND_LINE, -1, -1
    if ux == vx or uy == vy:
        oc.qstats[Q_LINE] += 1
        return (vy - uy) * oc.wts[0] + (vx - ux) * oc.wts[1], KIND_LINE, -1, -1
    if geo.t == 1 or share_piece(geo, geo.ldepth[1], ux, uy, vx, vy):
        oc.qstats[Q_SAME] += 1
        return dp_dist(oc.sc, oc.tc, oc.wts, ux, uy, vx, vy), KIND_SMALL, -1, -1
    ell = lev_k(geo, ux, uy)
    h = anc_k(geo, ux, uy, vx, vy)
    if h <= ell:
        oc.qstats[Q_BADLEV] += 1
        return dp_dist(oc.sc, oc.tc, oc.wts, ux, uy, vx, vy), KIND_SMALL, -1, -1
    cap = 2
    for _ in range(h - ell):
        cap *= 2
    W = np.empty(cap, dtype=np.int64)
    W2 = np.empty(cap, dtype=np.int64)
    W[0] = ux * W1 + uy
    nw = 1
    buf = np.empty(2, dtype=np.int64)
    for i in range(ell + 1, h):
        n2 = 0
        for a in range(nw):
            wv = W[a]
            c = gnc_k(oc, wv // W1, wv % W1, i, ux, uy, vx, vy, buf)
            for b in range(c):
                dup = False
                for e in range(n2):
                    if W2[e] == buf[b]:
                        dup = True
                if not dup:
                    W2[n2] = buf[b]
                    n2 += 1
        if n2 > 2 * nw:
            oc.qstats[Q_WVIOL] += 1
        if n2 == 0:
            oc.qstats[Q_EMPTYW] += 1
            return dp_dist(oc.sc, oc.tc, oc.wts, ux, uy, vx, vy), KIND_SMALL, -1, -1
        W, W2 = W2, W
        nw = n2
    if nw > oc.qstats[Q_MAXW]:
        oc.qstats[Q_MAXW] = nw
    ppid = level_piece(geo, h - 1, ux, uy)
    px1, py1, px2, py2 = piece_rect(geo, ppid)
    base = oc.piece_slot[ppid]
    best = -1
    bj = -1
    bw = -1
    for a in range(nw):
        wx = W[a] // W1
        wy = W[a] % W1
        j = bot_index(geo, px1, py1, px2, py2, wx, wy)
        if j < 0:
            continue
        d1, d2 = _slot_dists(oc, base + j, ux, uy, vx, vy)
        oc.qstats[Q_PROBES] += 2
        if d1 < 0 or d2 < 0:
            continue
        if best < 0 or d1 + d2 < best or (d1 + d2 == best and j < bj):
            best = d1 + d2
            bj = j
            bw = W[a]
    if best < 0:
        oc.qstats[Q_EMPTYW] += 1
        return dp_dist(oc.sc, oc.tc, oc.wts, ux, uy, vx, vy), KIND_SMALL, -1, -1
    return best, KIND_MID, bw, base + bj


# distance providers used while building diagrams
OracleCtx = namedtuple("OracleCtx", "oc")
DPCtx = namedtuple("DPCtx", "oc")


@njit(cache=True)
def oracle_dist(ctx, j, svid, z):
    oc = ctx.oc
    W1 = oc.geo.W + 1
    d, kind, mid, slot = dist_query_k(oc, svid // W1, svid % W1, z // W1, z % W1)
    return d


@njit(cache=True)
def dp_dist_provider(ctx, j, svid, z):
    oc = ctx.oc
    W1 = oc.geo.W + 1
    return dp_dist(oc.sc, oc.tc, oc.wts, svid // W1, svid % W1, z // W1, z % W1)


register_provider(OracleCtx, oracle_dist)
register_provider(DPCtx, dp_dist_provider)


@njit(cache=True)
def batch_query_k(oc, qs, out):
    for r in range(qs.shape[0]):
        d, kind, mid, slot = dist_query_k(oc, qs[r, 0], qs[r, 1], qs[r, 2], qs[r, 3])
        out[r] = d


@njit(cache=True)
def batch_dp_k(sc, tc, wts, qs, out):
    for r in range(qs.shape[0]):
        out[r] = dp_dist(sc, tc, wts, qs[r, 0], qs[r, 1], qs[r, 2], qs[r, 3])


# ---------------------------------------------------------------- construction

@njit(cache=True)
def build_trees_k(sc, tc, wts, pool, sbox, soff, cap):
    stack = np.empty(cap, dtype=np.int64)
    order = np.empty(cap, dtype=np.int64)
    for s in range(sbox.shape[0]):
        b = sbox[s]
        build_tree(sc, tc, wts, pool, soff[s, 0], b[0], b[1], b[2], b[3], False, stack, order)
        build_tree(sc, tc, wts, pool, soff[s, 1], b[4], b[5], b[6], b[7], True, stack, order)


@njit(cache=True)
def build_level_k(oc, level, vds, vsrc, vslot, start, stamp, dctx, mstamp, mval, zstats):
    """Build the diagrams vds[start:] of one level; returns the next unbuilt index.

    Stops early when the persistent-tree pool might overflow.
    """
    geo = oc.geo
    W1 = geo.W + 1
    gcap = oc.gp.site.shape[0]
    for t in range(start, vds.shape[0]):
        vd = vds[t]
        qpid = oc.vd_q[vd]
        k = oc.vd_k[vd]
        h = max(1, k)
        bits = 0
        while h > 0:
            bits += 1
            h >>= 1
        if oc.gp.top[0] + 2 * (k + k * (2 * bits + 2)) + 2 > gcap:
            return t
        if t == start or oc.vd_q[vds[t - 1]] != qpid:
            stamp[0] += 1
        qx1, qy1, qx2, qy2 = piece_rect(geo, qpid)
        ux = vsrc[t] // W1
        uy = vsrc[t] % W1
        rec = oc.vd_rec[vd]
        sx = np.empty(k, dtype=np.int64)
        sy = np.empty(k, dtype=np.int64)
        om = np.empty(k, dtype=np.int64)
        for j in range(k):
            a, b = bot_vertex(geo, qx1, qy1, qx2, qy2, j)
            sx[j] = a
            sy[j] = b
        # additive weights
        if vslot[t] < 0:
            d = dp_box(oc.sc, oc.tc, oc.wts, ux, uy, qx2, qy2)
            for j in range(k):
                if sx[j] >= ux and sy[j] >= uy:
                    om[j] = d[sx[j] - ux, sy[j] - uy]
                else:
                    om[j] = INF
        else:
            sl = vslot[t]
            b = oc.sbox[sl]
            for j in range(k):
                dd = tree_dist(oc.pool, oc.soff[sl, 1], b[4], b[5], b[6], b[7], sx[j], sy[j])
                om[j] = INF if dd < 0 else dd
        nfin = 0
        for j in range(k):
            if om[j] < INF:
                nfin += 1
        U = np.empty(nfin, dtype=np.int64)
        nfin = 0
        for j in range(k):
            r = rec + j
            oc.r_om[r] = om[j]
            oc.r_last[r] = -1
            oc.r_kind[r] = -1
            oc.r_mid[r] = -1
            oc.r_slot[r] = -1
            oc.r_dlast[r] = -1
            if om[j] < INF:
                U[nfin] = j
                nfin += 1
        vs = VS(geo, qx1, qy1, qx2, qy2, sx, sy, sx * W1 + sy, om, oc.nv, mstamp, mval, stamp, zstats)
        last = np.full(max(k, 1), -1, dtype=np.int64)
        flags = np.zeros(max(k, 1), dtype=np.int64)
        cover = cover_k(geo, qpid)
        zoom_k(vs, dctx, U, cover, last, flags)
        rows = np.full(k, -1, dtype=np.int64)
        cols = np.full(k, -1, dtype=np.int64)
        for j in range(k):
            if last[j] < 0:
                continue
            r = rec + j
            lx = last[j] // W1
            ly = last[j] % W1
            d, kind, mid, slot = dist_query_k(oc, sx[j], sy[j], lx, ly)
            oc.r_last[r] = last[j]
            oc.r_kind[r] = kind
            oc.r_mid[r] = mid
            oc.r_slot[r] = slot
            oc.r_dlast[r] = om[j] + d
            rows[j] = lx
            cols[j] = ly
        g = oc.vd_gam[vd]
        nc = gamma_axis_k(oc.gp, rows, qx2, oc.crit[g[0]:], oc.roots[g[4]:])
        g[1] = nc
        nc = gamma_axis_k(oc.gp, cols, qy2, oc.crit[g[2]:], oc.roots[g[5]:])
        g[3] = nc
    return vds.shape[0]


# ---------------------------------------------------------------- Python API

@dataclass
class OracleConfig:
    ratio: int = 16
    leaf_target: int = 16
    construction_dist: str = "oracle"   # or "dp" (debug)


@dataclass
class QueryStats:
    counts: dict = field(default_factory=dict)


class OracleIndex:
    """The fully built oracle (read-only after preprocess)."""

    def __init__(self, g: AlignmentGraph, A: DecompositionTree, T: DivisionTree, oc, info):
        self.g = g
        self.A = A
        self.T = T
        self.oc = oc
        self.info = info

    # -- raw vertex queries
    def dist_query(self, u, v):
        """(distance or UNREACHABLE, mid vertex / SAME_PIECE / None)."""
        self.g.check_vertex(u)
        self.g.check_vertex(v)
        d, kind, mid, slot = dist_query_k(self.oc, u[0], u[1], v[0], v[1])
        if d < 0:
            return None, None
        if kind == KIND_MID:
            return int(d), self.g.vxy(mid)
        if kind == KIND_SMALL:
            return int(d), SAME_PIECE
        return int(d), None

    def get_last(self, u, v):
        d, mid = self.dist_query(u, v)
        return mid if isinstance(mid, Vertex) else None

    def get_next_candidates(self, w, i, u, v):
        buf = np.empty(2, dtype=np.int64)
        n = gnc_k(self.oc, w[0], w[1], i, u[0], u[1], v[0], v[1], buf)
        return [self.g.vxy(buf[c]) for c in range(n)]

    def batch_dist(self, queries):
        qs = np.ascontiguousarray(np.asarray(queries, dtype=np.int64).reshape(-1, 4))
        out = np.empty(len(qs), dtype=np.int64)
        batch_query_k(self.oc, qs, out)
        return out

    # -- statistics
    def reset_query_stats(self):
        self.oc.qstats[:] = 0
        self.oc.qstats[Q_MINLEV] = 1 << 30

    def query_stats(self):
        return QueryStats({n: int(c) for n, c in zip(QSTAT_NAMES, self.oc.qstats)})

    def stats(self):
        return dict(self.info)

    # -- diagrams (inspection)
    def num_vds(self):
        return len(self.oc.vd_q)

    def vd_record(self, vd):
        """(u, Q piece, level, sites, [(omega, last, mid, d_last) or None per site])."""
        oc = self.oc
        qpid = int(oc.vd_q[vd])
        Q = self.A.piece(qpid)
        sites = self.A.bot(Q)
        rec = int(oc.vd_rec[vd])
        out = []
        for j in range(len(sites)):
            r = rec + j
            om = int(oc.r_om[r])
            om = None if om >= INF else om
            if oc.r_last[r] < 0:
                out.append((om, None, None, None))
            else:
                mid = self.g.vxy(oc.r_mid[r]) if oc.r_kind[r] == KIND_MID else None
                out.append((om, self.g.vxy(oc.r_last[r]), mid, int(oc.r_dlast[r])))
        return self.info["vd_src"][vd], Q, int(self.info["vd_level"][vd]), sites, out

    # -- alignments
    def _check_indices(self, i, j, a, b):
        if not (0 <= i <= j <= self.g.m and 0 <= a <= b <= self.g.n):
            raise ValueError(f"query ({i},{j},{a},{b}) out of range for m={self.g.m}, n={self.g.n}")

    def alignment_score(self, i, j, a, b):
        self._check_indices(i, j, a, b)
        d, _ = self.dist_query((i, a), (j, b))
        return score_from_distance(self.g.cost, i, j, a, b, d)

    def alignment_vertices(self, u, v):
        """A shortest u->v path as a list of vertices, via the stored trees."""
        oc = self.oc
        d, kind, mid, slot = dist_query_k(oc, u[0], u[1], v[0], v[1])
        if d < 0:
            raise ValueError("unreachable")
        if kind != KIND_MID:
            p = dp_path(oc.sc, oc.tc, oc.wts, u[0], u[1], v[0], v[1])
        else:
            b = oc.sbox[slot]
            p1 = tree_path(oc.pool, oc.soff[slot, 0], b[0], b[1], b[2], b[3], False, u[0], u[1])
            p2 = tree_path(oc.pool, oc.soff[slot, 1], b[4], b[5], b[6], b[7], True, v[0], v[1])
            p = np.concatenate([p1, p2[1:]])
        return [Vertex(int(x), int(y)) for x, y in p]

    def alignment_path(self, i, j, a, b):
        """(edit script, matched string) for S[i..j) vs T[a..b)."""
        self._check_indices(i, j, a, b)
        path = self.alignment_vertices((i, a), (j, b))
        return path_to_script(self.g, path)


def path_to_script(g, path):
    """Edit steps ('M','X','D','I') and the matched characters along a path."""
    script = []
    lcs = bytearray()
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        if x1 == x0 + 1 and y1 == y0 + 1:
            if g.S[x0] == g.T[y0]:
                script.append("M")
                lcs.append(g.S[x0])
            else:
                script.append("X")
        elif x1 == x0 + 1:
            script.append("D")
        else:
            script.append("I")
    return script, bytes(lcs)


def script_weight(g, script, i, a):
    """Path weight of an edit script applied from vertex (i, a)."""
    wh, wv, wm, wx = (int(w) for w in g.wts)
    total = 0
    for op in script:
        if op == "M":
            total += wm
        elif op == "X":
            if wx < 0:
                raise ValueError("substitution not allowed in this model")
            total += wx
        elif op == "D":
            total += wv
        else:
            total += wh
    return total


def cigar(script):
    out = []
    for op in script:
        if out and out[-1][1] == op:
            out[-1][0] += 1
        else:
            out.append([1, op])
    return "".join(f"{n}{op}" for n, op in out)


def _slot_tables(A, T):
    """Per (level, piece, source) tree boxes and pool offsets."""
    geo = T.geo
    piece_slot = np.full(A.num_pieces, -1, dtype=np.int64)
    boxes = []
    for i in range(1, T.t):
        d = int(T.ldepth[i])
        dq = int(T.ldepth[i + 1])
        for P in A.pieces_at_depth(d):
            qbi = P.x1 // int(A.hr[dq])
            qbj = P.y1 // int(A.hc[dq])
            qx2 = (qbi + 1) * int(A.hr[dq])
            qy2 = (qbj + 1) * int(A.hc[dq])
            piece_slot[P.id] = len(boxes)
            for j in range(bot_len(geo, *P.rect)):
                wx, wy = bot_vertex(geo, *P.rect, j)
                boxes.append((P.x1, P.y1, wx, wy, wx, wy, qx2, qy2))
    sbox = np.array(boxes, dtype=np.int64).reshape(-1, 8)
    sizes_r = (sbox[:, 2] - sbox[:, 0] + 1) * (sbox[:, 3] - sbox[:, 1] + 1)
    sizes_f = (sbox[:, 6] - sbox[:, 4] + 1) * (sbox[:, 7] - sbox[:, 5] + 1)
    sizes = np.stack([sizes_r, sizes_f], axis=1).ravel()
    if len(sizes):
        offs = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64).reshape(-1, 2)
    else:
        offs = np.zeros((0, 2), dtype=np.int64)
    total = int(sizes.sum()) if len(sizes) else 0
    return piece_slot, sbox, offs, total


def _level_vds(A, T, g, level, piece_slot):
    """Diagrams whose piece Q is at ``level``: arrays (q pid, source vid, omega slot)."""
    geo = T.geo
    W1 = g.cols
    if level == 1:
        xs, ys = np.meshgrid(np.arange(g.rows), np.arange(g.cols), indexing="ij")
        xs = xs.ravel()
        ys = ys.ravel()
        d = int(T.ldepth[1])
        hr, hc = int(A.hr[d]), int(A.hc[d])
        bi = np.minimum(np.maximum(xs - 1, 0) // hr, int(A.nbr[d]) - 1)
        bj = np.minimum(np.maximum(ys - 1, 0) // hc, int(A.nbc[d]) - 1)
        q = int(A.off[d]) + bi * int(A.nbc[d]) + bj
        src = xs * W1 + ys
        return q, src, np.full(len(q), -1, dtype=np.int64)
    d = int(T.ldepth[level - 1])
    dq = int(T.ldepth[level])
    seen = {}
    for P in A.pieces_at_depth(d):
        qbi = P.x1 // int(A.hr[dq])
        qbj = P.y1 // int(A.hc[dq])
        q = int(piece_id(geo, dq, qbi, qbj))
        base = int(piece_slot[P.id])
        for j in range(bot_len(geo, *P.rect)):
            wx, wy = bot_vertex(geo, *P.rect, j)
            key = (q, wx * W1 + wy)
            if key not in seen:
                seen[key] = base + j
    keys = sorted(seen)
    q = np.array([k[0] for k in keys], dtype=np.int64)
    src = np.array([k[1] for k in keys], dtype=np.int64)
    slot = np.array([seen[k] for k in keys], dtype=np.int64)
    return q, src, slot


def preprocess(S, T_, cost=None, config=None, glog_cap=0) -> OracleIndex:
    """Build the oracle for strings S, T under ``cost`` and ``config``."""
    config = config or OracleConfig()
    t0 = time.perf_counter()
    g = S if isinstance(S, AlignmentGraph) else AlignmentGraph(S, T_, cost or CostModel.lcs())
    A = DecompositionTree(g.mp, g.np_)
    T = DivisionTree(A, config.ratio, config.leaf_target)
    geo = T.geo
    nv = g.num_vertices
    t = T.t

    piece_slot, sbox, soff, total = _slot_tables(A, T)
    pool = new_pool(max(total, 1))
    cap = nv
    build_trees_k(g.sc, g.tc, g.wts, pool, sbox, soff, cap)
    t_trees = time.perf_counter() - t0

    # enumerate diagrams, level by level (levels t-1 .. 1 hold the pieces Q)
    lv_q, lv_src, lv_slot, lv_level = [], [], [], []
    for level in range(t - 1, 0, -1):
        q, src, slot = _level_vds(A, T, g, level, piece_slot)
        order = np.lexsort((src, q))
        lv_q.append(q[order])
        lv_src.append(src[order])
        lv_slot.append(slot[order])
        lv_level.append(np.full(len(q), level, dtype=np.int64))
    if lv_q:
        vd_q = np.concatenate(lv_q)
        vd_src = np.concatenate(lv_src)
        vd_slot = np.concatenate(lv_slot)
        vd_level = np.concatenate(lv_level)
    else:
        vd_q = vd_src = vd_slot = vd_level = np.zeros(0, dtype=np.int64)
    nvd = len(vd_q)
    vd_k = np.array([bot_len(geo, *piece_rect(geo, q)) for q in vd_q], dtype=np.int64) \
        if nvd else np.zeros(0, dtype=np.int64)
    vd_rec = np.concatenate([[0], np.cumsum(vd_k)[:-1]]).astype(np.int64) if nvd else vd_k.copy()
    nrec = int(vd_k.sum())
    vd_gam = np.zeros((nvd, 6), dtype=np.int64)
    if nvd:
        cb = np.concatenate([[0], np.cumsum(vd_k + 1)[:-1]])
        rb = np.concatenate([[0], np.cumsum(vd_k + 2)[:-1]])
        ncrit = int((vd_k + 1).sum())
        nroot = int((vd_k + 2).sum())
        vd_gam[:, 0] = cb
        vd_gam[:, 2] = cb + ncrit
        vd_gam[:, 4] = rb
        vd_gam[:, 5] = rb + nroot
    else:
        ncrit = nroot = 0
    crit = np.zeros(max(2 * ncrit, 1), dtype=np.int64)
    roots = np.full(max(2 * nroot, 1), -1, dtype=np.int64)

    vd_map = np.full((t + 1) * nv * 4, -1, dtype=np.int64)
    if nvd:
        d_of = T.ldepth[vd_level]
        hr = A.hr[d_of]
        hc = A.hc[d_of]
        wx = vd_src // g.cols
        wy = vd_src % g.cols
        kq = vd_q - A.off[d_of]
        bi = kq // A.nbc[d_of]
        bj = kq % A.nbc[d_of]
        di = np.minimum(wx // hr, A.nbr[d_of] - 1) - bi
        dj = np.minimum(wy // hc, A.nbc[d_of] - 1) - bj
        assert ((di >= 0) & (di <= 1) & (dj >= 0) & (dj <= 1)).all()
        vd_map[((vd_level * nv) + vd_src) * 4 + di * 2 + dj] = np.arange(nvd)

    gp = new_gpool(max(1024, 8 * nrec))
    qstats = np.zeros(N_QSTATS, dtype=np.int64)
    glog = np.zeros((glog_cap, 4), dtype=np.int64)
    oc = OC(g.sc, g.tc, g.wts, geo, nv, pool, piece_slot, sbox, soff,
            vd_map, vd_q, vd_rec, vd_k, vd_gam,
            np.full(max(nrec, 1), -1, np.int64), np.full(max(nrec, 1), -1, np.int8),
            np.full(max(nrec, 1), -1, np.int64), np.full(max(nrec, 1), -1, np.int64),
            np.full(max(nrec, 1), -1, np.int64), np.full(max(nrec, 1), -1, np.int64),
            gp, crit, roots, qstats, glog, np.zeros(1, dtype=np.int64))

    if config.construction_dist not in ("oracle", "dp"):
        raise ValueError("construction_dist must be 'oracle' or 'dp'")
    kmax = int(vd_k.max()) if nvd else 1
    mstamp = np.zeros(kmax * nv, dtype=np.int64)
    mval = np.zeros(kmax * nv, dtype=np.int64)
    stamp = np.zeros(1, dtype=np.int64)
    zstats = np.zeros(N_STATS, dtype=np.int64)
    level_info = []
    pos = 0
    obs8_ok = True
    for block, level in zip(lv_q, range(t - 1, 0, -1)):
        lt = time.perf_counter()
        z0 = zstats.copy()
        idx = np.arange(pos, pos + len(block), dtype=np.int64)
        qstats[:] = 0
        qstats[Q_MINLEV] = 1 << 30
        start = 0
        while start < len(idx):
            dctx = OracleCtx(oc) if config.construction_dist == "oracle" else DPCtx(oc)
            start = build_level_k(oc, level, idx, vd_src[idx], vd_slot[idx], start, stamp,
                                  dctx, mstamp, mval, zstats)
            if start < len(idx):
                oc = _grow_gpool(oc)
        if qstats[Q_MINLEV] <= level:
            obs8_ok = False
        level_info.append({"level": level, "diagrams": int(len(idx)),
                           "seconds": round(time.perf_counter() - lt, 3),
                           "min_vd_level_used": int(qstats[Q_MINLEV]) if qstats[Q_MINLEV] < (1 << 30) else None,
                           "construction_queries": int(qstats[Q_QUERIES]),
                           "construction_probes": int(qstats[Q_PROBES]),
                           "zoom_distance_requests": int(zstats[0] - z0[0]),
                           "zoom_calls": int(zstats[3] - z0[3])})
        pos += len(block)
    qstats[:] = 0
    qstats[Q_MINLEV] = 1 << 30

    info = {
        "m": g.m, "n": g.n, "padded": [g.mp, g.np_], "N": nv, "t": t,
        "ratio": config.ratio, "leaf_target": config.leaf_target,
        "level_shapes": [T.level_shape(i) for i in range(t + 1)],
        "level_pieces": [None] + [len(T.pieces_at_level(i)) for i in range(1, t + 1)],
        "tree_sources": int(len(sbox)), "tree_entries": int(total),
        "diagrams": int(nvd), "records": nrec,
        "nonempty_records": int((oc.r_last >= 0).sum()) if nrec else 0,
        "gamma_nodes": int(oc.gp.top[0]),
        "zoom_distance_requests": int(zstats[0]), "zoom_provider_calls": int(zstats[1]),
        "zoom_candidate_total": int(zstats[2]), "zoom_calls": int(zstats[3]),
        "partition_calls": int(zstats[4]), "duplicate_emissions": int(zstats[5]),
        "observation8_ok": obs8_ok,
        "levels": level_info,
        "tree_seconds": round(t_trees, 3),
        "build_seconds": round(time.perf_counter() - t0, 3),
        "vd_src": [g.vxy(s) for s in vd_src],
        "vd_level": vd_level,
    }
    return OracleIndex(g, A, T, oc, info)


def _grow_gpool(oc):
    old = oc.gp
    cap = 2 * old.site.shape[0]
    gp = GPool(np.resize(old.site, cap), np.resize(old.left, cap), np.resize(old.right, cap), old.top)
    return oc._replace(gp=gp)


def dist_query(o: OracleIndex, u, v):
    return o.dist_query(u, v)


def get_last(o: OracleIndex, u, v):
    return o.get_last(u, v)


def get_next_candidates(o: OracleIndex, w, i, u, v):
    return o.get_next_candidates(w, i, u, v)


def alignment_score(o: OracleIndex, i, j, a, b):
    return o.alignment_score(i, j, a, b)


def alignment_path(o: OracleIndex, i, j, a, b):
    return o.alignment_path(i, j, a, b)
