"""Additively weighted Voronoi diagrams on out(Q) and their point-location index.

A diagram VD(u, Q) has the vertices of bot(Q) as sites; site s carries the
weight w(s) = dist(u, s) and owns the vertices v of out(Q) minimising
w(s) + dist(s, v).  Ties go to the site with the lexicographically largest
(w(s), x, y).  The diagram is stored as, per site, the rightmost bottommost
vertex of its cell ("last") plus a split vertex on a shortest s -> last path.

Construction follows a divide-and-conquer Partition of piece boundaries and
a Zoom recursion over the pieces covering out(Q) that only ever evaluates
distances from sites to boundary vertices.  Distances come from a provider
context: a namedtuple whose class is registered with an njit function
``fn(ctx, j, site_vid, vid)``.  Kernels reach it through ``call_dist``, which
is resolved at compile time so that everything stays cacheable.

Point location keeps, per axis, a path-copying persistent search tree over
the sites whose s -> last path crosses a given row (or column).
"""

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit, types
from numba.extending import overload

from .core import INF, dp_box, struct_class
from .decomposition import (
    Piece, bot_index, bot_len, bot_vertex, cover_k, depth_of, piece_children,
    piece_rect, top_len, top_vertex,
)

ABSENT = None

# VS: state of one diagram under construction
#   stats: 0 distance requests, 1 provider calls, 2 zoom candidate total,
#          3 zoom calls, 4 partition calls, 5 duplicate emissions,
#          6 empty winners inside reachable segments
VS = struct_class(__name__, "VS", "geo qx1 qy1 qx2 qy2 sx sy svid om nv mstamp mval stamp stats")
N_STATS = 7


def new_stats():
    return np.zeros(N_STATS, dtype=np.int64)


# ---------------------------------------------------------------- distances

_PROVIDERS = {}


def register_provider(ctx_class, fn):
    """Route ``call_dist`` on contexts of ``ctx_class`` to the njit ``fn``."""
    _PROVIDERS[ctx_class] = fn


def call_dist(ctx, j, svid, z):
    raise NotImplementedError("only callable from compiled code")


@overload(call_dist)
def _call_dist_ov(ctx, j, svid, z):
    if isinstance(ctx, types.BaseNamedTuple) and ctx.instance_class in _PROVIDERS:
        fn = _PROVIDERS[ctx.instance_class]

        def impl(ctx, j, svid, z):
            return fn(ctx, j, svid, z)
        return impl
    return None


@njit(cache=True)
def provider_dist(ctx, j, svid, z):
    return call_dist(ctx, j, svid, z)


TableCtx = namedtuple("TableCtx", "table")


@njit(cache=True)
def table_dist(ctx, j, svid, z):
    """Provider backed by a dense (site, vertex) distance table."""
    return ctx.table[j, z]


register_provider(TableCtx, table_dist)


@njit(cache=True)
def _dist(vs, dctx, j, z):
    vs.stats[0] += 1
    i = j * vs.nv + z
    if vs.mstamp[i] == vs.stamp[0]:
        return vs.mval[i]
    vs.stats[1] += 1
    d = call_dist(dctx, j, vs.svid[j], z)
    vs.mstamp[i] = vs.stamp[0]
    vs.mval[i] = d
    return d


@njit(cache=True)
def _key_gt(vs, a, b):
    if vs.om[a] != vs.om[b]:
        return vs.om[a] > vs.om[b]
    if vs.sx[a] != vs.sx[b]:
        return vs.sx[a] > vs.sx[b]
    return vs.sy[a] > vs.sy[b]


@njit(cache=True)
def _winner(vs, dctx, U, clo, chi, z):
    """Index c in [clo, chi] of U's best site for vertex z, or -1."""
    best = -1
    bd = INF
    for c in range(clo, chi + 1):
        j = U[c]
        d = _dist(vs, dctx, j, z)
        if d < 0:
            continue
        t = vs.om[j] + d
        if best < 0 or t < bd or (t == bd and _key_gt(vs, j, U[best])):
            best = c
            bd = t
    return best


# ---------------------------------------------------------------- sides

@njit(cache=True)
def _side_xy(geo, is_bot, x1, y1, x2, y2, p):
    if is_bot:
        return bot_vertex(geo, x1, y1, x2, y2, p)
    return top_vertex(geo, x1, y1, x2, y2, p)


@njit(cache=True)
def _reach_bounds(vs, U):
    """Smallest column among U's bottom-row sites and smallest row among right-column sites."""
    min_yb = INF
    min_xr = INF
    for c in range(U.shape[0]):
        j = U[c]
        if vs.sx[j] == vs.qx2 and vs.sy[j] < min_yb:
            min_yb = vs.sy[j]
        if vs.sy[j] == vs.qy2 and vs.sx[j] < min_xr:
            min_xr = vs.sx[j]
    return min_yb, min_xr


@njit(cache=True)
def _ok(vs, min_yb, min_xr, x, y):
    if x < vs.qx1 or y < vs.qy1:
        return False
    if x >= vs.qx2 and y >= min_yb:
        return True
    return y >= vs.qy2 and x >= min_xr


@njit(cache=True)
def _part_range(vs, min_yb, min_xr, is_bot, x1, y1, x2, y2, a, b, prefix):
    """True range inside positions [a, b) of a monotone straight part."""
    if a >= b:
        return a, a
    lo = a
    hi = b
    if prefix:
        # first false position
        while lo < hi:
            md = (lo + hi) // 2
            x, y = _side_xy(vs.geo, is_bot, x1, y1, x2, y2, md)
            if _ok(vs, min_yb, min_xr, x, y):
                lo = md + 1
            else:
                hi = md
        return a, lo
    while lo < hi:
        md = (lo + hi) // 2
        x, y = _side_xy(vs.geo, is_bot, x1, y1, x2, y2, md)
        if _ok(vs, min_yb, min_xr, x, y):
            hi = md
        else:
            lo = md + 1
    return lo, b


@njit(cache=True)
def _segments(vs, U, is_bot, x1, y1, x2, y2):
    """Up to two position ranges of the side that lie in out(Q) and are reachable from U."""
    geo = vs.geo
    min_yb, min_xr = _reach_bounds(vs, U)
    segs = np.empty((2, 2), dtype=np.int64)
    if is_bot:
        na = y2 - y1 + 1 if x2 < geo.H else 0
        n = bot_len(geo, x1, y1, x2, y2)
        a0, a1 = _part_range(vs, min_yb, min_xr, True, x1, y1, x2, y2, 0, na, False)
        b0, b1 = _part_range(vs, min_yb, min_xr, True, x1, y1, x2, y2, na, n, True)
    else:
        na = x2 - x1 + 1 if y1 > 0 else 0
        n = top_len(geo, x1, y1, x2, y2)
        a0, a1 = _part_range(vs, min_yb, min_xr, False, x1, y1, x2, y2, 0, na, True)
        b0, b1 = _part_range(vs, min_yb, min_xr, False, x1, y1, x2, y2, na, n, False)
    k = 0
    if a0 < a1:
        segs[k, 0] = a0
        segs[k, 1] = a1 - 1
        k += 1
    if b0 < b1:
        if k == 1 and segs[0, 1] + 1 == b0:
            segs[0, 1] = b1 - 1
        else:
            segs[k, 0] = b0
            segs[k, 1] = b1 - 1
            k += 1
    return segs[:k]


# ---------------------------------------------------------------- Partition

@njit(cache=True)
def partition_k(vs, dctx, U, is_bot, x1, y1, x2, y2):
    """Maximal (site, lo, hi) intervals of the side's reachable part, in order.

    U holds site indices in increasing (bot) order.  Candidates of every
    active interval are a contiguous range of U.
    """
    vs.stats[4] += 1
    nU = U.shape[0]
    if nU == 0:
        return np.empty((0, 3), dtype=np.int64)
    segs = _segments(vs, U, is_bot, x1, y1, x2, y2)
    total = 0
    for s in range(segs.shape[0]):
        total += segs[s, 1] - segs[s, 0] + 1
    out = np.empty((2 * total + 2, 3), dtype=np.int64)
    n = 0
    st = np.empty((200, 5), dtype=np.int64)
    for s in range(segs.shape[0]):
        sp = 0
        st[0, 0] = 0
        st[0, 1] = segs[s, 0]
        st[0, 2] = segs[s, 1]
        st[0, 3] = 0
        st[0, 4] = nU - 1
        sp = 1
        while sp > 0:
            sp -= 1
            typ = st[sp, 0]
            lo = st[sp, 1]
            hi = st[sp, 2]
            clo = st[sp, 3]
            chi = st[sp, 4]
            if typ == 1:
                site = U[clo]
            else:
                if lo > hi:
                    continue
                if clo == chi:
                    site = U[clo]
                else:
                    md = (lo + hi) // 2
                    x, y = _side_xy(vs.geo, is_bot, x1, y1, x2, y2, md)
                    b = _winner(vs, dctx, U, clo, chi, x * (vs.geo.W + 1) + y)
                    if b < 0:
                        vs.stats[6] += 1
                        b = clo
                    # right part, then the midpoint, then the left part
                    st[sp, 0] = 0
                    st[sp, 1] = md + 1
                    st[sp, 2] = hi
                    st[sp, 3] = b
                    st[sp, 4] = chi
                    st[sp + 1, 0] = 1
                    st[sp + 1, 1] = md
                    st[sp + 1, 2] = md
                    st[sp + 1, 3] = b
                    st[sp + 1, 4] = b
                    st[sp + 2, 0] = 0
                    st[sp + 2, 1] = lo
                    st[sp + 2, 2] = md - 1
                    st[sp + 2, 3] = clo
                    st[sp + 2, 4] = b
                    sp += 3
                    continue
            if n > 0 and out[n - 1, 0] == site and out[n - 1, 2] + 1 == lo:
                out[n - 1, 2] = hi
            else:
                out[n, 0] = site
                out[n, 1] = lo
                out[n, 2] = hi
                n += 1
    return out[:n]


# ---------------------------------------------------------------- Zoom

@njit(cache=True)
def _partition_sites(vs, dctx, U, is_bot, x1, y1, x2, y2):
    """Distinct sites of the partition, in order of appearance."""
    p = partition_k(vs, dctx, U, is_bot, x1, y1, x2, y2)
    out = np.empty(p.shape[0], dtype=np.int64)
    n = 0
    for r in range(p.shape[0]):
        if n == 0 or out[n - 1] != p[r, 0]:
            out[n] = p[r, 0]
            n += 1
    return out[:n]


@njit(cache=True)
def _base_case(vs, dctx, U, x1, y1, x2, y2, last):
    geo = vs.geo
    W1 = geo.W + 1
    nU = U.shape[0]
    for x in range(x1, x2 + 1):
        for y in range(y1, y2 + 1):
            if x < vs.qx1 or y < vs.qy1:
                continue
            if bot_index(geo, x1, y1, x2, y2, x, y) >= 0:
                continue
            c = _winner(vs, dctx, U, 0, nU - 1, x * W1 + y)
            if c < 0:
                continue
            j = U[c]
            is_last = True
            for dx, dy in ((1, 0), (0, 1), (1, 1)):
                nx = x + dx
                ny = y + dy
                if nx > geo.H or ny > geo.W:
                    continue
                c2 = _winner(vs, dctx, U, 0, nU - 1, nx * W1 + ny)
                if c2 >= 0 and U[c2] == j:
                    is_last = False
                    break
            if is_last:
                if last[j] >= 0 and last[j] != x * W1 + y:
                    vs.stats[5] += 1
                last[j] = x * W1 + y


@njit(cache=True)
def zoom_k(vs, dctx, U0, pieces, last, flags):
    """Run Zoom(U0, H) for every H in ``pieces``; writes last[site] = vertex id.

    ``flags`` is scratch of length >= number of sites, zero on entry.
    """
    geo = vs.geo
    maxd = geo.hr.shape[0] - 1
    cap = (2 * maxd + 8) * (U0.shape[0] + 2)
    buf = np.empty(cap, dtype=np.int64)
    st = np.empty((2 * maxd + 8 + pieces.shape[0], 3), dtype=np.int64)
    sp = 0
    top = 0
    for r in range(pieces.shape[0]):
        st[sp, 0] = pieces[r]
        st[sp, 1] = 0
        st[sp, 2] = U0.shape[0]
        sp += 1
    buf[: U0.shape[0]] = U0
    top = U0.shape[0]
    while sp > 0:
        sp -= 1
        pid = st[sp, 0]
        us = st[sp, 1]
        ul = st[sp, 2]
        U = buf[us: us + ul].copy()
        # regions are pushed in increasing order: free everything above the
        # highest pending entry
        top = st[sp - 1, 1] + st[sp - 1, 2] if sp > 0 else 0
        vs.stats[3] += 1
        vs.stats[2] += ul
        if ul == 0:
            continue
        x1, y1, x2, y2 = piece_rect(geo, pid)
        if depth_of(geo, pid) == maxd:
            _base_case(vs, dctx, U, x1, y1, x2, y2, last)
            continue
        Wt = _partition_sites(vs, dctx, U, False, x1, y1, x2, y2)
        Wb = _partition_sites(vs, dctx, U, True, x1, y1, x2, y2)
        # flags: 1 = in W, 2 = in W', 4 = in L (scratch, reset below)
        for c in range(Wt.shape[0]):
            flags[Wt[c]] |= 1
        for c in range(Wb.shape[0]):
            flags[Wb[c]] |= 2
        anyd = False
        for c in range(Wt.shape[0]):
            if flags[Wt[c]] == 1:
                anyd = True
        if anyd:
            ca, cb = piece_children(geo, pid)
            for child in (cb, ca):
                cx1, cy1, cx2, cy2 = piece_rect(geo, child)
                if cx2 < vs.qx1 or cy2 < vs.qy1:
                    continue
                Z = _partition_sites(vs, dctx, U, False, cx1, cy1, cx2, cy2)
                nz = Z.shape[0]
                if top + nz > cap:
                    raise RuntimeError("zoom buffer overflow")
                n = 0
                for c in range(nz):
                    inl = (flags[Z[c]] & 3) == 1
                    keep = inl
                    if not keep and c > 0 and (flags[Z[c - 1]] & 3) == 1:
                        keep = True
                    if not keep and c + 1 < nz and (flags[Z[c + 1]] & 3) == 1:
                        keep = True
                    if keep:
                        buf[top + n] = Z[c]
                        n += 1
                st[sp, 0] = child
                st[sp, 1] = top
                st[sp, 2] = n
                sp += 1
                top += n
        for c in range(Wt.shape[0]):
            flags[Wt[c]] = 0
        for c in range(Wb.shape[0]):
            flags[Wb[c]] = 0
    return 0


# ---------------------------------------------------------------- persistent tree

GPool = struct_class(__name__, "GPool", "site left right top")


def new_gpool(cap):
    return GPool(np.empty(cap, dtype=np.int32), np.empty(cap, dtype=np.int32),
                 np.empty(cap, dtype=np.int32), np.zeros(1, dtype=np.int64))


@njit(cache=True)
def _gnew(gp, site, left, right):
    t = gp.top[0]
    gp.site[t] = site
    gp.left[t] = left
    gp.right[t] = right
    gp.top[0] = t + 1
    return t


@njit(cache=True)
def _gbuild(gp, members, n):
    """Perfectly balanced tree over members[:n]; returns the root or -1."""
    if n == 0:
        return -1
    base = gp.top[0]
    for i in range(n):
        gp.site[base + i] = members[i]
        gp.left[base + i] = -1
        gp.right[base + i] = -1
    gp.top[0] = base + n
    st = np.empty((64, 2), dtype=np.int64)
    st[0, 0] = 0
    st[0, 1] = n - 1
    sp = 1
    while sp > 0:
        sp -= 1
        lo = st[sp, 0]
        hi = st[sp, 1]
        md = (lo + hi) // 2
        if lo <= md - 1:
            gp.left[base + md] = base + (lo + md - 1) // 2
            st[sp, 0] = lo
            st[sp, 1] = md - 1
            sp += 1
        if md + 1 <= hi:
            gp.right[base + md] = base + (md + 1 + hi) // 2
            st[sp, 0] = md + 1
            st[sp, 1] = hi
            sp += 1
    return base + (n - 1) // 2


@njit(cache=True)
def _gdelete(gp, root, key):
    """Path-copying delete of ``key``; returns the new root."""
    path = np.empty(64, dtype=np.int64)
    np_ = 0
    cur = root
    while cur != -1 and gp.site[cur] != key:
        path[np_] = cur
        np_ += 1
        cur = gp.left[cur] if key < gp.site[cur] else gp.right[cur]
    if cur == -1:
        return root
    if gp.left[cur] == -1:
        repl = gp.right[cur]
    elif gp.right[cur] == -1:
        repl = gp.left[cur]
    else:
        sp_ = np.empty(64, dtype=np.int64)
        ns = 0
        m = gp.right[cur]
        while gp.left[m] != -1:
            sp_[ns] = m
            ns += 1
            m = gp.left[m]
        sub = gp.right[m]
        for q in range(ns - 1, -1, -1):
            node = sp_[q]
            sub = _gnew(gp, gp.site[node], sub, gp.right[node])
        repl = _gnew(gp, gp.site[m], gp.left[cur], sub)
    for q in range(np_ - 1, -1, -1):
        node = path[q]
        if key < gp.site[node]:
            repl = _gnew(gp, gp.site[node], repl, gp.right[node])
        else:
            repl = _gnew(gp, gp.site[node], gp.left[node], repl)
    return repl


@njit(cache=True)
def gamma_axis_k(gp, coord, corner, crit_out, roots_out):
    """Versions of {s : coord[s] >= c} for c > corner, in site order.

    coord[s] is the row (or column) of last(s), -1 for empty records.
    Returns the number of critical coordinates; roots_out[i] is the root
    valid for coordinates in (crit[i-1], crit[i]].
    """
    k = coord.shape[0]
    members = np.empty(k, dtype=np.int64)
    n = 0
    for s in range(k):
        if coord[s] > corner:
            members[n] = s
            n += 1
    root = _gbuild(gp, members, n)
    keys = np.empty(n, dtype=np.int64)
    for i in range(n):
        keys[i] = coord[members[i]]
    order = np.argsort(keys, kind="mergesort")
    nc = 0
    roots_out[0] = root
    i = 0
    while i < n:
        c = keys[order[i]]
        while i < n and keys[order[i]] == c:
            root = _gdelete(gp, root, members[order[i]])
            i += 1
        crit_out[nc] = c
        nc += 1
        roots_out[nc] = root
    return nc


def gamma_bound(n):
    """Node bound of one axis for n members."""
    h = max(1, int(n).bit_length())
    return n + n * (2 * h + 2)


# ---------------------------------------------------------------- Python API

@dataclass
class SiteRecord:
    last: tuple
    mid: Optional[tuple]
    d_last: int


@dataclass
class VoronoiRepr:
    """VD(u, Q): site list bot(Q), weights, and optional per-site records."""

    u: tuple
    Q: Piece
    sites: list
    omega: list
    records: list = field(default_factory=list)

    def nonempty(self):
        return [(j, r) for j, r in enumerate(self.records) if r is not None]


class DistanceProvider:
    """Distances from the sites of one diagram to grid vertices."""

    def __init__(self, ctx, nv):
        if type(ctx) not in _PROVIDERS:
            raise TypeError(f"no provider registered for {type(ctx).__name__}")
        self.ctx = ctx
        self.nv = nv


def dp_provider(g, sites):
    """Provider backed by full DP tables from every site (test and debug use)."""
    tab = np.stack([_dp_row(g, s) for s in sites]) if sites else np.zeros((0, g.num_vertices), np.int64)
    return DistanceProvider(TableCtx(tab), g.num_vertices)


def _dp_row(g, s):
    out = np.full((g.rows, g.cols), -1, dtype=np.int64)
    out[s[0]:, s[1]:] = dp_box(g.sc, g.tc, g.wts, s[0], s[1], g.mp, g.np_)
    return out.ravel()


class VoronoiProblem:
    """A diagram under construction: grid, piece Q, weights and a distance provider."""

    def __init__(self, g, A, Q: Piece, omega, provider: DistanceProvider):
        self.g = g
        self.A = A
        self.Q = Q
        self.sites = A.bot(Q)
        k = len(self.sites)
        if len(omega) != k:
            raise ValueError("one weight per site of bot(Q) expected")
        self.omega = list(omega)
        om = np.array([INF if w is None else int(w) for w in omega], dtype=np.int64)
        sx = np.array([s[0] for s in self.sites], dtype=np.int64)
        sy = np.array([s[1] for s in self.sites], dtype=np.int64)
        nv = g.num_vertices
        self.stats = new_stats()
        self.vs = VS(A.geo(), Q.x1, Q.y1, Q.x2, Q.y2, sx, sy, sx * g.cols + sy, om, nv,
                     np.zeros(max(1, k) * nv, dtype=np.int64), np.zeros(max(1, k) * nv, dtype=np.int64),
                     np.ones(1, dtype=np.int64), self.stats)
        self.provider = provider

    def finite_sites(self):
        return np.array([j for j, w in enumerate(self.omega) if w is not None], dtype=np.int64)

    def _U(self, U):
        if U is None:
            return self.finite_sites()
        return np.array([j for j in U if self.omega[j] is not None], dtype=np.int64)


def brute_voronoi(g, A, Q: Piece, omega):
    """Site index per grid vertex (-1 if unassigned) by full DP from every site."""
    sites = A.bot(Q)
    k = len(sites)
    assign = np.full((g.rows, g.cols), -1, dtype=np.int64)
    live = [j for j in range(k) if omega[j] is not None]
    if not live:
        return assign
    # rank sites by tie key so that argmin over (d, -rank) applies the rule
    keyed = sorted(live, key=lambda j: (omega[j], sites[j][0], sites[j][1]))
    rank = {j: r for r, j in enumerate(keyed)}
    R = len(keyed)
    best = np.full((g.rows, g.cols), np.iinfo(np.int64).max, dtype=np.int64)
    for j in live:
        d = _dp_row(g, sites[j]).reshape(g.rows, g.cols)
        comb = np.where(d >= 0, (d + omega[j]) * (R + 1) + (R - rank[j]), np.iinfo(np.int64).max)
        take = comb < best
        best[take] = comb[take]
        assign[take] = j
    xs, ys = np.meshgrid(np.arange(g.rows), np.arange(g.cols), indexing="ij")
    outside = (xs < Q.x1) | (ys < Q.y1)
    # interior of Q under the adjacency boundary (grid borders are not boundary)
    lo_x = Q.x1 + 1 if Q.x1 > 0 else Q.x1
    lo_y = Q.y1 + 1 if Q.y1 > 0 else Q.y1
    hi_x = Q.x2 - 1 if Q.x2 < A.H else Q.x2
    hi_y = Q.y2 - 1 if Q.y2 < A.W else Q.y2
    inside = (xs >= lo_x) & (xs <= hi_x) & (ys >= lo_y) & (ys <= hi_y)
    assign[outside | inside] = -1
    return assign


def brute_last(assign):
    """{site: last vertex} from a brute assignment (rightmost bottommost vertex)."""
    out = {}
    rows, cols = assign.shape
    for x in range(rows):
        for y in range(cols):
            j = int(assign[x, y])
            if j >= 0:
                cur = out.get(j)
                if cur is None or (x, y) > cur:
                    out[j] = (x, y)
    return out


def partition(prob: VoronoiProblem, H: Piece, which: str, U=None):
    """Partition of top(H) or bot(H) (within out(Q)) among the sites of U.

    Returns a list of (site, [vertices]) with maximal contiguous intervals.
    """
    Uarr = prob._U(U)
    is_bot = which == "bot"
    res = partition_k(prob.vs, prob.provider.ctx, Uarr, is_bot, *H.rect)
    side = prob.A.bot(H) if is_bot else prob.A.top(H)
    return [(int(s), side[lo: hi + 1]) for s, lo, hi in res]


def redundant_sites(top_part, bot_part):
    """Middle sites of triples that are consecutive in both partitions.

    If ``top_part`` is a safe sequence for H, any one of these sites can
    be dropped and the rest stays safe.
    """
    def triples(seq):
        return {tuple(seq[i:i + 3]) for i in range(len(seq) - 2)}
    common = triples(list(top_part)) & triples(list(bot_part))
    return sorted({t[1] for t in common}, key=list(top_part).index)


def zoom(prob: VoronoiProblem, U, H: Piece, sink=None):
    """Run Zoom(U, H); returns {site: last vertex} for lasts in H minus bot(H)."""
    Uarr = prob._U(U)
    k = len(prob.sites)
    last = np.full(max(k, 1), -1, dtype=np.int64)
    zoom_k(prob.vs, prob.provider.ctx, Uarr, np.array([H.id], dtype=np.int64),
           last, np.zeros(max(k, 1), dtype=np.int64))
    found = {j: prob.g.vxy(last[j]) for j in range(k) if last[j] >= 0}
    if sink is not None:
        for j, v in found.items():
            sink(j, v)
    return found


def voronoi_lasts(prob: VoronoiProblem):
    """{site: last(site)} over the whole of out(Q) via Zoom on the cover of Q."""
    k = len(prob.sites)
    last = np.full(max(k, 1), -1, dtype=np.int64)
    cover = cover_k(prob.vs.geo, prob.Q.id)
    zoom_k(prob.vs, prob.provider.ctx, prob.finite_sites(), cover,
           last, np.zeros(max(k, 1), dtype=np.int64))
    return {j: prob.g.vxy(last[j]) for j in range(k) if last[j] >= 0}


def build_vd(g, A, u, Q: Piece, omega, provider: DistanceProvider, mid_fn=None) -> VoronoiRepr:
    """Representation of VD(u, Q) for given weights.

    ``mid_fn(s, last)`` returns (distance, mid); by default the mid is left
    empty and the distance comes from the provider.
    """
    prob = VoronoiProblem(g, A, Q, omega, provider)
    lasts = voronoi_lasts(prob)
    recs = [None] * len(prob.sites)
    for j, lv in lasts.items():
        s = prob.sites[j]
        if mid_fn is not None:
            d, mid = mid_fn(s, lv)
        else:
            d = int(provider_dist(provider.ctx, j, g.vid(*s), g.vid(*lv)))
            mid = None
        recs[j] = SiteRecord(tuple(lv), mid, int(omega[j]) + int(d))
    return VoronoiRepr(tuple(u), Q, prob.sites, list(omega), recs)


class GammaIndex:
    """Persistent point-location sequences of one diagram, per axis."""

    def __init__(self, gp: GPool, row_crit, row_roots, col_crit, col_roots):
        self.gp = gp
        self.crit = {"row": np.asarray(row_crit), "column": np.asarray(col_crit)}
        self.roots = {"row": np.asarray(row_roots), "column": np.asarray(col_roots)}

    def root(self, axis, coord):
        i = int(np.searchsorted(self.crit[axis], coord, side="left"))
        return int(self.roots[axis][i])

    def version(self, axis, coord):
        """Sites of the version valid at ``coord`` in order."""
        out = []
        stack = []
        cur = self.root(axis, coord)
        gp = self.gp
        while stack or cur != -1:
            while cur != -1:
                stack.append(cur)
                cur = int(gp.left[cur])
            cur = stack.pop()
            out.append(int(gp.site[cur]))
            cur = int(gp.right[cur])
        return out

    def search(self, axis, coord, probe):
        return gamma_search(self, axis, coord, probe)


def build_gamma_index(vd: VoronoiRepr) -> GammaIndex:
    k = len(vd.sites)
    rows = np.array([r.last[0] if r is not None else -1 for r in vd.records], dtype=np.int64)
    cols = np.array([r.last[1] if r is not None else -1 for r in vd.records], dtype=np.int64)
    gp = new_gpool(2 * gamma_bound(k) + 1)
    out = []
    for coord, corner in ((rows, vd.Q.x2), (cols, vd.Q.y2)):
        crit = np.empty(k + 1, dtype=np.int64)
        roots = np.empty(k + 2, dtype=np.int64)
        nc = gamma_axis_k(gp, coord, corner, crit, roots)
        out += [crit[:nc].copy(), roots[:nc + 1].copy()]
    return GammaIndex(gp, *out)


def gamma_search(gi: GammaIndex, axis, coord, probe):
    """Descend the version at ``coord`` with ``probe(site)`` in {'LEFT','ON','RIGHT'}.

    RIGHT means the query point lies after that site's path.  Returns
    (site, None) on ON, otherwise (last site with RIGHT, its successor).
    """
    cur = gi.root(axis, coord)
    if cur == -1:
        raise ValueError("empty version")
    pred = succ = None
    gp = gi.gp
    while cur != -1:
        s = int(gp.site[cur])
        r = probe(s)
        if r == "ON":
            return (s, None)
        if r == "RIGHT":
            pred = s
            cur = int(gp.right[cur])
        else:
            succ = s
            cur = int(gp.left[cur])
    return (pred, succ)
