"""Sublinear-space distance oracles built from dense distance graphs (DDGs).

For a piece P with geometric sides

* top(P): top-right corner, leftwards along the top row, then down the
  left column to the bottom-left corner (v_1 .. v_k);
* bot(P): bottom-left corner, rightwards along the bottom row, then up the
  right column to the top-right corner (u_1 .. u_k);

the DDG matrix is M[i, j] = dist(v_i, u_j) inside P, where every top edge
also gets a reverse copy of weight w.  Those copies make M finite and
Monge; pairs that are unreachable without them are never relaxed.

Two backends share the query code:

* ``warmup``: dense M for every piece of the pruned tree (pieces no finer
  than the r-division);
* ``compressed``: last row and column of M plus the nonzero entries of
  P[i,j] = M[i,j] + M[i+1,j+1] - M[i,j+1] - M[i+1,j] in a persistent
  segment tree answering dominance sums.

A query runs Dijkstra over the DDGs of the two cones below the lowest
common piece, plus DP edges from u to its piece's boundary and into v.
Plain binary-heap Dijkstra is used, restricted to the box spanned by u, v.
"""

import heapq
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import (
    INF, AlignmentGraph, CostModel, dp_dist, score_from_distance, struct_class,
    transform_weights,
)
from .decomposition import (
    DecompositionTree, Piece, chain_block, piece_id, piece_parent,
    piece_rect, piece_sibling, share_piece,
)

__all__ = [
    "transform_weights", "Ddg", "MongeCompressedDdg", "build_ddg", "verify_monge",
    "compress_ddg", "ddg_entry", "WarmupOracle", "build_warmup", "sublinear_query",
]

DENSE, COMPRESSED = 0, 1

SubCtx = struct_class(__name__, "SubCtx", [
    "sc", "tc", "wts", "geo", "dr", "mode",
    "moff", "mflat",                       # dense
    "rcoff", "lastrow", "lastcol",         # compressed
    "roff", "roots", "nl", "nr", "ns",
    "dist", "stamp", "cur", "stats",       # query workspace
])

# query statistics slots
S_QUERIES, S_LINE, S_DP, S_DIJKSTRA, S_POPS, S_ACCESSES, S_CONE = range(7)
STAT_NAMES = ["queries", "line", "same_piece_dp", "dijkstra", "pops", "ddg_accesses",
              "cone_pieces"]


# ---------------------------------------------------------------- side orders

@njit(cache=True)
def side_len(x1, y1, x2, y2):
    return (x2 - x1) + (y2 - y1) + 1


@njit(cache=True)
def top_at(x1, y1, x2, y2, i):
    """i-th (0-based) vertex of the geometric top side."""
    C = y2 - y1 + 1
    if i < C:
        return x1, y2 - i
    return x1 + (i - C + 1), y1


@njit(cache=True)
def bot_at(x1, y1, x2, y2, j):
    C = y2 - y1 + 1
    if j < C:
        return x2, y1 + j
    return x2 - (j - C + 1), y2


@njit(cache=True)
def top_pos(x1, y1, x2, y2, x, y):
    """Position of (x, y) in the geometric top side, or -1."""
    if x < x1 or x > x2 or y < y1 or y > y2:
        return -1
    if x == x1:
        return y2 - y
    if y == y1:
        return (y2 - y1) + (x - x1)
    return -1


# ---------------------------------------------------------------- DDG build

@njit(cache=True)
def ddg_dense_k(sc, tc, wts, w, x1, y1, x2, y2):
    """Dense DDG matrix of the piece (0-based indices)."""
    k = side_len(x1, y1, x2, y2)
    C = y2 - y1 + 1
    M = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        ax, ay = top_at(x1, y1, x2, y2, i)
        # rectangle DP from v_i inside P
        wd = y2 - ay + 1
        prev = np.empty(wd, dtype=np.int64)
        prev[0] = 0
        for b in range(1, wd):
            prev[b] = prev[b - 1] + wts[0]
        rows = np.empty((x2 - ax + 1, wd), dtype=np.int64)
        rows[0] = prev
        for a in range(1, x2 - ax + 1):
            x = ax + a - 1
            rows[a, 0] = rows[a - 1, 0] + wts[1]
            for b in range(1, wd):
                best = rows[a - 1, b] + wts[1]
                t = rows[a, b - 1] + wts[0]
                if t < best:
                    best = t
                if sc[x] == tc[ay + b - 1]:
                    t = rows[a - 1, b - 1] + wts[2]
                    if t < best:
                        best = t
                elif wts[3] >= 0:
                    t = rows[a - 1, b - 1] + wts[3]
                    if t < best:
                        best = t
                rows[a, b] = best
        for j in range(k):
            bx, by = bot_at(x1, y1, x2, y2, j)
            if bx >= ax and by >= ay:
                M[i, j] = rows[bx - ax, by - ay]
            else:
                M[i, j] = INF
    # chain along the top side: step cost between v_i and v_{i+1}
    # top row: real edge v_{i+1} -> v_i, reverse copy costs w
    # left column: real edge v_i -> v_{i+1}, reverse copy costs w
    for i in range(1, k):
        # moving from v_i to v_{i-1}
        c = wts[0] if i < C else w
        for j in range(k):
            t = M[i - 1, j] + c
            if t < M[i, j]:
                M[i, j] = t
    for i in range(k - 2, -1, -1):
        # moving from v_i to v_{i+1}
        c = w if i + 1 < C else wts[1]
        for j in range(k):
            t = M[i + 1, j] + c
            if t < M[i, j]:
                M[i, j] = t
    return M


@njit(cache=True)
def monge_violations_k(M, w, out):
    """Writes (kind, i, j, lhs, rhs) rows; kind 1 = Monge, 2 = bounded difference."""
    k = M.shape[0]
    n = 0
    for i in range(k - 1):
        for j in range(k - 1):
            lhs = M[i + 1, j] - M[i, j]
            rhs = M[i + 1, j + 1] - M[i, j + 1]
            if lhs > rhs and n < out.shape[0]:
                out[n, 0] = 1
                out[n, 1] = i
                out[n, 2] = j
                out[n, 3] = lhs
                out[n, 4] = rhs
                n += 1
    for i in range(k - 1):
        for j in range(k):
            d = M[i + 1, j] - M[i, j]
            if (d > w or d < -w) and n < out.shape[0]:
                out[n, 0] = 2
                out[n, 1] = i
                out[n, 2] = j
                out[n, 3] = d
                out[n, 4] = w
                n += 1
    return n


# ---------------------------------------------------------------- compression

@njit(cache=True)
def p_points_k(M):
    """Nonzero entries of the (k-1) x (k-1) matrix P as (row, col, value)."""
    k = M.shape[0]
    n = 0
    for i in range(k - 1):
        for j in range(k - 1):
            if M[i, j] + M[i + 1, j + 1] - M[i, j + 1] - M[i + 1, j] != 0:
                n += 1
    pts = np.empty((n, 3), dtype=np.int64)
    n = 0
    for i in range(k - 1):
        for j in range(k - 1):
            p = M[i, j] + M[i + 1, j + 1] - M[i, j + 1] - M[i + 1, j]
            if p != 0:
                pts[n, 0] = i
                pts[n, 1] = j
                pts[n, 2] = p
                n += 1
    return pts


@njit(cache=True)
def pst_size(npts, k):
    h = 1
    while (1 << (h - 1)) < max(k, 1):
        h += 1
    return npts * (h + 1) + 1


@njit(cache=True)
def pst_build(pts, k, nl, nr, ns, base, roots):
    """Persistent segment tree over columns [0, k-1); version i holds rows >= i.

    Node 'base' is the shared empty node.  Returns the next free node.
    roots[i] for i in [0, k) (roots[k-1] is the empty version).
    """
    m = max(k - 1, 1)
    nl[base] = base
    nr[base] = base
    ns[base] = 0
    top = base + 1
    cur = base
    p = pts.shape[0] - 1          # points sorted by row ascending
    path = np.empty(64, dtype=np.int64)
    dirs = np.empty(64, dtype=np.int64)
    roots[k - 1] = base
    for i in range(k - 2, -1, -1):
        while p >= 0 and pts[p, 0] == i:
            col = pts[p, 1]
            val = pts[p, 2]
            # path-copying insert of (col, val)
            lo = 0
            hi = m - 1
            node = cur
            depth = 0
            while True:
                path[depth] = node
                if lo == hi:
                    break
                md = (lo + hi) // 2
                if col <= md:
                    dirs[depth] = 0
                    node = nl[node]
                    hi = md
                else:
                    dirs[depth] = 1
                    node = nr[node]
                    lo = md + 1
                depth += 1
            child = top
            nl[top] = base
            nr[top] = base
            ns[top] = ns[path[depth]] + val
            top += 1
            for d in range(depth - 1, -1, -1):
                old = path[d]
                nn = top
                top += 1
                if dirs[d] == 0:
                    nl[nn] = child
                    nr[nn] = nr[old]
                else:
                    nl[nn] = nl[old]
                    nr[nn] = child
                ns[nn] = ns[nl[nn]] + ns[nr[nn]]
                child = nn
            cur = child
            p -= 1
        roots[i] = cur
    return top


@njit(cache=True)
def pst_suffix(nl, nr, ns, root, m, j):
    """Sum of values at columns >= j in the version rooted at ``root``."""
    if j >= m:
        return 0
    s = 0
    node = root
    lo = 0
    hi = m - 1
    while True:
        if j <= lo:
            return s + ns[node]
        md = (lo + hi) // 2
        if j <= md:
            s += ns[nr[node]]
            node = nl[node]
            hi = md
        else:
            node = nr[node]
            lo = md + 1


@njit(cache=True)
def ddg_get(ctx, pid, i, j, k):
    """M[i, j] (0-based) of piece pid."""
    if ctx.mode == DENSE:
        return ctx.mflat[ctx.moff[pid] + i * k + j]
    ro = ctx.rcoff[pid]
    if i == k - 1:
        return ctx.lastrow[ro + j]
    if j == k - 1:
        return ctx.lastcol[ro + i]
    dom = pst_suffix(ctx.nl, ctx.nr, ctx.ns, ctx.roots[ctx.roff[pid] + i], max(k - 1, 1), j)
    return dom - ctx.lastrow[ro + k - 1] + ctx.lastcol[ro + i] + ctx.lastrow[ro + j]


# ---------------------------------------------------------------- queries

@njit(cache=True)
def _rdp_to(sc, tc, wts, x1, y1, vx, vy):
    """dist(z, v) for z in the box [x1..vx] x [y1..vy]."""
    h = vx - x1 + 1
    w = vy - y1 + 1
    d = np.empty((h, w), dtype=np.int64)
    for a in range(h - 1, -1, -1):
        for b in range(w - 1, -1, -1):
            if a == h - 1 and b == w - 1:
                d[a, b] = 0
                continue
            best = INF
            if a + 1 < h:
                best = d[a + 1, b] + wts[1]
            if b + 1 < w:
                t = d[a, b + 1] + wts[0]
                if t < best:
                    best = t
            if a + 1 < h and b + 1 < w:
                x = x1 + a
                y = y1 + b
                wd = wts[2] if sc[x] == tc[y] else wts[3]
                if wd >= 0:
                    t = d[a + 1, b + 1] + wd
                    if t < best:
                        best = t
            d[a, b] = best
    return d


@njit(cache=True)
def _fdp_from(sc, tc, wts, ux, uy, x2, y2):
    h = x2 - ux + 1
    w = y2 - uy + 1
    d = np.empty((h, w), dtype=np.int64)
    d[0, 0] = 0
    for b in range(1, w):
        d[0, b] = d[0, b - 1] + wts[0]
    for a in range(1, h):
        x = ux + a - 1
        d[a, 0] = d[a - 1, 0] + wts[1]
        for b in range(1, w):
            best = d[a - 1, b] + wts[1]
            t = d[a, b - 1] + wts[0]
            if t < best:
                best = t
            wd = wts[2] if sc[x] == tc[uy + b - 1] else wts[3]
            if wd >= 0:
                t = d[a - 1, b - 1] + wd
                if t < best:
                    best = t
            d[a, b] = best
    return d


@njit(cache=True)
def _rpiece(geo, d, x, y):
    return piece_id(geo, d, chain_block(x, geo.hr[d], geo.nbr[d]),
                    chain_block(y, geo.hc[d], geo.nbc[d]))


@njit(cache=True)
def _cone(geo, pz, qz, out, n):
    """Append P_z and the siblings of its ancestors strictly below Q_z."""
    out[n] = pz
    n += 1
    cur = pz
    while cur != qz:
        out[n] = piece_sibling(geo, cur)
        n += 1
        cur = piece_parent(geo, cur)
    return n


@njit(cache=True)
def query_k(ctx, ux, uy, vx, vy):
    geo = ctx.geo
    sc = ctx.sc
    tc = ctx.tc
    wts = ctx.wts
    ctx.stats[S_QUERIES] += 1
    if vx < ux or vy < uy:
        return -1
    if ux == vx or uy == vy:
        ctx.stats[S_LINE] += 1
        return (vy - uy) * wts[0] + (vx - ux) * wts[1]
    dr = ctx.dr
    if share_piece(geo, dr, ux, uy, vx, vy):
        ctx.stats[S_DP] += 1
        return dp_dist(sc, tc, wts, ux, uy, vx, vy)
    ctx.stats[S_DIJKSTRA] += 1
    pu = _rpiece(geo, dr, ux, uy)
    pv = _rpiece(geo, dr, vx, vy)
    # lowest common ancestor and its children on both sides
    a = pu
    b = pv
    qa = -1
    qb = -1
    while a != b:
        qa = a
        qb = b
        a = piece_parent(geo, a)
        b = piece_parent(geo, b)
    cones = np.empty(2 * (dr + 2), dtype=np.int64)
    nc = _cone(geo, pu, qa, cones, 0)
    nc = _cone(geo, pv, qb, cones, nc)
    ctx.stats[S_CONE] += nc
    W1 = geo.W + 1
    ctx.cur[0] += 1
    st = ctx.cur[0]
    dist = ctx.dist
    stamp = ctx.stamp
    # DP edges out of u and into v
    px1, py1, px2, py2 = piece_rect(geo, pu)
    du = _fdp_from(sc, tc, wts, ux, uy, min(px2, vx), min(py2, vy))
    qx1, qy1, qx2, qy2 = piece_rect(geo, pv)
    lx = max(qx1, ux)
    ly = max(qy1, uy)
    dv = _rdp_to(sc, tc, wts, lx, ly, vx, vy)
    best = INF
    heap = [(np.int64(0), np.int64(ux * W1 + uy))]
    heap.pop()
    # seed: u itself plus its DP edges to the exit side of P_u
    for j in range(side_len(px1, py1, px2, py2)):
        bx, by = bot_at(px1, py1, px2, py2, j)
        if bx < ux or by < uy or bx > vx or by > vy:
            continue
        d = du[bx - ux, by - uy]
        z = bx * W1 + by
        if stamp[z] != st or d < dist[z]:
            stamp[z] = st
            dist[z] = d
            heapq.heappush(heap, (d, z))
    z = ux * W1 + uy
    if stamp[z] != st or dist[z] > 0:
        stamp[z] = st
        dist[z] = 0
        heapq.heappush(heap, (np.int64(0), z))
    while len(heap) > 0:
        d, z = heapq.heappop(heap)
        if d != dist[z] or stamp[z] != st:
            continue
        if d >= best:
            break
        ctx.stats[S_POPS] += 1
        x = z // W1
        y = z % W1
        # into v through P_v
        if lx <= x <= vx and ly <= y <= vy and (x == qx1 or y == qy1):
            t = d + dv[x - lx, y - ly]
            if t < best:
                best = t
        for c in range(nc):
            pid = cones[c]
            x1, y1, x2, y2 = piece_rect(geo, pid)
            i = top_pos(x1, y1, x2, y2, x, y)
            if i < 0:
                continue
            k = side_len(x1, y1, x2, y2)
            for j in range(k):
                bx, by = bot_at(x1, y1, x2, y2, j)
                if bx < x or by < y or bx > vx or by > vy:
                    continue
                ctx.stats[S_ACCESSES] += 1
                nd = d + ddg_get(ctx, pid, i, j, k)
                zz = bx * W1 + by
                if stamp[zz] != st or nd < dist[zz]:
                    stamp[zz] = st
                    dist[zz] = nd
                    heapq.heappush(heap, (nd, zz))
    if best >= INF:
        return -1
    return best


@njit(cache=True)
def batch_k(ctx, qs, out):
    for r in range(qs.shape[0]):
        out[r] = query_k(ctx, qs[r, 0], qs[r, 1], qs[r, 2], qs[r, 3])


# ---------------------------------------------------------------- Python API

@dataclass
class Ddg:
    """Dense DDG of one piece: M[i, j] = dist(top[i], bot[j]) with top copies."""

    piece: Piece
    k: int
    M: np.ndarray
    w: int

    @property
    def top(self):
        return [top_at(*self.piece.rect, i) for i in range(self.k)]

    @property
    def bot(self):
        return [bot_at(*self.piece.rect, j) for j in range(self.k)]

    def reachable(self, i, j):
        a = top_at(*self.piece.rect, i)
        b = bot_at(*self.piece.rect, j)
        return b[0] >= a[0] and b[1] >= a[1]


@dataclass
class MongeCompressedDdg:
    """Last row/column of M plus the nonzero entries of P in a dominance-sum tree."""

    piece: Piece
    k: int
    w: int
    last_row: np.ndarray
    last_col: np.ndarray
    points: np.ndarray
    nl: np.ndarray
    nr: np.ndarray
    ns: np.ndarray
    roots: np.ndarray

    @property
    def nonzeros(self):
        return len(self.points)

    def stored_numbers(self):
        """Numbers kept: last row and column, the points, and the index nodes."""
        return int(2 * self.k - 1 + 3 * len(self.points) + 3 * len(self.ns) + len(self.roots))

    def dominance_sum(self, i, j):
        """Sum of P[r, c] over r >= i, c >= j (1-based, as in M)."""
        if i >= self.k or j >= self.k:
            return 0
        return int(pst_suffix(self.nl, self.nr, self.ns, self.roots[i - 1], max(self.k - 1, 1), j - 1))


def build_ddg(g: AlignmentGraph, P: Piece, w=None) -> Ddg:
    w = g.cost.w_bound if w is None else int(w)
    M = ddg_dense_k(g.sc, g.tc, g.wts, w, *P.rect)
    return Ddg(P, M.shape[0], M, w)


def verify_monge(d, w=None):
    """Violations of the Monge and bounded-difference inequalities.

    Accepts a Ddg or a square matrix.  Each item is a dict with the kind,
    the 1-based (i, j) and both sides of the failed inequality.
    """
    if isinstance(d, Ddg):
        M = d.M
        w = d.w if w is None else w
    else:
        M = np.asarray(d, dtype=np.int64)
        if w is None:
            raise ValueError("w is required for a raw matrix")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix expected")
    k = M.shape[0]
    out = np.empty((max(1, 2 * k * k), 5), dtype=np.int64)
    n = monge_violations_k(np.ascontiguousarray(M), int(w), out)
    kinds = {1: "monge", 2: "bounded"}
    return [{"kind": kinds[int(r[0])], "i": int(r[1]) + 1, "j": int(r[2]) + 1,
             "lhs": int(r[3]), "rhs": int(r[4])} for r in out[:n]]


def _compress_arrays(M):
    k = M.shape[0]
    pts = p_points_k(M)
    cap = pst_size(len(pts), max(k - 1, 1))
    nl = np.empty(cap, dtype=np.int64)
    nr = np.empty(cap, dtype=np.int64)
    ns = np.empty(cap, dtype=np.int64)
    roots = np.empty(max(k, 1), dtype=np.int64)
    used = pst_build(pts, k, nl, nr, ns, 0, roots)
    return pts, nl[:used].copy(), nr[:used].copy(), ns[:used].copy(), roots


def compress_ddg(d: Ddg, w=None) -> MongeCompressedDdg:
    w = d.w if w is None else int(w)
    bad = verify_monge(d.M, w)
    if bad:
        v = bad[0]
        raise ValueError(f"not a valid DDG ({v['kind']} violation at i={v['i']}, j={v['j']}: "
                         f"{v['lhs']} vs {v['rhs']})")
    pts, nl, nr, ns, roots = _compress_arrays(d.M)
    return MongeCompressedDdg(d.piece, d.k, w, d.M[-1].copy(), d.M[:, -1].copy(),
                              pts, nl, nr, ns, roots)


def ddg_entry(c: MongeCompressedDdg, i, j) -> int:
    """M[i, j] for 1 <= i, j <= k, from the stored last row/column and P."""
    k = c.k
    if not (1 <= i <= k and 1 <= j <= k):
        raise ValueError(f"entry ({i},{j}) out of range 1..{k}")
    if i == k:
        return int(c.last_row[j - 1])
    if j == k:
        return int(c.last_col[i - 1])
    return c.dominance_sum(i, j) - int(c.last_row[k - 1]) + int(c.last_col[i - 1]) + int(c.last_row[j - 1])


class WarmupOracle:
    """DDGs of every piece no finer than the r-division, dense or compressed."""

    def __init__(self, g: AlignmentGraph, r=None, mode="warmup"):
        if mode not in ("warmup", "compressed"):
            raise ValueError("mode must be 'warmup' or 'compressed'")
        self.g = g
        self.mode = mode
        self.A = DecompositionTree(g.mp, g.np_)
        A = self.A
        N = g.num_vertices
        self.r = int(r) if r is not None else int(round(np.sqrt(N)))
        if self.r < 1:
            raise ValueError("r must be positive")
        sizes = (A.hr + 1) * (A.hc + 1)
        fits = np.nonzero(sizes <= self.r)[0]
        self.dr = int(fits[0]) if len(fits) else int(A.max_depth)
        self.w = g.cost.w_bound
        geo = A.geo(np.array([-1, self.dr], dtype=np.int64), 1)
        npieces = int(A.off[self.dr] + A.nbr[self.dr] * A.nbc[self.dr])
        self.num_pieces = npieces
        per_depth = {}
        if mode == "warmup":
            moff = np.zeros(npieces, dtype=np.int64)
            mats = []
            tot = 0
            for pid in range(npieces):
                P = A.piece(pid)
                M = ddg_dense_k(g.sc, g.tc, g.wts, self.w, *P.rect)
                moff[pid] = tot
                tot += M.size
                mats.append(M.ravel())
                per_depth[P.depth] = per_depth.get(P.depth, 0) + M.size
            mflat = np.concatenate(mats)
            z = np.zeros(1, dtype=np.int64)
            rcoff = roff = lastrow = lastcol = roots = nl = nr = ns = z
            code = DENSE
        else:
            rcoff = np.zeros(npieces, dtype=np.int64)
            roff = np.zeros(npieces, dtype=np.int64)
            lr, lc, rts, L, R, S = [], [], [], [], [], []
            tl = tr = tn = 0
            self.nonzeros = {}
            for pid in range(npieces):
                P = A.piece(pid)
                M = ddg_dense_k(g.sc, g.tc, g.wts, self.w, *P.rect)
                pts, nl_, nr_, ns_, roots_ = _compress_arrays(M)
                k = M.shape[0]
                rcoff[pid] = tl
                lr.append(M[-1].copy())
                lc.append(M[:, -1].copy())
                tl += k
                roff[pid] = tr
                rts.append(roots_ + tn)
                tr += len(roots_)
                L.append(nl_ + tn)
                R.append(nr_ + tn)
                S.append(ns_)
                tn += len(ns_)
                self.nonzeros[pid] = (k, len(pts))
                stored = 2 * k - 1 + 3 * len(pts) + 3 * len(ns_) + len(roots_)
                per_depth[P.depth] = per_depth.get(P.depth, 0) + stored
            lastrow = np.concatenate(lr)
            lastcol = np.concatenate(lc)
            roots = np.concatenate(rts)
            nl = np.concatenate(L)
            nr = np.concatenate(R)
            ns = np.concatenate(S)
            moff = mflat = np.zeros(1, dtype=np.int64)
            code = COMPRESSED
        self.stored_by_depth = dict(sorted(per_depth.items()))
        self.ctx = SubCtx(g.sc, g.tc, g.wts, geo, self.dr, code, moff, mflat,
                          rcoff, lastrow, lastcol, roff, roots, nl, nr, ns,
                          np.zeros(N, dtype=np.int64), np.zeros(N, dtype=np.int64),
                          np.zeros(1, dtype=np.int64), np.zeros(len(STAT_NAMES), dtype=np.int64))

    @property
    def stored_numbers(self):
        """Total numbers kept across all DDGs (strings excluded)."""
        return int(sum(self.stored_by_depth.values()))

    @property
    def stored_numbers_rdivision(self):
        """Numbers kept for the pieces of the r-division itself."""
        return int(self.stored_by_depth.get(self.dr, 0))

    def query(self, u, v):
        self.g.check_vertex(u)
        self.g.check_vertex(v)
        d = query_k(self.ctx, u[0], u[1], v[0], v[1])
        return None if d < 0 else int(d)

    def batch_dist(self, queries):
        qs = np.ascontiguousarray(np.asarray(queries, dtype=np.int64).reshape(-1, 4))
        out = np.empty(len(qs), dtype=np.int64)
        batch_k(self.ctx, qs, out)
        return out

    def alignment_score(self, i, j, a, b):
        if not (0 <= i <= j <= self.g.m and 0 <= a <= b <= self.g.n):
            raise ValueError(f"query ({i},{j},{a},{b}) out of range for m={self.g.m}, n={self.g.n}")
        return score_from_distance(self.g.cost, i, j, a, b, self.query((i, a), (j, b)))

    def query_stats(self):
        return {n: int(c) for n, c in zip(STAT_NAMES, self.ctx.stats)}

    def reset_query_stats(self):
        self.ctx.stats[:] = 0

    def stats(self):
        return {"backend": self.mode, "r": self.r, "r_depth": self.dr,
                "r_piece_shape": [int(self.A.hr[self.dr] + 1), int(self.A.hc[self.dr] + 1)],
                "pieces": self.num_pieces, "w": self.w,
                "stored_numbers": self.stored_numbers,
                "stored_numbers_rdivision": self.stored_numbers_rdivision,
                "stored_by_depth": {str(d): int(c) for d, c in self.stored_by_depth.items()}}


def build_warmup(S, T=None, cost=None, r=None, mode="warmup") -> WarmupOracle:
    g = S if isinstance(S, AlignmentGraph) else AlignmentGraph(S, T, cost or CostModel.lcs())
    return WarmupOracle(g, r, mode)


def sublinear_query(o: WarmupOracle, u, v):
    return o.query(u, v)
