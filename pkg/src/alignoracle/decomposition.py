"""Recursive rectangle decomposition and the level tree built on top of it.

Every piece of the binary decomposition at a given depth has the same
shape, so a piece is addressed by (depth, block row, block column) and all
geometry is arithmetic.  A piece id is ``off[depth] + bi * nbc[depth] + bj``.

Boundary conventions (vertices are (row, column)):

* ``bot(P)``: exit vertices, i.e. the bottom row unless it lies on the grid
  border, then the right column unless it lies on the grid border.  Ordered
  from the bottom-left vertex along the bottom row and up the right column.
* ``top(P)``: entry vertices, i.e. the left column and the top row when
  they are not on the grid border, ordered from the bottom-left vertex up
  the left column and then along the top row.
* ``P`` minus its boundary is the interior.  The whole grid has no boundary.
"""

from typing import NamedTuple

import numpy as np
from numba import njit

from .core import struct_class

Geo = struct_class(__name__, "Geo", "H W hr hc nbr nbc off ldepth t")


class Piece(NamedTuple):
    id: int
    depth: int
    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def rect(self):
        return (self.x1, self.y1, self.x2, self.y2)

    @property
    def num_vertices(self):
        return (self.x2 - self.x1 + 1) * (self.y2 - self.y1 + 1)

    def contains(self, v):
        return self.x1 <= v[0] <= self.x2 and self.y1 <= v[1] <= self.y2


# ---------------------------------------------------------------- kernels

@njit(cache=True)
def depth_of(geo, pid):
    d = 0
    while d + 1 < geo.off.shape[0] - 1 and geo.off[d + 1] <= pid:
        d += 1
    return d


@njit(cache=True)
def piece_id(geo, d, bi, bj):
    return geo.off[d] + bi * geo.nbc[d] + bj


@njit(cache=True)
def piece_rect(geo, pid):
    d = depth_of(geo, pid)
    k = pid - geo.off[d]
    bi = k // geo.nbc[d]
    bj = k % geo.nbc[d]
    x1 = bi * geo.hr[d]
    y1 = bj * geo.hc[d]
    return x1, y1, x1 + geo.hr[d], y1 + geo.hc[d]


@njit(cache=True)
def piece_parent(geo, pid):
    d = depth_of(geo, pid)
    k = pid - geo.off[d]
    bi = k // geo.nbc[d]
    bj = k % geo.nbc[d]
    if geo.hr[d - 1] != geo.hr[d]:
        bi //= 2
    else:
        bj //= 2
    return piece_id(geo, d - 1, bi, bj)


@njit(cache=True)
def piece_children(geo, pid):
    d = depth_of(geo, pid)
    if d + 1 >= geo.hr.shape[0]:
        return -1, -1
    k = pid - geo.off[d]
    bi = k // geo.nbc[d]
    bj = k % geo.nbc[d]
    if geo.hr[d + 1] != geo.hr[d]:
        return piece_id(geo, d + 1, 2 * bi, bj), piece_id(geo, d + 1, 2 * bi + 1, bj)
    return piece_id(geo, d + 1, bi, 2 * bj), piece_id(geo, d + 1, bi, 2 * bj + 1)


@njit(cache=True)
def piece_sibling(geo, pid):
    a, b = piece_children(geo, piece_parent(geo, pid))
    return b if a == pid else a


@njit(cache=True)
def chain_block(x, h, nb):
    """Block index of the half-open range (lo, hi] containing x ([0, h] for x = 0)."""
    if x == 0:
        return 0
    b = (x - 1) // h
    return b if b < nb else nb - 1


@njit(cache=True)
def level_piece(geo, level, x, y):
    """Id of R_level(u) for u = (x, y) at a level >= 1."""
    d = geo.ldepth[level]
    return piece_id(geo, d, chain_block(x, geo.hr[d], geo.nbr[d]),
                    chain_block(y, geo.hc[d], geo.nbc[d]))


@njit(cache=True)
def bot_len(geo, x1, y1, x2, y2):
    n = 0
    if x2 < geo.H:
        n += y2 - y1 + 1
    if y2 < geo.W:
        xs = x2 - 1 if x2 < geo.H else x2
        n += xs - x1 + 1
    return n


@njit(cache=True)
def bot_vertex(geo, x1, y1, x2, y2, j):
    nb = y2 - y1 + 1 if x2 < geo.H else 0
    if j < nb:
        return x2, y1 + j
    xs = x2 - 1 if x2 < geo.H else x2
    return xs - (j - nb), y2


@njit(cache=True)
def bot_index(geo, x1, y1, x2, y2, x, y):
    """Position of (x, y) in bot of the rectangle, or -1."""
    nb = 0
    if x2 < geo.H:
        nb = y2 - y1 + 1
        if x == x2 and y1 <= y <= y2:
            return y - y1
    if y2 < geo.W and y == y2:
        xs = x2 - 1 if x2 < geo.H else x2
        if x1 <= x <= xs:
            return nb + xs - x
    return -1


@njit(cache=True)
def top_len(geo, x1, y1, x2, y2):
    n = 0
    if y1 > 0:
        n += x2 - x1 + 1
    if x1 > 0:
        ys = y1 + 1 if y1 > 0 else y1
        n += y2 - ys + 1
    return n


@njit(cache=True)
def top_vertex(geo, x1, y1, x2, y2, j):
    nl = x2 - x1 + 1 if y1 > 0 else 0
    if j < nl:
        return x2 - j, y1
    ys = y1 + 1 if y1 > 0 else y1
    return x1, ys + (j - nl)


@njit(cache=True)
def is_internal(geo, x1, y1, x2, y2, x, y):
    if x < x1 or x > x2 or y < y1 or y > y2:
        return False
    if y == y1 and y1 > 0:
        return False
    if x == x1 and x1 > 0:
        return False
    if y == y2 and y2 < geo.W:
        return False
    if x == x2 and x2 < geo.H:
        return False
    return True


@njit(cache=True)
def lev_k(geo, x, y):
    best = 0
    for i in range(1, geo.t + 1):
        x1, y1, x2, y2 = piece_rect(geo, level_piece(geo, i, x, y))
        if bot_index(geo, x1, y1, x2, y2, x, y) >= 0:
            best = i
    return best


@njit(cache=True)
def anc_k(geo, ux, uy, vx, vy):
    for i in range(1, geo.t + 1):
        x1, y1, x2, y2 = piece_rect(geo, level_piece(geo, i, ux, uy))
        if is_internal(geo, x1, y1, x2, y2, vx, vy):
            return i
    return geo.t


@njit(cache=True)
def block_range(x, h, nb):
    """Inclusive range of block indices whose pieces contain coordinate x."""
    hi = x // h
    if hi >= nb:
        hi = nb - 1
    lo = hi
    if x % h == 0 and x > 0 and x // h - 1 >= 0:
        lo = x // h - 1
    return lo, hi


@njit(cache=True)
def share_piece(geo, depth, ux, uy, vx, vy):
    """True if some piece at this depth contains both vertices."""
    h = geo.hr[depth]
    w = geo.hc[depth]
    a0, a1 = block_range(ux, h, geo.nbr[depth])
    b0, b1 = block_range(vx, h, geo.nbr[depth])
    if max(a0, b0) > min(a1, b1):
        return False
    a0, a1 = block_range(uy, w, geo.nbc[depth])
    b0, b1 = block_range(vy, w, geo.nbc[depth])
    return max(a0, b0) <= min(a1, b1)


@njit(cache=True)
def cover_k(geo, qid):
    """Siblings of the weak ancestors of Q meeting the quadrant below-right of Q's corner."""
    qx1, qy1, _, _ = piece_rect(geo, qid)
    out = np.empty(geo.hr.shape[0], dtype=np.int64)
    k = 0
    cur = qid
    while cur != 0:
        sib = piece_sibling(geo, cur)
        x1, y1, x2, y2 = piece_rect(geo, sib)
        if x2 >= qx1 and y2 >= qy1:
            out[k] = sib
            k += 1
        cur = piece_parent(geo, cur)
    return out[:k]


# ---------------------------------------------------------------- Python API

class DecompositionTree:
    """Binary decomposition of the padded (m'+1) x (n'+1) vertex grid."""

    def __init__(self, mp: int, np_: int):
        for v in (mp, np_):
            if v < 1 or v & (v - 1):
                raise ValueError(f"padded dimensions must be powers of two, got {mp}x{np_}")
        self.H, self.W = mp, np_
        hr, hc = [mp], [np_]
        while hr[-1] > 1 or hc[-1] > 1:
            if hr[-1] >= hc[-1]:
                hr.append(hr[-1] // 2)
                hc.append(hc[-1])
            else:
                hr.append(hr[-1])
                hc.append(hc[-1] // 2)
        self.hr = np.array(hr, dtype=np.int64)
        self.hc = np.array(hc, dtype=np.int64)
        self.nbr = mp // self.hr
        self.nbc = np_ // self.hc
        self.off = np.concatenate([[0], np.cumsum(self.nbr * self.nbc)]).astype(np.int64)
        self.max_depth = len(hr) - 1

    @property
    def num_pieces(self):
        return int(self.off[-1])

    def geo(self, ldepth=None, t=0):
        if ldepth is None:
            ldepth = np.zeros(1, dtype=np.int64)
        return Geo(self.H, self.W, self.hr, self.hc, self.nbr, self.nbc, self.off, ldepth, t)

    def piece(self, pid) -> Piece:
        g = self.geo()
        x1, y1, x2, y2 = piece_rect(g, pid)
        return Piece(int(pid), int(depth_of(g, pid)), int(x1), int(y1), int(x2), int(y2))

    @property
    def root(self) -> Piece:
        return self.piece(0)

    def children(self, P):
        a, b = piece_children(self.geo(), P.id)
        return [] if a < 0 else [self.piece(a), self.piece(b)]

    def parent(self, P):
        return None if P.id == 0 else self.piece(piece_parent(self.geo(), P.id))

    def sibling(self, P):
        return None if P.id == 0 else self.piece(piece_sibling(self.geo(), P.id))

    def pieces_at_depth(self, d):
        return [self.piece(p) for p in range(self.off[d], self.off[d + 1])]

    def top(self, P):
        g = self.geo()
        return [tuple(int(c) for c in top_vertex(g, *P.rect, j)) for j in range(top_len(g, *P.rect))]

    def bot(self, P):
        g = self.geo()
        return [tuple(int(c) for c in bot_vertex(g, *P.rect, j)) for j in range(bot_len(g, *P.rect))]

    def boundary(self, P):
        return set(self.top(P)) | set(self.bot(P))

    def is_internal(self, P, v):
        return bool(is_internal(self.geo(), *P.rect, v[0], v[1]))


def build_decomposition(mp: int, np_: int) -> DecompositionTree:
    return DecompositionTree(mp, np_)


def top_boundary(A: DecompositionTree, P: Piece):
    return A.top(P)


def bot_boundary(A: DecompositionTree, P: Piece):
    return A.bot(P)


def cover_outside(A: DecompositionTree, Q: Piece):
    """Pieces of A covering out(Q): siblings of Q's weak ancestors meeting out(Q)."""
    return [A.piece(p) for p in cover_k(A.geo(), Q.id)]


class DivisionTree:
    """Levels t..0 of the division: level t is the grid, level 0 singletons.

    ``ldepth[i]`` is the decomposition depth whose pieces form level i.
    """

    def __init__(self, A: DecompositionTree, ratio: int = 16, leaf_target: int = 16):
        if ratio < 2:
            raise ValueError("ratio must be at least 2")
        self.A = A
        self.ratio = ratio
        self.leaf_target = leaf_target
        sizes = (A.hr + 1) * (A.hc + 1)
        fits = np.nonzero(sizes <= leaf_target)[0]
        d1 = int(fits[0]) if len(fits) else A.max_depth
        step = max(1, int(round(np.log2(ratio))))
        depths = [d1]
        while depths[-1] > 0:
            depths.append(max(0, depths[-1] - step))
        self.t = len(depths)
        self.ldepth = np.array([-1] + depths, dtype=np.int64)
        self.geo = A.geo(self.ldepth, self.t)

    def level_shape(self, i):
        """(rows, cols) in vertices of a level-i piece."""
        if i == 0:
            return (1, 1)
        d = self.ldepth[i]
        return int(self.A.hr[d] + 1), int(self.A.hc[d] + 1)

    def pieces_at_level(self, i):
        return self.A.pieces_at_depth(int(self.ldepth[i]))

    def R(self, u, i) -> Piece:
        """Ancestor piece of vertex u at level i >= 1."""
        return self.A.piece(level_piece(self.geo, i, u[0], u[1]))

    def ancestors(self, u):
        return [None] + [self.R(u, i) for i in range(1, self.t + 1)]


def build_division(A: DecompositionTree, ratio: int = 16, leaf_target: int = 16) -> DivisionTree:
    return DivisionTree(A, ratio, leaf_target)


def lev(T: DivisionTree, u) -> int:
    return int(lev_k(T.geo, u[0], u[1]))


def anc(T: DivisionTree, u, v) -> int:
    return int(anc_k(T.geo, u[0], u[1], v[0], v[1]))
