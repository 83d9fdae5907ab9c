"""Shortest-path trees rooted at the boundary sources of a piece.

Each source gets an explicit tree over the box of vertices that can be
related to it: the box from the source to the region's bottom-right corner
in the forward direction, or from the region's top-left corner to the
source in the reverse direction (edges flipped).  All trees live in shared
flat arrays (a "pool"): distance, parent direction, preorder number and the
preorder number of the last vertex in the subtree.

Children are visited lower-left first (forward: down, diagonal, right;
reverse: left, diagonal, up), so for two vertices in unrelated subtrees the
smaller preorder number lies on the lower-left side of the other's root
path.  That is what the side-of-path test relies on.
"""

import numpy as np
from numba import njit

from .core import DIR_DIAG, DIR_DOWN, DIR_NONE, DIR_RIGHT, Vertex, edge_w, struct_class

Pool = struct_class(__name__, "Pool", "dist par pre last")

LEFT, ON, RIGHT = -1, 0, 1
_SIDE_NAMES = {LEFT: "LEFT", ON: "ON", RIGHT: "RIGHT"}


def new_pool(size):
    return Pool(np.empty(size, dtype=np.int64), np.empty(size, dtype=np.int8),
                np.empty(size, dtype=np.int32), np.empty(size, dtype=np.int32))


@njit(cache=True)
def _preorder(pool, base, h, w, root, forward, stack, order):
    """Fill pre/last for the tree stored at base (box h x w, root local id)."""
    par = pool.par
    top = 0
    stack[0] = root
    top = 1
    cnt = 0
    while top > 0:
        top -= 1
        z = stack[top]
        pool.pre[base + z] = cnt
        order[cnt] = z
        cnt += 1
        a = z // w
        b = z - a * w
        # push in reverse visiting order
        if forward:
            if b + 1 < w and par[base + z + 1] == DIR_RIGHT:
                stack[top] = z + 1
                top += 1
            if a + 1 < h and b + 1 < w and par[base + z + w + 1] == DIR_DIAG:
                stack[top] = z + w + 1
                top += 1
            if a + 1 < h and par[base + z + w] == DIR_DOWN:
                stack[top] = z + w
                top += 1
        else:
            if a > 0 and par[base + z - w] == DIR_DOWN:
                stack[top] = z - w
                top += 1
            if a > 0 and b > 0 and par[base + z - w - 1] == DIR_DIAG:
                stack[top] = z - w - 1
                top += 1
            if b > 0 and par[base + z - 1] == DIR_RIGHT:
                stack[top] = z - 1
                top += 1
    # subtree sizes, accumulated in reverse preorder; reuse stack as sizes
    for k in range(cnt):
        stack[order[k]] = 1
    for k in range(cnt - 1, 0, -1):
        z = order[k]
        a = z // w
        b = z - a * w
        p = par[base + z]
        if forward:
            q = z - w - 1 if p == DIR_DIAG else (z - w if p == DIR_DOWN else z - 1)
        else:
            q = z + w + 1 if p == DIR_DIAG else (z + w if p == DIR_DOWN else z + 1)
        stack[q] += stack[z]
    for k in range(cnt):
        z = order[k]
        pool.last[base + z] = pool.pre[base + z] + stack[z] - 1


@njit(cache=True)
def build_tree(sc, tc, wts, pool, base, bx1, by1, bx2, by2, forward, stack, order):
    """Shortest-path tree over the box rooted at its top-left (forward) or
    bottom-right (reverse) corner, written into the pool at ``base``."""
    h = bx2 - bx1 + 1
    w = by2 - by1 + 1
    dist = pool.dist
    par = pool.par
    if forward:
        for a in range(h):
            for b in range(w):
                z = base + a * w + b
                if a == 0 and b == 0:
                    dist[z] = 0
                    par[z] = DIR_NONE
                    continue
                best = -1
                bp = DIR_NONE
                if a > 0 and b > 0:
                    wd = edge_w(sc, tc, wts, bx1 + a - 1, by1 + b - 1, 1, 1)
                    if wd >= 0:
                        best = dist[z - w - 1] + wd
                        bp = DIR_DIAG
                if a > 0:
                    t = dist[z - w] + wts[1]
                    if best < 0 or t < best:
                        best = t
                        bp = DIR_DOWN
                if b > 0:
                    t = dist[z - 1] + wts[0]
                    if best < 0 or t < best:
                        best = t
                        bp = DIR_RIGHT
                dist[z] = best
                par[z] = bp
        _preorder(pool, base, h, w, 0, True, stack, order)
    else:
        for a in range(h - 1, -1, -1):
            for b in range(w - 1, -1, -1):
                z = base + a * w + b
                if a == h - 1 and b == w - 1:
                    dist[z] = 0
                    par[z] = DIR_NONE
                    continue
                best = -1
                bp = DIR_NONE
                if a + 1 < h and b + 1 < w:
                    wd = edge_w(sc, tc, wts, bx1 + a, by1 + b, 1, 1)
                    if wd >= 0:
                        best = dist[z + w + 1] + wd
                        bp = DIR_DIAG
                if a + 1 < h:
                    t = dist[z + w] + wts[1]
                    if best < 0 or t < best:
                        best = t
                        bp = DIR_DOWN
                if b + 1 < w:
                    t = dist[z + 1] + wts[0]
                    if best < 0 or t < best:
                        best = t
                        bp = DIR_RIGHT
                dist[z] = best
                par[z] = bp
        _preorder(pool, base, h, w, h * w - 1, False, stack, order)


@njit(cache=True)
def tree_side(pool, base, bx1, by1, bx2, by2, forward, colmode, ex, ey, vx, vy):
    """Side of v relative to the tree path between the root and e.

    Returns -1 when v is on the lower-left side (earlier sites), 0 when v
    is on the path, +1 otherwise.  Row mode assumes the path crosses v's
    row, column mode that it crosses v's column.
    """
    if colmode:
        if vx < bx1:
            return 1
        if vx > bx2:
            return -1
    else:
        if vy < by1:
            return -1
        if vy > by2:
            return 1
    w = by2 - by1 + 1
    pv = base + (vx - bx1) * w + (vy - by1)
    pe = base + (ex - bx1) * w + (ey - by1)
    prev = pool.pre[pv]
    pree = pool.pre[pe]
    if prev <= pree and pree <= pool.last[pv]:
        return 0
    if pree < prev and prev <= pool.last[pe]:
        # v hangs below e: same row (column) as e by monotonicity
        if forward:
            return -1 if colmode else 1
        return 1 if colmode else -1
    return -1 if prev < pree else 1


@njit(cache=True)
def tree_dist(pool, base, bx1, by1, bx2, by2, vx, vy):
    if vx < bx1 or vx > bx2 or vy < by1 or vy > by2:
        return -1
    return pool.dist[base + (vx - bx1) * (by2 - by1 + 1) + (vy - by1)]


@njit(cache=True)
def tree_path(pool, base, bx1, by1, bx2, by2, forward, vx, vy):
    """Vertices of the tree path between the root and v, in path order."""
    w = by2 - by1 + 1
    n = (bx2 - bx1) + (by2 - by1) + 1
    out = np.empty((n, 2), dtype=np.int64)
    a = vx - bx1
    b = vy - by1
    k = 0
    while True:
        out[k, 0] = bx1 + a
        out[k, 1] = by1 + b
        k += 1
        p = pool.par[base + a * w + b]
        if p == DIR_NONE:
            break
        if forward:
            if p == DIR_DIAG:
                a -= 1
                b -= 1
            elif p == DIR_DOWN:
                a -= 1
            else:
                b -= 1
        else:
            if p == DIR_DIAG:
                a += 1
                b += 1
            elif p == DIR_DOWN:
                a += 1
            else:
                b += 1
    res = out[:k].copy()
    if forward:
        res = res[::-1].copy()
    return res


class SpForestIndex:
    """Shortest-path trees of one region from each of its sources.

    ``region`` is an inclusive rectangle (x1, y1, x2, y2).  Forward trees
    span [source, region bottom-right]; reverse trees span
    [region top-left, source] and measure distances *to* the source.
    """

    def __init__(self, g, region, sources, direction="forward"):
        if direction not in ("forward", "reverse"):
            raise ValueError("direction must be 'forward' or 'reverse'")
        self.g = g
        self.region = tuple(int(c) for c in region)
        self.forward = direction == "forward"
        self.sources = [tuple(int(c) for c in s) for s in sources]
        x1, y1, x2, y2 = self.region
        self.boxes = []
        self.offsets = []
        total = 0
        for sx, sy in self.sources:
            if not (x1 <= sx <= x2 and y1 <= sy <= y2):
                raise ValueError(f"source {(sx, sy)} outside region")
            box = (sx, sy, x2, y2) if self.forward else (x1, y1, sx, sy)
            self.boxes.append(box)
            self.offsets.append(total)
            total += (box[2] - box[0] + 1) * (box[3] - box[1] + 1)
        self.pool = new_pool(total)
        cap = (x2 - x1 + 1) * (y2 - y1 + 1)
        stack = np.empty(cap, dtype=np.int64)
        order = np.empty(cap, dtype=np.int64)
        for box, off in zip(self.boxes, self.offsets):
            build_tree(g.sc, g.tc, g.wts, self.pool, off, *box, self.forward, stack, order)
        self._index = {s: k for k, s in enumerate(self.sources)}

    def _k(self, s):
        try:
            return self._index[tuple(s)]
        except KeyError:
            raise ValueError(f"{tuple(s)} is not a source") from None

    def _check(self, v):
        x1, y1, x2, y2 = self.region
        if not (x1 <= v[0] <= x2 and y1 <= v[1] <= y2):
            raise ValueError(f"vertex {tuple(v)} outside region")

    def sp_dist(self, s, v):
        self._check(v)
        k = self._k(s)
        d = tree_dist(self.pool, self.offsets[k], *self.boxes[k], v[0], v[1])
        return None if d < 0 else int(d)

    def extract_path(self, s, v):
        if self.sp_dist(s, v) is None:
            raise ValueError(f"{tuple(v)} not connected to source {tuple(s)}")
        k = self._k(s)
        p = tree_path(self.pool, self.offsets[k], *self.boxes[k], self.forward, v[0], v[1])
        return [Vertex(int(a), int(b)) for a, b in p]

    def side_of_path(self, s, e, v, axis="row"):
        """'LEFT', 'ON' or 'RIGHT' of v against the tree path between s and e."""
        self._check(v)
        if self.sp_dist(s, e) is None:
            raise ValueError("e is not in the tree of s")
        k = self._k(s)
        r = tree_side(self.pool, self.offsets[k], *self.boxes[k], self.forward,
                      axis == "column", e[0], e[1], v[0], v[1])
        return _SIDE_NAMES[int(r)]

    @property
    def stored_entries(self):
        return len(self.pool.dist)


def build_sp_forest(g, region, sources, direction="forward") -> SpForestIndex:
    return SpForestIndex(g, region, sources, direction)


def sp_dist(idx: SpForestIndex, s, v):
    return idx.sp_dist(s, v)


def side_of_path(idx: SpForestIndex, s, e, v, axis="row"):
    return idx.side_of_path(s, e, v, axis)


def extract_path(idx: SpForestIndex, s, v):
    return idx.extract_path(s, v)
