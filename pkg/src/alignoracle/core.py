"""Strings, cost models, the implicit alignment grid and a brute-force DP oracle.

The alignment graph of S (rows) and T (columns) has a vertex for every
(x, y) with 0 <= x <= m' and 0 <= y <= n'.  Edges go right (consume a
character of T), down (consume a character of S) and diagonally when the
cost model allows it.  Everything else in the package works on this graph
through flat numpy arrays so that the numba kernels can share it.
"""

import sys
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit
from numba.core import types
from numba.experimental import structref

# kernels use INF internally; the Python API reports UNREACHABLE instead
INF = np.int64(1 << 60)
UNREACHABLE = None

PAD_S = -1
PAD_T = -2

# parent direction codes used by DP tracebacks and shortest-path trees
DIR_NONE = 0
DIR_DIAG = 1
DIR_DOWN = 2
DIR_RIGHT = 3


def _struct_fields(self, fields):
    return tuple((n, types.unliteral(t)) for n, t in fields)


def struct_class(module, name, fields):
    """A record type passed to kernels by reference.

    Namedtuples of arrays are passed member by member, which costs a
    refcount round trip per array on every call; a structref costs one.
    The Python proxy keeps its constructor arguments for attribute reads
    and ``_replace``.
    """
    fields = tuple(fields.split()) if isinstance(fields, str) else tuple(fields)
    tcls = type(name + "Type", (types.StructRef,),
                {"preprocess_fields": _struct_fields, "__module__": module})
    structref.register(tcls)
    setattr(sys.modules[module], tcls.__name__, tcls)

    def __new__(cls, *args, **kw):
        vals = list(args) + [kw.pop(f) for f in fields[len(args):]]
        if kw or len(vals) != len(fields):
            raise TypeError(f"{name} expects fields {fields}")
        obj = structref.StructRefProxy.__new__(cls, *vals)
        obj._py = dict(zip(fields, vals))
        return obj

    def __getattr__(self, attr):
        try:
            return self.__dict__["_py"][attr]
        except KeyError:
            raise AttributeError(attr) from None

    def _replace(self, **kw):
        d = dict(self._py)
        d.update(kw)
        return type(self)(*[d[f] for f in fields])

    pcls = type(name, (structref.StructRefProxy,), {
        "__module__": module, "__new__": __new__, "__getattr__": __getattr__,
        "_replace": _replace, "_fields": fields})
    structref.define_proxy(pcls, tcls, list(fields))
    # define_proxy replaces __new__ with a plain constructor; restore ours
    pcls.__new__ = __new__
    return pcls


class Vertex(NamedTuple):
    x: int
    y: int


def transform_weights(w_match: int, w_mis: int, w_del: int):
    """Map maximisation weights to nonnegative shortest-path weights.

    Inputs must already be doubled so that half of ``w_match`` is integral.
    """
    if not (2 * w_match > 2 * w_mis >= w_del):
        raise ValueError(
            f"weights must satisfy 2*w_match > 2*w_mis >= w_del, got {(w_match, w_mis, w_del)}")
    if w_match % 2:
        raise ValueError("w_match must be even (weights are doubled at ingestion)")
    out = (0, w_match - w_mis, w_match // 2 - w_del)
    if min(out) < 0:
        raise ValueError(f"transformed weights {out} contain a negative entry")
    return out


@dataclass(frozen=True)
class CostModel:
    """Edge-weight model of the alignment graph.

    ``kind`` is one of "lcs", "levenshtein", "weighted".  For the weighted
    model the user supplies maximisation weights (match, mismatch,
    unaligned letter); they are doubled and transformed into nonnegative
    path weights.
    """

    kind: str = "lcs"
    w_match: int = 0
    w_mis: int = 0
    w_del: int = 0

    def __post_init__(self):
        if self.kind not in ("lcs", "levenshtein", "weighted"):
            raise ValueError(f"unknown cost model {self.kind!r}")
        if self.kind == "weighted":
            transform_weights(2 * self.w_match, 2 * self.w_mis, 2 * self.w_del)

    @classmethod
    def lcs(cls):
        return cls("lcs")

    @classmethod
    def levenshtein(cls):
        return cls("levenshtein")

    @classmethod
    def weighted(cls, w_match, w_mis, w_del):
        return cls("weighted", int(w_match), int(w_mis), int(w_del))

    def edge_weights(self):
        """Return (horizontal, vertical, diagonal match, diagonal mismatch).

        A mismatch weight of -1 means the diagonal edge does not exist.
        """
        if self.kind == "lcs":
            return (1, 1, 1, -1)
        if self.kind == "levenshtein":
            return (1, 1, 0, 1)
        wm, wx, wd = transform_weights(2 * self.w_match, 2 * self.w_mis, 2 * self.w_del)
        return (wd, wd, wm, wx)

    @property
    def w_bound(self) -> int:
        return max(w for w in self.edge_weights() if w >= 0)


def _pow2_at_least(k: int) -> int:
    p = 1
    while p < k:
        p *= 2
    return p


def _codes(seq, pad_len, pad_value):
    if isinstance(seq, str):
        seq = seq.encode()
    out = np.full(pad_len, pad_value, dtype=np.int64)
    out[: len(seq)] = np.frombuffer(bytes(seq), dtype=np.uint8)
    return out


class AlignmentGraph:
    """Padded implicit grid graph of two byte strings (immutable)."""

    def __init__(self, S, T, cost: Optional[CostModel] = None):
        if isinstance(S, str):
            S = S.encode()
        if isinstance(T, str):
            T = T.encode()
        if len(S) == 0 or len(T) == 0:
            raise ValueError("strings must be nonempty")
        self.S = bytes(S)
        self.T = bytes(T)
        self.cost = cost or CostModel.lcs()
        self.m, self.n = len(S), len(T)
        self.mp = _pow2_at_least(self.m)
        self.np_ = _pow2_at_least(self.n)
        self.sc = _codes(self.S, self.mp, PAD_S)
        self.tc = _codes(self.T, self.np_, PAD_T)
        self.wts = np.array(self.cost.edge_weights(), dtype=np.int64)
        for arr in (self.sc, self.tc, self.wts):
            arr.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.mp + 1

    @property
    def cols(self) -> int:
        return self.np_ + 1

    @property
    def num_vertices(self) -> int:
        return self.rows * self.cols

    def vid(self, x, y) -> int:
        return x * self.cols + y

    def vxy(self, v):
        return Vertex(*divmod(int(v), self.cols))

    def check_vertex(self, u):
        x, y = u
        if not (0 <= x <= self.mp and 0 <= y <= self.np_):
            raise ValueError(f"vertex {tuple(u)} outside the {self.rows}x{self.cols} grid")

    def edge_weight(self, u, v) -> Optional[int]:
        """Weight of the edge u->v, or None if there is no such edge."""
        w = edge_w(self.sc, self.tc, self.wts, u[0], u[1], v[0] - u[0], v[1] - u[1])
        return None if w < 0 else int(w)

    def __repr__(self):
        return f"AlignmentGraph(m={self.m}, n={self.n}, padded={self.mp}x{self.np_}, cost={self.cost.kind})"


def build_alignment_graph(S, T, cost: Optional[CostModel] = None) -> AlignmentGraph:
    return AlignmentGraph(S, T, cost)


@njit(cache=True)
def edge_w(sc, tc, wts, x, y, dx, dy):
    """Weight of the edge from (x, y) by step (dx, dy); -1 if absent."""
    if dx == 0 and dy == 1:
        return wts[0]
    if dx == 1 and dy == 0:
        return wts[1]
    if dx == 1 and dy == 1:
        if sc[x] == tc[y]:
            return wts[2]
        return wts[3]
    return -1


@njit(cache=True)
def dp_box(sc, tc, wts, x0, y0, x1, y1):
    """Distances from (x0, y0) to every vertex of the box up to (x1, y1)."""
    h = x1 - x0 + 1
    w = y1 - y0 + 1
    d = np.empty((h, w), dtype=np.int64)
    d[0, 0] = 0
    for b in range(1, w):
        d[0, b] = d[0, b - 1] + wts[0]
    for a in range(1, h):
        x = x0 + a - 1
        d[a, 0] = d[a - 1, 0] + wts[1]
        for b in range(1, w):
            best = d[a - 1, b] + wts[1]
            t = d[a, b - 1] + wts[0]
            if t < best:
                best = t
            if sc[x] == tc[y0 + b - 1]:
                t = d[a - 1, b - 1] + wts[2]
                if t < best:
                    best = t
            elif wts[3] >= 0:
                t = d[a - 1, b - 1] + wts[3]
                if t < best:
                    best = t
            d[a, b] = best
    return d


@njit(cache=True)
def dp_dist(sc, tc, wts, x0, y0, x1, y1):
    """Rectangle DP distance from (x0, y0) to (x1, y1); -1 if unreachable."""
    if x1 < x0 or y1 < y0:
        return -1
    h = x1 - x0 + 1
    w = y1 - y0 + 1
    prev = np.empty(w, dtype=np.int64)
    cur = np.empty(w, dtype=np.int64)
    prev[0] = 0
    for b in range(1, w):
        prev[b] = prev[b - 1] + wts[0]
    for a in range(1, h):
        x = x0 + a - 1
        cur[0] = prev[0] + wts[1]
        for b in range(1, w):
            best = prev[b] + wts[1]
            t = cur[b - 1] + wts[0]
            if t < best:
                best = t
            if sc[x] == tc[y0 + b - 1]:
                t = prev[b - 1] + wts[2]
                if t < best:
                    best = t
            elif wts[3] >= 0:
                t = prev[b - 1] + wts[3]
                if t < best:
                    best = t
            cur[b] = best
        prev, cur = cur, prev
    return prev[w - 1]


@njit(cache=True)
def dp_path(sc, tc, wts, x0, y0, x1, y1):
    """A shortest (x0,y0)->(x1,y1) path as an (L, 2) array of vertices.

    Traceback prefers the diagonal, then the down, then the right
    predecessor, the same order used by the shortest-path trees.
    """
    d = dp_box(sc, tc, wts, x0, y0, x1, y1)
    a = x1 - x0
    b = y1 - y0
    out = np.empty((a + b + 1, 2), dtype=np.int64)
    k = 0
    out[k, 0] = x1
    out[k, 1] = y1
    k += 1
    while a > 0 or b > 0:
        cur = d[a, b]
        moved = False
        if a > 0 and b > 0:
            wd = wts[2] if sc[x0 + a - 1] == tc[y0 + b - 1] else wts[3]
            if wd >= 0 and d[a - 1, b - 1] + wd == cur:
                a -= 1
                b -= 1
                moved = True
        if not moved and a > 0 and d[a - 1, b] + wts[1] == cur:
            a -= 1
            moved = True
        if not moved:
            b -= 1
        out[k, 0] = x0 + a
        out[k, 1] = y0 + b
        k += 1
    res = np.empty((k, 2), dtype=np.int64)
    for i in range(k):
        res[i, 0] = out[k - 1 - i, 0]
        res[i, 1] = out[k - 1 - i, 1]
    return res


def dp_distance(g: AlignmentGraph, u, v):
    """Exact u->v distance by DP over the spanned rectangle, or UNREACHABLE."""
    g.check_vertex(u)
    g.check_vertex(v)
    d = dp_dist(g.sc, g.tc, g.wts, u[0], u[1], v[0], v[1])
    return UNREACHABLE if d < 0 else int(d)


def dp_table(g: AlignmentGraph, u) -> np.ndarray:
    """Distances from u to every grid vertex; -1 marks unreachable vertices."""
    g.check_vertex(u)
    out = np.full((g.rows, g.cols), -1, dtype=np.int64)
    out[u[0]:, u[1]:] = dp_box(g.sc, g.tc, g.wts, u[0], u[1], g.mp, g.np_)
    return out


def dp_shortest_path(g: AlignmentGraph, u, v):
    """A shortest u->v path as a list of Vertex, or None if unreachable."""
    if v[0] < u[0] or v[1] < u[1]:
        return None
    return [Vertex(int(a), int(b)) for a, b in dp_path(g.sc, g.tc, g.wts, u[0], u[1], v[0], v[1])]


def path_weight(g: AlignmentGraph, path) -> int:
    total = 0
    for p, q in zip(path, path[1:]):
        w = g.edge_weight(p, q)
        if w is None:
            raise ValueError(f"no edge {tuple(p)} -> {tuple(q)}")
        total += w
    return total


def score_from_distance(cost: CostModel, i, j, a, b, d):
    """Convert a (i,a)->(j,b) distance into the alignment score."""
    if d is None:
        raise ValueError("cannot score an unreachable pair")
    span = (j - i) + (b - a)
    if cost.kind == "lcs":
        score = span - d
    elif cost.kind == "levenshtein":
        score = d
    else:
        # doubled units: span * w_match - W equals twice the original score
        twice = span * cost.w_match - d
        if twice % 2:
            raise AssertionError("weighted score is not integral")
        # weighted scores may be negative when gaps are penalised
        return twice // 2
    if score < 0:
        raise AssertionError(f"negative score {score} from distance {d}")
    return score
