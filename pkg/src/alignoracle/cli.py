"""Command-line interface: build, query, verify, bench and stats.

Input strings file: exactly two lines, S then T.  Queries are read from
standard input as "i j a b" (half-open substring bounds), one per line.
Stats are JSON lines on standard output; wall-clock timings go to standard
error so that standard output is reproducible byte for byte.
"""

import argparse
import json
import sys
import time

import numpy as np

from .core import AlignmentGraph, CostModel, dp_box, dp_path, score_from_distance
from .oracle import OracleConfig, cigar, path_to_script, preprocess, script_weight
from .sublinear import WarmupOracle, build_ddg, compress_ddg, ddg_entry, verify_monge

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------- config

def cost_from_args(args):
    if args.model == "lcs":
        return CostModel.lcs()
    if args.model == "edit":
        return CostModel.levenshtein()
    if not args.weights:
        raise InputError("--model weighted needs --weights a,b,c")
    try:
        a, b, c = (int(x) for x in args.weights.split(","))
    except ValueError:
        raise InputError(f"bad --weights {args.weights!r}, expected three integers a,b,c")
    try:
        return CostModel.weighted(a, b, c)
    except ValueError as e:
        raise InputError(str(e))


def config_dict(args):
    return {"model": args.model, "weights": args.weights, "ratio": args.ratio,
            "leaf": args.leaf, "backend": args.backend, "r": args.r, "seed": args.seed}


def read_strings(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    lines = [ln[:-1] if ln.endswith(b"\r") else ln for ln in lines]
    if len(lines) != 2:
        raise InputError(f"{path}: expected exactly two lines (S and T), got {len(lines)}")
    if not lines[0] or not lines[1]:
        raise InputError(f"{path}: strings must be nonempty")
    return lines[0], lines[1]


# ---------------------------------------------------------------- engines

def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items() if "seconds" not in str(k)}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


class Engine:
    """One built index behind a uniform scoring interface."""

    def __init__(self, S, T, cost, backend="oracle", ratio=16, leaf=16, r=None):
        self.backend = backend
        t0 = time.perf_counter()
        if backend == "oracle":
            self.index = preprocess(S, T, cost, OracleConfig(ratio, leaf))
            self.g = self.index.g
        elif backend in ("warmup", "compressed"):
            self.g = AlignmentGraph(S, T, cost)
            self.index = WarmupOracle(self.g, r, backend)
        else:
            raise InputError(f"unknown backend {backend!r}")
        self.build_seconds = time.perf_counter() - t0

    def check(self, i, j, a, b):
        g = self.g
        if not (0 <= i <= j <= g.m and 0 <= a <= b <= g.n):
            raise ValueError(f"indices out of range for m={g.m}, n={g.n}")

    def distances(self, qs):
        """Distances (i,a)->(j,b) for rows (i, j, a, b)."""
        qs = np.asarray(qs, dtype=np.int64).reshape(-1, 4)
        return self.index.batch_dist(qs[:, [0, 2, 1, 3]])

    def scores(self, qs):
        d = self.distances(qs)
        return [score_from_distance(self.g.cost, *map(int, q), int(x)) for q, x in zip(qs, d)]

    def path(self, i, j, a, b):
        if self.backend == "oracle":
            return self.index.alignment_vertices((i, a), (j, b))
        g = self.g
        return [tuple(map(int, p)) for p in dp_path(g.sc, g.tc, g.wts, i, a, j, b)]

    def script(self, i, j, a, b):
        return path_to_script(self.g, self.path(i, j, a, b))

    def stats(self):
        g = self.g
        base = {"m": g.m, "n": g.n, "N": g.num_vertices}
        if self.backend == "oracle":
            info = dict(self.index.info)
            info.pop("vd_src", None)
            info.pop("vd_level", None)
            base.update(info)
        else:
            base.update(self.index.stats())
        return _plain(base)


def engine_from_args(args, S, T):
    cost = cost_from_args(args)
    if args.ratio < 2 or args.leaf < 1:
        raise InputError("--ratio must be >= 2 and --leaf >= 1")
    if args.r is not None and args.r < 1:
        raise InputError("--r must be positive")
    return Engine(S, T, cost, args.backend, args.ratio, args.leaf, args.r)


def emit(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------- commands

def cmd_build(args):
    S, T = read_strings(args.strings)
    eng = engine_from_args(args, S, T)
    st = eng.stats()
    emit({"config": config_dict(args)})
    summary = {"m": st["m"], "n": st["n"], "N": st["N"], "backend": eng.backend}
    if eng.backend == "oracle":
        summary.update(t=st["t"], level_pieces=st["level_pieces"], diagrams=st["diagrams"],
                       records=st["records"], tree_entries=st["tree_entries"],
                       stored_entries=st["records"] + st["tree_entries"])
    else:
        summary.update(r=st["r"], r_depth=st["r_depth"], pieces=st["pieces"],
                       stored_entries=st["stored_numbers"],
                       stored_rdivision=st["stored_numbers_rdivision"])
    emit(summary)
    emit({"build_seconds": round(eng.build_seconds, 3)}, sys.stderr)
    return EXIT_OK


def cmd_stats(args):
    S, T = read_strings(args.strings)
    eng = engine_from_args(args, S, T)
    emit({"config": config_dict(args)})
    st = eng.stats()
    levels = st.pop("levels", None)
    emit(st)
    for lv in levels or []:
        emit({"level": lv})
    emit({"build_seconds": round(eng.build_seconds, 3)}, sys.stderr)
    return EXIT_OK


def cmd_query(args):
    S, T = read_strings(args.strings)
    eng = engine_from_args(args, S, T)
    out = sys.stdout
    out.write("# config " + json.dumps(config_dict(args), sort_keys=True) + "\n")
    bad = 0
    for raw in sys.stdin:
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        try:
            parts = line.split()
            if len(parts) != 4:
                raise ValueError("expected four integers i j a b")
            i, j, a, b = (int(p) for p in parts)
            eng.check(i, j, a, b)
            score = eng.scores([(i, j, a, b)])[0]
            row = [str(i), str(j), str(a), str(b), str(score)]
            if args.script:
                script, _ = eng.script(i, j, a, b)
                row.append(cigar(script) or "*")
            out.write("\t".join(row) + "\n")
        except ValueError as e:
            bad += 1
            out.write(f"error\t{line}\t{e}\n")
    return EXIT_USAGE if bad else EXIT_OK


def _random_strings(rng, m, n, alphabet=b"ACGT"):
    a = np.frombuffer(alphabet, dtype=np.uint8)
    return bytes(rng.choice(a, m)), bytes(rng.choice(a, n))


def all_queries(m, n):
    """Every (i <= j, a <= b) substring query as rows (i, j, a, b)."""
    ii, jj = np.triu_indices(m + 1)
    aa, bb = np.triu_indices(n + 1)
    r = np.repeat(np.arange(len(ii)), len(aa))
    c = np.tile(np.arange(len(aa)), len(ii))
    return np.stack([ii[r], jj[r], aa[c], bb[c]], axis=1).astype(np.int64)


def dp_distances(g, qs):
    """Reference distances by one rectangle DP per distinct start vertex."""
    out = np.empty(len(qs), dtype=np.int64)
    starts = {}
    for idx, (i, j, a, b) in enumerate(qs):
        starts.setdefault((int(i), int(a)), []).append(idx)
    for (i, a), rows in starts.items():
        tab = dp_box(g.sc, g.tc, g.wts, i, a, g.m, g.n)
        rows = np.array(rows)
        out[rows] = tab[qs[rows, 1] - i, qs[rows, 3] - a]
    return out


def is_subsequence(x, y):
    it = iter(y)
    return all(ch in it for ch in x)


def verify_suite(S, T, cost, backend, ratio, leaf, r, seed, scripts=True):
    """Exhaustive check of one instance; returns None or a counterexample dict."""
    eng = Engine(S, T, cost, backend, ratio, leaf, r)
    g = eng.g
    qs = all_queries(g.m, g.n)
    got = eng.distances(qs)
    exp = dp_distances(g, qs)
    base = {"seed": seed, "S": S.decode("latin-1"), "T": T.decode("latin-1"), "backend": backend}
    bad = np.nonzero(got != exp)[0]
    if len(bad):
        q = qs[bad[0]]
        return dict(base, suite="equivalence", query=q.tolist(),
                    expected=int(exp[bad[0]]), got=int(got[bad[0]]))
    if scripts:
        step = max(1, len(qs) // 2000)
        for q in qs[::step]:
            i, j, a, b = map(int, q)
            script, matched = eng.script(i, j, a, b)
            d = int(dp_distances(g, q.reshape(1, 4))[0])
            w = script_weight(g, script, i, a)
            ok = w == d and is_subsequence(matched, S[i:j]) and is_subsequence(matched, T[a:b])
            if ok and cost.kind == "lcs":
                ok = len(matched) == score_from_distance(cost, i, j, a, b, d)
            if not ok:
                return dict(base, suite="scripts", query=[i, j, a, b], expected=d, got=w,
                            script=cigar(script))
    if backend != "oracle":
        A = eng.index.A
        for pid in range(eng.index.num_pieces):
            P = A.piece(pid)
            dd = build_ddg(g, P)
            viol = verify_monge(dd)
            if viol:
                return dict(base, suite="monge", piece=list(P.rect), violation=viol[0])
            c = compress_ddg(dd)
            for i in range(1, dd.k + 1):
                for j in range(1, dd.k + 1):
                    if ddg_entry(c, i, j) != dd.M[i - 1, j - 1]:
                        return dict(base, suite="monge", piece=list(P.rect), entry=[i, j],
                                    expected=int(dd.M[i - 1, j - 1]), got=ddg_entry(c, i, j))
    return None


def fig1_check(cost_kind, backend, ratio, leaf, r):
    eng = Engine(b"abac", b"abcab", CostModel.lcs(), backend, ratio, leaf, r)
    d = int(eng.distances([(0, 4, 0, 5)])[0])
    s = eng.scores([(0, 4, 0, 5)])[0]
    if (d, s) != (6, 3):
        return {"suite": "example", "S": "abac", "T": "abcab", "backend": backend,
                "query": [0, 4, 0, 5], "expected": [6, 3], "got": [d, s]}
    return None


def cmd_verify(args):
    cost = cost_from_args(args)
    base = args.seed if args.seed is not None else 0
    fail = fig1_check(cost.kind, args.backend, args.ratio, args.leaf, args.r)
    checked = 0
    if fail is None:
        for t in range(args.trials):
            seed = base + t
            rng = np.random.default_rng(seed)
            S, T = _random_strings(rng, args.size, args.size)
            fail = verify_suite(S, T, cost, args.backend, args.ratio, args.leaf, args.r, seed)
            checked += 1
            if fail:
                break
    if fail:
        emit({"result": "fail", "counterexample": fail})
        return EXIT_FAIL
    emit({"result": "pass", "instances": checked, "size": args.size, "config": config_dict(args)})
    return EXIT_OK


def cmd_bench(args):
    cost = cost_from_args(args)
    seed = args.seed if args.seed is not None else 0
    rng = np.random.default_rng(seed)
    S, T = _random_strings(rng, args.m, args.n)
    eng = Engine(S, T, cost, args.backend, args.ratio, args.leaf, args.r)
    i = rng.integers(0, args.m + 1, size=(args.queries, 2))
    a = rng.integers(0, args.n + 1, size=(args.queries, 2))
    i.sort(axis=1)
    a.sort(axis=1)
    qs = np.stack([i[:, 0], i[:, 1], a[:, 0], a[:, 1]], axis=1)
    eng.distances(qs[:1])
    t0 = time.perf_counter()
    got = eng.distances(qs)
    tq = time.perf_counter() - t0
    nchk = min(len(qs), args.check)
    t0 = time.perf_counter()
    exp = dp_distances(eng.g, qs[:nchk])
    tdp = time.perf_counter() - t0
    mism = int((got[:nchk] != exp).sum())
    emit({"config": config_dict(args), "m": args.m, "n": args.n, "queries": args.queries,
          "build_seconds": round(eng.build_seconds, 3),
          "query_us": round(1e6 * tq / max(len(qs), 1), 3),
          "dp_us": round(1e6 * tdp / max(nchk, 1), 3),
          "checked": nchk, "mismatches": mism})
    return EXIT_FAIL if mism else EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=["lcs", "edit", "weighted"], default="lcs")
    common.add_argument("--weights", help="match,mismatch,gap weights for --model weighted")
    common.add_argument("--ratio", type=int, default=16, help="division ratio p")
    common.add_argument("--leaf", type=int, default=16, help="level-1 piece size target")
    common.add_argument("--backend", choices=["oracle", "warmup", "compressed"], default="oracle")
    common.add_argument("--r", type=int, default=None, help="r-division size (default sqrt N)")
    common.add_argument("--seed", type=int, default=None)

    p = argparse.ArgumentParser(prog="alignoracle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("build", parents=[common], help="build an index and print its stats")
    b.add_argument("strings")
    b.set_defaults(func=cmd_build)
    s = sub.add_parser("stats", parents=[common], help="detailed per-level stats")
    s.add_argument("strings")
    s.set_defaults(func=cmd_stats)
    q = sub.add_parser("query", parents=[common], help="answer 'i j a b' lines from stdin")
    q.add_argument("strings")
    q.add_argument("--script", action="store_true", help="append a CIGAR-like edit script")
    q.set_defaults(func=cmd_query)
    v = sub.add_parser("verify", parents=[common], help="exhaustive check against DP")
    v.add_argument("--size", type=int, default=16)
    v.add_argument("--trials", type=int, default=3)
    v.set_defaults(func=cmd_verify)
    e = sub.add_parser("bench", parents=[common], help="build and query timing")
    e.add_argument("--m", type=int, default=128)
    e.add_argument("--n", type=int, default=256)
    e.add_argument("--queries", type=int, default=20000)
    e.add_argument("--check", type=int, default=1000, help="queries checked against DP")
    e.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as e:
        print(f"alignoracle: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
