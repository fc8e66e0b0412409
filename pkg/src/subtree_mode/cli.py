"""``sm``: subtree mode tables, document queries, benchmarks and the matrix gadget.

Exit codes: 0 ok, 1 usage, 2 input error, 3 resource guard.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import multiprocessing as mp
import resource
import sys
import time
from pathlib import Path

import numpy as np

from . import baselines, modes
from .dag import DagFormatError, bmm_via_dm, build_bmm_dag, format_matrix, parse_matrix_pair
from .retrieval import build_retrieval_index, cqs, dr1, dr_topk, upm_mine
from .suffix import DocumentFormatError, build_gst, read_documents
from .tree import LeafColoredTree, TreeFormatError, random_tree, read_tree

EXIT_USAGE, EXIT_INPUT, EXIT_GUARD = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _mode_table(t: LeafColoredTree, algo: str, max_cells: int | None) -> modes.ModeTable:
    if algo == "scm":
        return modes.scm_all_modes(t)
    if algo == "ba1":
        return baselines.ba1_all_modes(t, max_cells)
    if algo == "ba2":
        return baselines.ba2_all_modes(t, max_cells)
    if algo == "ba3":
        return baselines.ba3_all_modes(t)
    if algo == "brute":
        return baselines.brute_all_modes(t).modes()
    raise UsageError(f"unknown algorithm {algo!r}")


MODE_ALGOS = ("scm", "ba1", "ba2", "ba3", "brute")


def _format_top_k(table: modes.TopKTable) -> str:
    out = []
    for v in range(len(table)):
        out.append(" ".join([str(v)] + [f"{c} {f}" for c, f in table[v]]))
    return "\n".join(out) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_tree(args) -> int:
    t = read_tree(args.tree)
    if args.command == "mode":
        text = modes.format_answer_table(_mode_table(t, args.algo, args.max_cells))
    elif args.command == "antimode":
        if args.algo == "scm":
            text = modes.format_answer_table(modes.scm_all_modes(t), modes.scm_anti_modes(t))
        elif args.algo == "brute":
            h = baselines.brute_all_modes(t)
            text = modes.format_answer_table(h.modes(), h.anti_modes())
        else:
            raise UsageError("antimode supports --algo scm or brute")
    else:
        if args.k is None:
            raise UsageError("ksm needs --k")
        if args.algo == "scm":
            table = modes.scm_top_k(t, args.k)
        elif args.algo == "brute":
            table = _brute_top_k(t, args.k)
        else:
            raise UsageError("ksm supports --algo scm or brute")
        text = _format_top_k(table)
    _emit(text, args.out)
    return 0


def _brute_top_k(t: LeafColoredTree, k: int) -> modes.TopKTable:
    if k < 1:
        raise ValueError("k must be at least 1")
    counts = baselines.brute_all_modes(t).counts
    k = min(k, t.n_colors)
    order = np.lexsort((np.broadcast_to(np.arange(t.n_colors), counts.shape), -counts), axis=1)[:, :k]
    freq = np.take_along_axis(counts, order, axis=1)
    return modes.TopKTable(np.where(freq > 0, order, -1), freq, (freq > 0).sum(axis=1))


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"docs {args.sub} needs --{missing[0]}")


def cmd_docs(args) -> int:
    docs = read_documents(args.docs)
    if args.sub == "index":
        gst = build_gst(docs)
        print(f"documents\t{len(docs)}")
        print(f"letters\t{sum(d.size for d in docs.docs)}")
        print(f"alphabet\t{docs.sigma}")
        print(f"nodes\t{gst.n_nodes}")
        print(f"leaves\t{gst.tree.n_leaves}")
        return 0
    idx = build_retrieval_index(docs)
    if args.sub == "dr1":
        _need(args, "pattern")
        r = dr1(idx, args.pattern)
        print(-1 if r is None else f"{r[0]}\t{r[1]}")
    elif args.sub == "kdr":
        _need(args, "pattern", "k")
        for doc, f in dr_topk(idx, args.pattern, args.k):
            print(f"{doc}\t{f}")
    elif args.sub == "upm":
        _need(args, "epsilon")
        shown = 0
        for up in upm_mine(idx, args.epsilon):
            rows = [str(up.node)] if args.compact else [docs.decode(c) for c in up.expand(idx.gst)]
            for r in rows:
                if args.limit is not None and shown >= args.limit:
                    return 0
                extra = f"\t{up.lo}\t{up.hi}" if args.compact else ""
                print(f"{r}{extra}\t{up.f_max}\t{up.f_min}")
                shown += 1
    elif args.sub == "cqs":
        _need(args, "pattern", "q", "epsilon")
        print(cqs(idx, args.pattern, args.q, args.epsilon))
    return 0


def _checksum(freq: np.ndarray) -> str:
    return hashlib.blake2b(np.ascontiguousarray(freq, dtype=np.int64).tobytes(), digest_size=8).hexdigest()


def _bench_one(conn, algo, n, delta, seed, max_arity, docs_path, max_cells):
    try:
        t = read_tree_or_docs(n, delta, seed, max_arity, docs_path)
        _mode_table(random_tree(8, 2, seed=0), algo, None)     # load compiled kernels
        t0 = time.perf_counter()
        table = _mode_table(t, algo, max_cells)
        ms = (time.perf_counter() - t0) * 1e3
        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
        conn.send(("ok", t.n_nodes, t.n_colors, ms, peak, _checksum(table.freq)))
    except baselines.ResourceGuardError:
        conn.send(("refused", n, delta, float("nan"), 0, ""))
    except Exception as e:  # reported as a row, not a crash
        conn.send((f"error: {e}", n, delta, float("nan"), 0, ""))


def read_tree_or_docs(n, delta, seed, max_arity, docs_path) -> LeafColoredTree:
    if docs_path:
        return build_gst(read_documents(docs_path)).tree
    return random_tree(n, delta, seed=seed, max_arity=max_arity)


def run_bench(algos, sizes, delta, seed, timeout=None, max_arity=None, docs_path=None, max_cells=None):
    """One record per (algo, size), each measured in a fresh process."""
    ctx = mp.get_context("fork")
    rows = []
    for n in sizes:
        for algo in algos:
            if algo not in MODE_ALGOS:
                raise UsageError(f"unknown algorithm {algo!r}")
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_bench_one,
                               args=(send, algo, n, delta, seed, max_arity, docs_path, max_cells))
            proc.start()
            if recv.poll(timeout):
                status, nn, dd, ms, peak, chk = recv.recv()
            else:
                proc.kill()
                status, nn, dd, ms, peak, chk = "timeout", n, delta, float("nan"), 0, ""
            proc.join()
            rows.append({"algo": algo, "n": nn, "delta": dd, "build_ms": round(ms, 3),
                         "peak_bytes": peak, "checksum": chk, "status": status})
    return rows


BENCH_FIELDS = ["algo", "n", "delta", "build_ms", "peak_bytes", "checksum", "status"]


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    sizes = [int(float(s)) for s in args.sizes.split(",")] if args.sizes else [0]
    rows = run_bench(algos, sizes, args.delta, args.seed, args.timeout, args.max_arity,
                     args.docs, args.max_cells)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_bmm(args) -> int:
    a, b = parse_matrix_pair(Path(args.matrix).read_text(encoding="utf-8"))
    if args.dump_dag:
        Path(args.dump_dag).write_text(build_bmm_dag(a, b).dag.to_text(), encoding="utf-8")
    sys.stdout.write(format_matrix(bmm_via_dm(a, b)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("mode", "antimode", "ksm"):
        s = sub.add_parser(name)
        s.add_argument("tree")
        s.add_argument("--algo", default="scm", choices=MODE_ALGOS)
        s.add_argument("--k", type=int)
        s.add_argument("--out")
        s.add_argument("--max-cells", type=int, default=None)
        s.set_defaults(func=cmd_tree)
    d = sub.add_parser("docs")
    d.add_argument("sub", choices=("index", "dr1", "kdr", "upm", "cqs"))
    d.add_argument("docs")
    d.add_argument("-p", "--pattern")
    d.add_argument("--k", type=int)
    d.add_argument("--epsilon", type=int)
    d.add_argument("--q", type=int)
    d.add_argument("--limit", type=int)
    d.add_argument("--compact", action="store_true")
    d.set_defaults(func=cmd_docs)
    b = sub.add_parser("bench")
    b.add_argument("--algos", default="scm,ba3")
    b.add_argument("--sizes", default="250000,500000,1000000")
    b.add_argument("--delta", type=int, default=1000)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--max-arity", type=int)
    b.add_argument("--timeout", type=float, default=600.0, help="seconds per run")
    b.add_argument("--docs", help="benchmark on the suffix tree of this collection instead")
    b.add_argument("--max-cells", type=int, default=None)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    m = sub.add_parser("bmm")
    m.add_argument("matrix")
    m.add_argument("--dump-dag")
    m.set_defaults(func=cmd_bmm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"sm: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except baselines.ResourceGuardError as e:
        print(f"sm: refused: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (TreeFormatError, DocumentFormatError, DagFormatError, OSError, ValueError) as e:
        print(f"sm: input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
