"""Command-line front end: ``clusmat <subcommand> ...``.

Data (matrices, CSV products, query answers, reports) goes to stdout or the
``-o`` file; stats and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .approx import mmclus_approx, mmclus_r_approx
from .bench import BenchConfig, ConfigError, run_bench, write_report
from .bitmatrix import DimensionError, ParameterError, naive_multiply
from .exact import ContractError, STStats, exact_clustered, mmclus_st, parse_edges, tree_from_edges
from .formats import FormatError, load_matrix, save_matrix, write_csv
from .planted import PlantedSpec, generate
from .query import (StateMismatchError, answer_all, mmclus_preproc, mmclus_r_preproc,
                    query_with_work, read_state, save_state, total_query_work)

EXIT_ERROR = 1
EXIT_SHAPE = 2
EXIT_PARSE = 3
EXIT_PARAM = 4


def resolve_threads(flag: int | None) -> int:
    env = os.environ.get("CLUSMAT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"CLUSMAT_THREADS must be an integer, got {env!r}") from None
    if flag is not None:
        return max(1, flag)
    return os.cpu_count() or 1


def _first_center(value: str, seed: int | None, n: int) -> int:
    if value == "random":
        return int(np.random.default_rng(seed).integers(0, n))
    try:
        return int(value)
    except ValueError:
        raise ParameterError(f"--first-center must be an index or 'random', got {value!r}") from None


def _emit_csv(c: np.ndarray, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            write_csv(c, fh)
    else:
        write_csv(c, sys.stdout)


def _stats(**fields) -> None:
    print(" ".join(f"{k}={v}" for k, v in fields.items()), file=sys.stderr)


def _require(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise ParameterError(f"{args.command} needs {', '.join(missing)}")


def cmd_gen(args) -> None:
    spec = PlantedSpec(args.rows, args.cols, args.clusters, args.radius, args.density,
                       args.seed, args.by)
    inst = generate(spec)
    save_matrix(inst.matrix, args.out)
    Path(str(args.out) + ".meta").write_text(spec.to_meta() + "\n")


def cmd_convert(args) -> None:
    save_matrix(load_matrix(args.src), args.dst)


def cmd_multiply(args) -> None:
    a, b = load_matrix(args.a), load_matrix(args.b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    threads = resolve_threads(args.threads)
    t0 = time.perf_counter()
    if args.algo == "naive":
        c = naive_multiply(a, b, threads)
        info = {}
    elif args.algo == "st" and args.tree:
        edges, root = parse_edges(Path(args.tree).read_text().splitlines())
        tree = tree_from_edges(a, edges, root)
        st = STStats()
        c = mmclus_st(a, b, tree, threads=threads, stats=st)
        info = dict(ham_cost_a=tree.ham_cost, delta_updates=st.delta_updates_per_column * b.cols)
    elif args.algo == "st":
        _require(args, "ell", "k")
        first = _first_center(args.first_center, args.seed, min(a.rows, b.cols))
        res = exact_clustered(a, b, args.ell, args.k, side=args.side, first=first, threads=threads)
        c = res.C
        info = dict(side=res.side, radius_a=res.row_clustering.radius,
                    radius_b=res.col_clustering.radius, ham_cost_a=res.ham_cost_rows,
                    ham_cost_b=res.ham_cost_cols, delta_updates=res.delta_updates)
    else:
        state = _preprocess(args, a, b, threads)
        c = answer_all(state)
        info = dict(side="both" if state.two_sided else ("cols" if state.transposed else "rows"),
                    radius_a=state.radius_left, radius_b=state.radius_right,
                    delta_updates=total_query_work(state))
    elapsed = time.perf_counter() - t0
    _emit_csv(c, args.out)
    _stats(algo=args.algo, time=f"{elapsed:.6f}", **info)


def _preprocess(args, a, b, threads):
    if args.randomized:
        _require(args, "ell", "k")
        return mmclus_r_preproc(a, b, args.ell, args.k, args.epsilon, args.seed, threads=threads)
    side = args.side or ("rows" if a.rows >= b.cols else "cols")
    count = args.ell if side == "rows" else args.k
    if count is None:
        raise ParameterError(f"clustering the {side} needs --{'ell' if side == 'rows' else 'k'}")
    n = a.rows if side == "rows" else b.cols
    first = _first_center(args.first_center, args.seed, n)
    return mmclus_preproc(a, b, count, side=side, first=first, threads=threads)


def cmd_approx(args) -> None:
    a, b = load_matrix(args.a), load_matrix(args.b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    threads = resolve_threads(args.threads)
    if args.randomized:
        _require(args, "ell", "k")
        res = mmclus_r_approx(a, b, args.ell, args.k, args.epsilon, args.seed, threads=threads)
    else:
        side = args.side or ("rows" if a.rows >= b.cols else "cols")
        count = args.ell if side == "rows" else args.k
        if count is None:
            raise ParameterError(f"clustering the {side} needs --{'ell' if side == 'rows' else 'k'}")
        n = a.rows if side == "rows" else b.cols
        first = _first_center(args.first_center, args.seed, n)
        res = mmclus_approx(a, b, count, side=side, first=first, threads=threads)
    _emit_csv(res.D, args.out)
    print(f"certificate={res.certificate}", file=sys.stderr)
    if args.verify:
        exact = naive_multiply(a, b, threads)
        err = int(np.abs(exact.astype(np.int64) - res.D).max())
        print(f"observed_max_err={err}", file=sys.stderr)


def cmd_preproc(args) -> None:
    a, b = load_matrix(args.a), load_matrix(args.b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    state = _preprocess(args, a, b, resolve_threads(args.threads))
    save_state(state, args.out)
    _stats(radius_a=state.radius_left, radius_b=state.radius_right,
           transposed=int(state.transposed), two_sided=int(state.two_sided))


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
        raise FormatError(f"query pair must look like 'i,j', got {text!r}")
    return int(parts[0]), int(parts[1])


def cmd_query(args) -> None:
    a, b = load_matrix(args.a), load_matrix(args.b)
    state = read_state(args.state, a, b)
    pairs = [_parse_pair(p) for p in args.pair or []]
    if args.pairs_file:
        lines = Path(args.pairs_file).read_text().splitlines()
        pairs += [_parse_pair(line) for line in lines if line.strip()]
    work = 0
    for i, j in pairs:
        value, w = query_with_work(state, i, j)
        work += w
        print(f"{i},{j},{value}")
    _stats(queries=len(pairs), update_iterations=work)


def cmd_bench(args) -> None:
    cfg = BenchConfig.load(args.config)
    if args.threads is not None or os.environ.get("CLUSMAT_THREADS"):
        cfg.threads = resolve_threads(args.threads)
    rows = run_bench(cfg)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_report(rows, fh)
    else:
        write_report(rows, sys.stdout)


def _add_clustering_flags(p: argparse.ArgumentParser, randomized: bool = True) -> None:
    p.add_argument("--ell", type=int, help="number of row centers of A")
    p.add_argument("--k", type=int, help="number of column centers of B")
    p.add_argument("--side", choices=("rows", "cols"),
                   help="force clustering rows of A or columns of B (default: larger side)")
    p.add_argument("--first-center", default="0",
                   help="index of the first farthest-point center, or 'random' (uses --seed)")
    p.add_argument("--seed", type=int, default=None)
    if randomized:
        p.add_argument("--randomized", action="store_true",
                       help="cluster both sides with the randomized projection method")
        p.add_argument("--epsilon", type=float, default=0.25)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clusmat",
                                     description="Clustering-based 0-1 matrix multiplication")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: number of cores; CLUSMAT_THREADS overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a planted clustered matrix")
    p.add_argument("out")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--radius", type=int, required=True, help="max flipped bits per vector")
    p.add_argument("--density", type=float, default=0.5, help="bit density of the centers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--by", choices=("rows", "cols"), default="rows",
                   help="cluster the rows (default) or the columns")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert", help="convert between .bm and .bmb")
    p.add_argument("src")
    p.add_argument("dst")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("multiply", help="exact product")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--algo", choices=("naive", "st", "query"), default="naive")
    _add_clustering_flags(p)
    p.add_argument("--tree", help=argparse.SUPPRESS)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_multiply)

    p = sub.add_parser("approx", help="approximate product with an additive error certificate")
    p.add_argument("a")
    p.add_argument("b")
    _add_clustering_flags(p)
    p.add_argument("--verify", action="store_true", help="also report the observed max error")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("preproc", help="preprocess A and B for exact entry queries")
    p.add_argument("a")
    p.add_argument("b")
    _add_clustering_flags(p)
    p.add_argument("-o", "--out", required=True, help="state file (.pps)")
    p.set_defaults(func=cmd_preproc)

    p = sub.add_parser("query", help="answer exact entry queries from a .pps state")
    p.add_argument("state")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--pair", action="append", help="query 'i,j' (repeatable)")
    p.add_argument("--pairs-file", help="file with one 'i,j' per line")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="run a benchmark sweep from a TOML config")
    p.add_argument("config")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ParameterError, ContractError, StateMismatchError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
