"""Naive packed multiply vs spanning-tree multiply on planted square instances.

    python scripts/speedup_sweep.py --sizes 512 1024 2048 --clusters 32 --radius 16
"""
import argparse
import time

import numpy as np

from clusmat import exact_clustered, naive_multiply
from clusmat.planted import PlantedSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[512, 1024, 2048])
    ap.add_argument("--clusters", type=int, default=32)
    ap.add_argument("--radius", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("n,naive_s,st_s,speedup,ham_cost,radius,delta_updates")
    for n in args.sizes:
        a = generate(PlantedSpec(n, n, args.clusters, args.radius, seed=args.seed)).matrix
        b = generate(PlantedSpec(n, n, args.clusters, args.radius, seed=args.seed + 1, by="cols")).matrix
        t0 = time.perf_counter()
        c = naive_multiply(a, b)
        t_naive = time.perf_counter() - t0
        t0 = time.perf_counter()
        res = exact_clustered(a, b, args.clusters, args.clusters)
        t_st = time.perf_counter() - t0
        assert np.array_equal(c, res.C)
        radius = res.row_clustering.radius if res.side == "rows" else res.col_clustering.radius
        print(f"{n},{t_naive:.4f},{t_st:.4f},{t_naive / t_st:.2f},{res.ham_cost},{radius},{res.delta_updates}")


if __name__ == "__main__":
    main()
