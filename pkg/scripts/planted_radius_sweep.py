"""Achieved k-center radius vs planted radius, deterministic and randomized.

    python scripts/planted_radius_sweep.py --trials 20
"""
import argparse

from clusmat import gonzalez, randomized_kcenter
from clusmat.planted import PlantedSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=256)
    ap.add_argument("--cols", type=int, default=256)
    ap.add_argument("--clusters", type=int, nargs="+", default=[4, 16, 64])
    ap.add_argument("--radii", type=int, nargs="+", default=[0, 4, 16])
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()

    print("clusters,s,gonzalez_max,gonzalez_le_2s,randomized_max,randomized_le_bound")
    bound = 2 + args.epsilon
    for k in args.clusters:
        for s in args.radii:
            g, r = [], []
            for seed in range(args.trials):
                m = generate(PlantedSpec(args.rows, args.cols, k, s, seed=seed)).matrix
                g.append(gonzalez(m, k).radius)
                r.append(randomized_kcenter(m, k, args.epsilon, seed=seed).radius)
            print(f"{k},{s},{max(g)},{sum(x <= 2 * s for x in g) / len(g):.2f},"
                  f"{max(r)},{sum(x <= bound * s for x in r) / len(r):.2f}")


if __name__ == "__main__":
    main()
