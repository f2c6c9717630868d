"""How often does an exploration put more than m = 5 ell / (2n) vertices
on one row or column before step ell?

Report-only: prints the violation frequency and the occupancy quantiles.
"""
import argparse
import sys

import numpy as np

from hamperc.model import derive_params
from hamperc.percolation import sample_open_graph
from hamperc.percolation.explore import line_occupancy, occupancy_cap
from hamperc.percolation.graph import Vertex
from hamperc.rng import derive_stream


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--ell", type=int, help="default eps n^2 / 5")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    params = derive_params(args.n, args.epsilon)
    ell = args.ell if args.ell is not None else int(args.epsilon * args.n**2 / 5)
    m = occupancy_cap(params, ell)
    occ = np.empty(args.trials, dtype=np.int64)
    for k in range(args.trials):
        graph = sample_open_graph(params, derive_stream(args.seed, k))
        occ[k] = line_occupancy(graph, Vertex(1, 1), ell).max_occupancy
    bad = int(np.sum(occ > m))
    print(f"# n={args.n} eps={args.epsilon} ell={ell} m={m:g} trials={args.trials} seed={args.seed}")
    print("violations,fraction,occ_median,occ_p99,occ_max")
    print(f"{bad},{bad / args.trials!r},{np.median(occ):g},{np.quantile(occ, 0.99):g},{occ.max()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
