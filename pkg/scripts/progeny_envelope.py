"""Large-but-finite progeny frequencies for every band policy against the
envelope C eps exp(-alpha / 256)."""
import argparse
import sys

from hamperc.branching import estimate_large_finite_progeny, make_policy
from hamperc.branching.laws import POLICIES
from hamperc.model import derive_params
from hamperc.rng import derive_stream


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--alpha", type=lambda s: [float(x) for x in s.split(",")], default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--envelope-c", type=float, default=3.0)
    args = ap.parse_args(argv)

    params = derive_params(args.n, args.epsilon)
    print(f"# n={args.n} eps={args.epsilon} trials={args.trials} seed={args.seed}")
    print("policy,alpha,threshold,hits,estimate,stderr,envelope")
    for k, name in enumerate(sorted(POLICIES)):
        est = estimate_large_finite_progeny(
            make_policy(name), params, args.alpha, args.trials, derive_stream(args.seed, k), envelope_c=args.envelope_c
        )
        for e in est:
            print(f"{name},{e.alpha!r},{e.threshold!r},{e.hits},{e.estimate!r},{e.stderr!r},{e.envelope!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
