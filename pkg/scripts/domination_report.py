"""P(|cluster| >= ell) next to the two bracketing Galton-Watson tails over a
range of ell."""
import argparse
import sys

from hamperc.estimators import check_domination
from hamperc.model import derive_params


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--ell", type=lambda s: [int(x) for x in s.split(",")], default=[10, 100, 500, 2000, 5000])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--c-log", type=float, default=1.0)
    args = ap.parse_args(argv)

    params = derive_params(args.n, args.epsilon)
    print(f"# n={args.n} eps={args.epsilon} trials={args.trials} seed={args.seed} c_log={args.c_log}")
    print("ell,omega_prime,lower,cluster,upper,lower_ok,upper_ok,in_window")
    for ell in args.ell:
        r = check_domination(params, ell, args.trials, args.seed, c_log=args.c_log)
        print(f"{ell},{r.omega_prime},{r.lower!r},{r.cluster!r},{r.upper!r},{r.lower_ok},{r.upper_ok},{r.window_ok}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
