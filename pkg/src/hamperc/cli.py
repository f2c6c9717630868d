"""Command-line front end: ``hamperc {percolate,sweep,bp,oracle,bounds}``.

Exit codes: 0 success, 2 configuration or domain error, 3 regime error,
4 internal assertion (including band violations).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .branching import (
    OffspringLaw,
    extinction_probability,
    make_policy,
    progeny_ensemble,
    score_progeny,
)
from .branching.events import default_cap
from .branching.laws import POLICIES, Band
from .errors import ConfigError, DomainError, RegimeError
from .model import binomial_lower_tail_bound, derive_params, params_at, regime_check, second_component_bound
from .percolation import (
    c1_chi_square,
    component_spectrum,
    dump_edges,
    exact_small_oracle,
    sample_open_graph,
    simulate_top_two,
)
from .rng import derive_stream
from .sweep import LEMMA_C_KEYS, SweepConfig, metadata, parse_grid, render, run_sweep, write_sweep, write_text

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_ASSERT = 0, 2, 3, 4


def _csv_list(cast):
    def parse(text: str):
        try:
            return [cast(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def _lemma_c(text: str):
    key, sep, val = text.partition("=")
    if not sep or key not in LEMMA_C_KEYS:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE with KEY in {sorted(LEMMA_C_KEYS)}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value in {text!r}") from None


def _probability(text: str):
    """Float, or an exact fraction such as ``1/3``."""
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from None


def _kv_table(pairs):
    return ("result", ["key", "value"], [{"key": k, "value": v} for k, v in pairs])


def _emit(args, command: str, config: dict, tables) -> None:
    meta = metadata(command, config, getattr(args, "seed", None))
    write_text(args.out, render(args.format, meta, tables))


def _add_output(p) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


# -- subcommands ---------------------------------------------------------------


def cmd_percolate(args) -> int:
    params = derive_params(args.n, args.epsilon)
    graph = sample_open_graph(params, derive_stream(args.seed, 0), seed=args.seed)
    spectrum = component_spectrum(graph)
    if args.dump:
        dump_edges(graph, args.dump)
    try:
        bound = second_component_bound(params)
        ok, margin = spectrum.c2 <= bound, spectrum.c2 / bound
    except RegimeError:
        bound = ok = margin = None
    pairs = [
        ("n", params.n),
        ("epsilon", params.epsilon),
        ("p", params.p),
        ("edge_count", graph.edge_count),
        ("n_components", spectrum.n_components),
        ("c1", spectrum.c1),
        ("c2", spectrum.c2),
        ("giant_target", params.giant_target()),
        ("bound", bound),
        ("theorem_ok", ok),
        ("margin", margin),
    ]
    _emit(args, "percolate", {"n": args.n, "epsilon": args.epsilon}, [_kv_table(pairs)])
    return EXIT_OK


def cmd_sweep(args) -> int:
    overrides = {
        "trials": args.trials,
        "seed": args.seed,
        "alpha": args.alpha,
        "window_upper": args.window_upper,
        "out": args.out,
        "format": args.format,
        "workers": args.workers,
        "summary_only": args.summary_only or None,
        "timing": args.timing or None,
    }
    if args.n is not None or args.epsilon is not None:
        overrides["grid"] = parse_grid(args.n, args.epsilon)
    if args.lemma_c:
        overrides["lemma_c"] = dict(args.lemma_c)
    if args.config:
        cfg = SweepConfig.from_file(args.config, **overrides)
    else:
        cfg = SweepConfig(**{k: v for k, v in overrides.items() if v is not None})
    summary, records = run_sweep(cfg)
    write_sweep(cfg, summary, records)
    return EXIT_OK


def cmd_bp(args) -> int:
    params = derive_params(args.n, args.epsilon)
    if args.policy is not None:
        source = make_policy(args.policy)
        Band.from_params(params)
        laws = {"lower": OffspringLaw.lower(params), "upper": OffspringLaw.upper(params)}
    else:
        source = OffspringLaw.lower(params) if args.law == "lower" else OffspringLaw.upper(params)
        laws = {args.law: source}
    solver_rows = []
    for name, law in laws.items():
        q = extinction_probability(law)
        solver_rows.append(
            {"law": name, "trials": law.trials, "p": law.p, "mean": law.mean, "extinction": q, "survival": 1.0 - q}
        )
    tables = [("solver", ["law", "trials", "p", "mean", "extinction", "survival"], solver_rows)]
    config = {
        "n": args.n,
        "epsilon": args.epsilon,
        "law": args.law,
        "policy": args.policy,
        "solve_only": args.solve_only,
    }
    if not args.solve_only:
        alphas = args.alpha or []
        cap = args.cap if args.cap is not None else (default_cap(max(alphas), params.epsilon) if alphas else 100_000)
        config.update(trials=args.trials, cap=cap, alpha=alphas, lemma_c=dict(args.lemma_c or []))
        envelope_c = dict(args.lemma_c or []).get("envelope", LEMMA_C_KEYS["envelope"])
        stream = derive_stream(args.seed, 0)
        if args.policy is not None:
            res = progeny_ensemble(source, args.trials, cap, stream, params=params)
        else:
            res = progeny_ensemble(source, args.trials, cap, stream)
        surv = int(res.survived.sum())
        frac = surv / res.runs
        tables.append(
            (
                "simulation",
                ["runs", "cap", "survived", "survival_fraction", "stderr"],
                [
                    {
                        "runs": res.runs,
                        "cap": cap,
                        "survived": surv,
                        "survival_fraction": frac,
                        "stderr": math.sqrt(frac * (1 - frac) / res.runs),
                    }
                ],
            )
        )
        if alphas:
            est = score_progeny(res, params, alphas, cap, envelope_c)
            cols = ["alpha", "threshold", "hits", "estimate", "stderr", "envelope", "within_envelope"]
            rows = [{**asdict(e), "within_envelope": e.within_envelope()} for e in est]
            tables.append(("progeny", cols, rows))
    _emit(args, "bp", config, tables)
    return EXIT_OK


def cmd_oracle(args) -> int:
    law = exact_small_oracle(args.n, args.p)
    exact = isinstance(args.p, Fraction)
    rows = [
        {"c1": a, "c2": b, "probability": float(pr), "exact": str(pr) if exact else None}
        for (a, b), pr in law.joint.items()
    ]
    tables = [("joint", ["c1", "c2", "probability", "exact"], rows)]
    marg = [
        {"c1": a, "probability": float(pr), "exact": str(pr) if exact else None} for a, pr in law.c1_marginal().items()
    ]
    tables.append(("c1", ["c1", "probability", "exact"], marg))
    config = {"n": args.n, "p": str(args.p), "compare": args.compare}
    if args.compare:
        params = params_at(args.n, args.p)
        c1, _ = simulate_top_two(params, args.compare, derive_stream(args.seed, 0))
        stat, pval, _ = c1_chi_square(c1, law)
        tables.append(
            ("comparison", ["trials", "chi_square", "p_value"], [{"trials": args.compare, "chi_square": stat, "p_value": pval}])
        )
    _emit(args, "oracle", config, tables)
    return EXIT_OK


def cmd_bounds(args) -> int:
    params = derive_params(args.n, args.epsilon)
    rep = regime_check(params, args.ratio_low, args.eps_high)
    pairs = [
        ("n", params.n),
        ("epsilon", params.epsilon),
        ("omega", params.omega),
        ("p_c", params.p_c),
        ("p", params.p),
        ("ratio_lower", rep.ratio_lower),
        ("ratio_upper", rep.ratio_upper),
        ("in_theorem_regime", rep.in_theorem_regime),
        ("notes", rep.notes),
    ]
    tail = (args.k, args.p, args.t)
    if any(x is not None for x in tail):
        if any(x is None for x in tail):
            raise ConfigError("--k, --p and --t go together")
        pairs.append(("tail_bound", binomial_lower_tail_bound(args.k, args.p, args.t)))
    pairs.append(("second_component_bound", second_component_bound(params)))
    config = {"n": args.n, "epsilon": args.epsilon, "k": args.k, "p": args.p, "t": args.t}
    _emit(args, "bounds", config, [_kv_table(pairs)])
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamperc", description="Percolation on the Hamming graph H(2, n).")
    ap.add_argument("--version", action="version", version=f"hamperc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("percolate", help="sample one graph and report its component spectrum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump", metavar="PATH", help="write the open edges as an edge list")
    _add_output(p)
    p.set_defaults(func=cmd_percolate)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over an (n, eps) grid")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--n", type=_csv_list(int), help="comma-separated n values")
    p.add_argument("--epsilon", type=_csv_list(float), help="comma-separated eps values")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float, help="middle window starts at alpha eps^-2 (default 20)")
    p.add_argument("--window-upper", type=float, help="middle window ends at this times eps n^2 (default 0.2)")
    p.add_argument("--workers", type=int)
    p.add_argument("--lemma-c", type=_lemma_c, action="append", metavar="KEY=VALUE")
    p.add_argument("--summary-only", action="store_true", help="skip per-trial records")
    p.add_argument("--timing", action="store_true", help="record wall times (breaks byte determinism)")
    p.add_argument("--out", help="summary file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bp", help="branching-process solver and simulations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--law", choices=("lower", "upper"), default="lower")
    g.add_argument("--policy", choices=sorted(POLICIES))
    p.add_argument("--solve-only", action="store_true", help="only print extinction probabilities")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--cap", type=int, help="progeny counted as infinite from here")
    p.add_argument("--alpha", type=_csv_list(float), help="comma-separated alphas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lemma-c", type=_lemma_c, action="append", metavar="KEY=VALUE")
    _add_output(p)
    p.set_defaults(func=cmd_bp)

    p = sub.add_parser("oracle", help="exact (c1, c2) law for n = 2 or 3")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_probability, required=True, help="edge probability, e.g. 0.5 or 1/3")
    p.add_argument("--compare", type=int, metavar="TRIALS", help="also run a Monte Carlo chi-square check")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bounds", help="closed-form bounds and regime diagnostics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--ratio-low", type=float, default=4.0)
    p.add_argument("--eps-high", type=float, default=0.5)
    _add_output(p)
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RegimeError as exc:
        print(f"hamperc: regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ConfigError, DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"hamperc: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"hamperc: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
