"""
Command-line interface.

    tvrate bound    --kappa 10 --n 3
    tvrate design   --poles +1,pair:0.7853981634 --mu 1 --L 10
    tvrate locus    --filter f.json --mu 1 --L 10 --out locus.csv
    tvrate search   --poles pair:0.7853981634 --mu 1 --L 10 --seed 0
    tvrate simulate --config exp.json --out trace.csv
    tvrate verify   --seed 0 --trials 1000

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .config import SimulationConfig, model_from_record
from .errors import AlreadyConvergedError, TooFewPointsError, TVRateError
from .filters import design_for_model, filter_to_dict, load_filter, save_filter
from .model import build_model, parse_poles
from .rate import (
    bound_report_to_dict,
    coefficient_lower_bound,
    minmax_search,
    rate_report_to_dict,
    rho_tv,
    root_locus,
    worst_case_rate,
    write_locus_csv,
)
from .sim import above_floor, empirical_rate, simulate, write_trace_csv
from .verify import dominance_trials

log = logging.getLogger("tvrate")

EXIT_USAGE = 1
EXIT_FAILED = 2
CONTAINMENT_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed():
    return int(os.environ.get("TVRATE_SEED", 0))


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _model_from_args(args):
    if getattr(args, "poles", None):
        return build_model(parse_poles(args.poles))
    if getattr(args, "model", None):
        with open(args.model) as fh:
            return model_from_record(json.load(fh))
    raise UsageError("give --poles or --model")


def cmd_bound(args):
    if args.n is not None and (args.poles or args.model):
        raise UsageError("--n conflicts with --poles/--model")
    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be at least 1")
        # the k = n term only depends on |m_0| = 1, so (z - 1)^n stands in
        model = build_model(parse_poles(",".join(["+1"] * args.n)))
        out = bound_report_to_dict(coefficient_lower_bound(model, args.kappa))
        out = {"kappa": args.kappa, "n": args.n, "rho_tv": out["rho_tv"],
               "nonminimal_reference": out["nonminimal_reference"]}
    else:
        model = _model_from_args(args)
        out = {"kappa": args.kappa, "n": model.n, "model": model.m.tolist()}
        out.update(bound_report_to_dict(coefficient_lower_bound(model, args.kappa)))
    if args.json:
        _emit(out)
        return 0
    print(f"rho_tv               = {out['rho_tv']:.6f}   (kappa={args.kappa:g}, n={out['n']})")
    if "per_k_bounds" in out:
        for k, v in enumerate(out["per_k_bounds"], 1):
            print(f"  coefficient bound k={k}: {v:.6f}")
        print(f"rho_general          = {out['rho_general']:.6f}")
    print(f"nonminimal reference = {out['nonminimal_reference']:.6f}"
          "   (literature bound for accelerated filters; not attained here)")
    return 0


def _filter_report(filt, mu, L):
    report = worst_case_rate(filt, mu, L)
    tv = rho_tv(L / mu, filt.n)
    return {"filter": filter_to_dict(filt), "rate": rate_report_to_dict(report),
            "rho_tv": tv, "gap": report.rho_worst - tv}


def cmd_design(args):
    model = _model_from_args(args)
    filt = design_for_model(model, args.mu, args.L)
    if args.out:
        save_filter(filt, args.out)
    _emit(_filter_report(filt, args.mu, args.L))
    return 0


def cmd_search(args):
    model = _model_from_args(args)
    filt, report = minmax_search(model, args.mu, args.L, n_starts=args.starts,
                                 seed=args.seed)
    if args.out:
        save_filter(filt, args.out)
    tv = rho_tv(args.L / args.mu, model.n)
    _emit({"filter": filter_to_dict(filt), "rate": rate_report_to_dict(report),
           "rho_tv": tv, "gap": report.rho_worst - tv})
    return 0


def cmd_locus(args):
    if args.filter:
        filt = load_filter(args.filter)
    else:
        filt = design_for_model(_model_from_args(args), args.mu, args.L)
    locus = root_locus(filt, args.mu, args.L, args.grid, n_start=args.start_points)
    write_locus_csv(locus, args.out)
    tv = rho_tv(args.L / args.mu, filt.n)
    # the verdict uses the refined worst case, not just the exported grid
    inside = max(max(p.max_modulus for p in locus if p.lam >= args.mu),
                 worst_case_rate(filt, args.mu, args.L).rho_worst)
    contained = inside <= tv + CONTAINMENT_TOL
    print(f"wrote {len(locus)} locus points to {args.out}")
    print(f"max modulus on [mu, L] = {inside:.12f}, rho_tv = {tv:.12f}")
    print(f"containment: {'true' if contained else 'false'}")
    return 0


def cmd_simulate(args):
    cfg = SimulationConfig.load(args.config)
    problem, filt, signal = cfg.build()
    trace = simulate(problem, filt, signal, cfg.K)
    if args.out:
        write_trace_csv(trace, args.out, full_state=args.full_state)
    try:
        rate = empirical_rate(trace, args.tail_fraction)
    except (AlreadyConvergedError, TooFewPointsError):
        rate = None
    scale = max(trace.err[0], float(np.linalg.norm(trace.x_star, axis=1).max()))
    tail = trace.err[3 * cfg.K // 4:]
    tail_ratio = float(tail.max() / scale) if scale > 0 else 0.0
    if scale == 0:
        verdict = "exact tracking (zero signal)"
    elif tail_ratio < 1e-8:
        verdict = "exact tracking"
    else:
        verdict = "no exact tracking"
    n = signal.model.n
    summary = {
        "K": cfg.K,
        "empirical_rate": rate,
        "rho_tv": rho_tv(problem.kappa, n),
        "rho_worst": worst_case_rate(filt, problem.mu, problem.L).rho_worst,
        "samples_above_floor": int(above_floor(trace).size),
        "tail_error_ratio": tail_ratio,
        "verdict": verdict,
    }
    _emit(summary, args.summary)
    return 0


def cmd_verify(args):
    res = dominance_trials(seed=args.seed, trials=args.trials)
    print(f"trials: {res.trials}")
    print(f"min rate - rho_tv: {res.min_gap:.3e}")
    print(f"below rho_tv - 1e-9: {len(res.below_floor)}")
    print(f"below coefficient bound - 1e-9: {len(res.below_coefficient_bound)}")
    for v in (res.below_floor + res.below_coefficient_bound)[:10]:
        print("  violation:", v)
    print("PASS" if res.passed else "FAIL")
    return 0 if res.passed else EXIT_FAILED


def build_parser():
    p = _Parser(prog="tvrate", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def interval(sp):
        sp.add_argument("--mu", type=float, required=True)
        sp.add_argument("--L", type=float, required=True)

    def model_opts(sp):
        sp.add_argument("--poles", help="e.g. +1,-1,pair:0.785 (radians)")
        sp.add_argument("--model", help="JSON file with 'poles' or 'model'")

    sp = sub.add_parser("bound", help="rate floor and coefficient bounds")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--n", type=int)
    model_opts(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("design", help="closed-form minimal filter")
    model_opts(sp)
    interval(sp)
    sp.add_argument("--out", help="write filter JSON here")
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("locus", help="root locus CSV")
    sp.add_argument("--filter", help="filter JSON (default: closed-form design)")
    model_opts(sp)
    interval(sp)
    sp.add_argument("--grid", type=int, default=201)
    sp.add_argument("--start-points", type=int, default=50,
                    help="extra gains on [0, mu)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_locus)

    sp = sub.add_parser("search", help="numerical min-max filter search")
    model_opts(sp)
    interval(sp)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--starts", type=int, default=32)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("simulate", help="closed-loop simulation")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", help="trace CSV")
    sp.add_argument("--summary", help="summary JSON")
    sp.add_argument("--full-state", action="store_true")
    sp.add_argument("--tail-fraction", type=float, default=0.5)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="randomized rate-floor checks")
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--trials", type=int, default=1000)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, TVRateError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"tvrate {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
