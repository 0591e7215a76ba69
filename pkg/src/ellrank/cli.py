"""Command-line front end.

Subcommands: curve-info, embed, span, rank, verify <experiment>. Output is
JSON (stdout or --out). Exit codes: 0 all checks passed (or nothing failed),
1 a verification check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import ranks, spans
from .curve import Curve, CurveError
from .divisor import Divisor, DivisorError, format_divisor, parse_divisor
from .embedding import NormalEmbedding, ProjPoint
from .experiments import (EXPERIMENTS, ConfigError, ExperimentConfig,
                          exit_code_for, normalize_report, run_experiment)
from .fields import FieldError, PrimeField

USAGE_ERROR = 2


def _add_common(sp, n_default: Optional[int] = 8):
    sp.add_argument("--p", type=int, default=31, help="field characteristic (prime >= 5)")
    sp.add_argument("--a", type=int, default=2, help="curve coefficient a")
    sp.add_argument("--b", type=int, default=3, help="curve coefficient b")
    if n_default is not None:
        sp.add_argument("--n", type=int, default=n_default,
                        help="ambient projective dimension (embedding degree n+1)")
    sp.add_argument("--out", type=str, default=None, help="write JSON to this path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ellrank",
        description="Exact rank-stratification laboratory for elliptic normal curves")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("curve-info", help="curve summary and rational points")
    _add_common(sp, n_default=None)

    sp = sub.add_parser("embed", help="embed a divisor: point images and jet matrix")
    _add_common(sp)
    sp.add_argument("--divisor", action="append", required=True,
                    help="divisor in grammar form, e.g. '2*(0,1)+(4,2)+O'")

    sp = sub.add_parser("span", help="span dimension, hyperplanes, membership, intersections")
    _add_common(sp)
    sp.add_argument("--divisor", action="append", required=True,
                    help="divisor (pass twice for a span intersection)")
    sp.add_argument("--point", type=str, default=None,
                    help="ambient point 'c0:c1:...:cn' for membership tests")

    sp = sub.add_parser("rank", help="rank report for an ambient point")
    _add_common(sp)
    sp.add_argument("--point", type=str, required=True)
    sp.add_argument("--divisor", action="append", default=None,
                    help="candidate border-rank scheme W")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--budget", type=int, default=5_000_000)
    sp.add_argument("--r-max", dest="r_max", type=int, default=None,
                    help="exhaustive search depth (default n - deg W, or 3)")

    sp = sub.add_parser("verify", help="run a named verification experiment")
    sp.add_argument("experiment", choices=EXPERIMENTS)
    _add_common(sp, n_default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--w", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--budget", type=int, default=5_000_000)
    sp.add_argument("--avoid-size", dest="avoid_size", type=int, default=5)
    return ap


def _make_embedding(args) -> NormalEmbedding:
    K = PrimeField(args.p)
    curve = Curve.make(K, args.a, args.b)
    return NormalEmbedding(curve, args.n)


def _parse_point(X: NormalEmbedding, text: str) -> ProjPoint:
    parts = text.split(":")
    if len(parts) != X.dim_sections:
        raise DivisorError(f"point needs {X.dim_sections} coordinates, got {len(parts)}")
    return ProjPoint.of(X.field, [X.field.parse(t) for t in parts])


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fmt_point(X, P) -> str:
    return ":".join(X.field.format(c) for c in P.coords)


def cmd_curve_info(args) -> int:
    K = PrimeField(args.p)
    curve = Curve.make(K, args.a, args.b)
    pts = curve.enumerate_points()
    import math
    t = int(2 * math.isqrt(args.p))
    payload = {
        "p": args.p, "a": args.a, "b": args.b,
        "equation": f"y^2 = x^3 + {args.a}x + {args.b}",
        "n_points": len(pts),
        "hasse_window": [args.p + 1 - t - 1, args.p + 1 + t + 1],
        "points": [repr(q) for q in pts],
    }
    _emit(payload, args.out)
    return 0


def cmd_embed(args) -> int:
    X = _make_embedding(args)
    Z = parse_divisor(X.curve, args.divisor[0])
    from .linalg import rank_profile
    M = X.jet_matrix(Z)
    payload = {
        "divisor": format_divisor(Z, X.curve),
        "degree": Z.degree,
        "embedded_support": {repr(q): _fmt_point(X, X.embed_point(q))
                             for q in Z.support()},
        "jet_matrix": [[X.field.format(c) for c in row] for row in M.rows],
        "rank": rank_profile(M).rank,
    }
    _emit(payload, args.out)
    return 0


def cmd_span(args) -> int:
    X = _make_embedding(args)
    divisors = [parse_divisor(X.curve, d) for d in args.divisor]
    Z = divisors[0]
    payload = {
        "divisor": format_divisor(Z, X.curve),
        "span_dim": spans.span_dim(X, Z),
        "hyperplanes_through": [[X.field.format(c) for c in v]
                                for v in spans.hyperplanes_through(X, Z)],
        "in_O1": X.in_O1(Z),
    }
    if len(divisors) > 1:
        B = divisors[1]
        res = spans.span_intersection(X, Z, B)
        payload["second_divisor"] = format_divisor(B, X.curve)
        payload["intersection"] = {
            "dim": res.dim,
            "witness": None if res.witness is None else _fmt_point(X, res.witness),
        }
    if args.point:
        P = _parse_point(X, args.point)
        payload["point"] = _fmt_point(X, P)
        payload["point_in_span"] = spans.point_in_span(X, P, Z)
        payload["strictly_spanned"] = spans.strictly_spanned_by(X, P, Z)
    _emit(payload, args.out)
    return 0


def cmd_rank(args) -> int:
    import random
    X = _make_embedding(args)
    P = _parse_point(X, args.point)
    rng = random.Random(args.seed)
    trials = args.trials if args.trials is not None else 50 * args.p
    W = parse_divisor(X.curve, args.divisor[0]) if args.divisor else None
    payload = {"point": _fmt_point(X, P), "caveats": ["rationality", "char-p"]}
    lower, provenance = 1, "trivial"
    if W is not None:
        cert = ranks.border_rank_cert(X, P, W)
        payload["border_cert"] = {
            "W": format_divisor(W, X.curve), "w": cert.w, "valid": cert.valid,
            "failing_check": cert.failing_check,
        }
    r_max = args.r_max
    if r_max is None:
        r_max = X.n - W.degree if W is not None else 3
    r_max = max(1, min(r_max, X.n))
    ex = ranks.rank_exhaustive_reduced(X, P, r_max, args.budget)
    payload["exhaustive"] = {
        "r_max": r_max, "min_size": ex.min_size,
        "witness": None if ex.witness is None else format_divisor(ex.witness, X.curve),
        "sizes_exhausted": list(ex.sizes_exhausted),
        "budget_exceeded": ex.budget_exceeded,
    }
    if ex.min_size is not None:
        payload["upper_witness"] = payload["exhaustive"]["witness"]
        lower, provenance = ex.min_size, "exhaustive minimum over rational points"
    elif ex.sizes_exhausted:
        s = max(ex.sizes_exhausted)
        lower, provenance = s + 1, f"sizes 1..{s} exhausted over rational points"
        if W is not None and "border_cert" in payload and payload["border_cert"]["valid"]:
            gap_bound = X.n + 1 - W.degree
            if s >= W.degree and gap_bound > lower:
                lower = gap_bound
                provenance += f"; rank-gap bound r + b >= n+1 applied (b = {W.degree})"
    if W is not None and ex.min_size is None:
        S = ranks.rank_upper_search(X, P, W, X.n + 1 - W.degree, (), trials, rng)
        payload["search_witness"] = (None if S is None
                                     else format_divisor(S, X.curve))
        if S is not None:
            payload["upper_witness"] = payload["search_witness"]
    payload["lower_bound"] = {"value": lower, "provenance": provenance}
    _emit(payload, args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = ExperimentConfig(
        experiment=args.experiment, p=args.p, a=args.a, b=args.b, n=args.n,
        k=args.k, w=args.w, seed=args.seed, trials=args.trials,
        budget=args.budget, avoid_size=args.avoid_size, out=args.out)
    report = run_experiment(cfg)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"{report['experiment']}: {report['overall']} "
              f"({len(report['checks'])} checks) -> {args.out}")
    else:
        print(json.dumps(report, indent=2, sort_keys=True))
    return exit_code_for(report)


_COMMANDS = {
    "curve-info": cmd_curve_info,
    "embed": cmd_embed,
    "span": cmd_span,
    "rank": cmd_rank,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FieldError, CurveError, DivisorError,
            ranks.PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
