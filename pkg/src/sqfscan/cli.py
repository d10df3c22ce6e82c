"""Command-line interface.

Exit codes: 0 success, 2 search budget exhausted, 3 invalid input.
Thread count can be forced with the SQFSCAN_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import arith, classify, construct, local, survey
from .errors import BudgetExhausted, SqfscanError
from .poly import IntPoly

EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_INVALID = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _poly_arg(text: str) -> IntPoly:
    try:
        return IntPoly.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _threads(requested: int | None) -> int:
    env = os.environ.get("SQFSCAN_THREADS")
    if env:
        return max(1, int(env))
    return max(1, requested or 1)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sqfscan", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sqfree", help="squarefree part of a rational")
    p.add_argument("rat", help="rational number, e.g. 18/25 or -8")

    p = sub.add_parser("scan", help="height-bounded coverage scan")
    p.add_argument("--poly", type=_poly_arg, required=True, help="ascending coefficients, e.g. 1,4,10,10,5,2,1")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--prime-bound", type=int, required=True)
    p.add_argument("--no-negatives", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--thorough", action="store_true", help="complete factorizations (no semiprime shortcut)")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--csv", help="also write a flat CSV projection here")

    p = sub.add_parser("coverage", help="residue coverage of S~(f) modulo one prime")
    p.add_argument("--poly", type=_poly_arg, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("family-scan", help="exceptional primes over a coefficient family")
    p.add_argument("--deg", required=True, help="degree range lo..hi, e.g. 4..9")
    p.add_argument("--coeff-bound", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--prime-bound", type=int, required=True)
    p.add_argument("--sample", type=int, help="scan a seeded random sample instead of the full family")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--expect-size", type=int, help="flag the delta against an expected family size")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("local", help="local solvability of d*y^2 = f(x) at one place")
    p.add_argument("--poly", type=_poly_arg, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--place", required=True, help="a prime, or 'real'")

    p = sub.add_parser("witness", help="constructive witnesses and generators")
    p.add_argument("--poly", type=_poly_arg, required=True)
    p.add_argument("--prime", required=True, help="prime p (comma-separated primes for --mode multi)")
    p.add_argument(
        "--mode",
        required=True,
        choices=["zero-class", "odd-valuation", "multi", "degree1", "degree2", "everywhere-local"],
    )
    p.add_argument("--m", type=int, help="target residue class")
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("count", help="counting series E(t) and height-slice D(t)")
    p.add_argument("--poly", type=_poly_arg, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated, e.g. 10,100,1000")
    return ap


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return _dispatch(args)
    except BudgetExhausted as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (SqfscanError, ValueError, ZeroDivisionError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID


def _dispatch(args) -> int:
    if args.command == "sqfree":
        print(arith.squarefree_part(Fraction(args.rat)))
        return EXIT_OK

    if args.command == "scan":
        cfg = survey.SurveyConfig(
            f=args.poly,
            height_bound=args.height,
            prime_bound=args.prime_bound,
            include_negative=not args.no_negatives,
            threads=_threads(args.threads),
            thorough=args.thorough,
        )
        rep = survey.exceptional_primes(cfg)
        with open(args.out, "w") as fh:
            fh.write(rep.to_json())
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(rep.to_csv())
        print(f"exceptional primes <= {args.prime_bound}: {rep.exceptional}")
        return EXIT_OK

    if args.command == "coverage":
        cfg = survey.SurveyConfig(
            f=args.poly, height_bound=args.height, prime_bound=max(3, args.prime),
            threads=_threads(args.threads),
        )
        st = survey.s_tilde(cfg)
        res = survey.coverage(st.values, args.prime)
        print(sorted(res))
        return EXIT_OK

    if args.command == "family-scan":
        lo, _, hi = args.deg.partition("..")
        degrees = range(int(lo), int(hi or lo) + 1)
        rep = survey.family_scan(
            degrees,
            args.coeff_bound,
            args.height,
            args.prime_bound,
            threads=_threads(args.threads),
            sample=args.sample,
            seed=args.seed,
            expected_size=args.expect_size,
        )
        with open(args.out, "w") as fh:
            fh.write(rep.to_json())
        print(f"max exceptional prime: {rep.max_exceptional}")
        return EXIT_OK

    if args.command == "local":
        f = args.poly
        if args.place == "real":
            rep = local.has_real_point(f, args.d)
        else:
            rep = local.has_nontrivial_Ql_point(f, args.d, int(args.place))
        _emit(rep.to_json_dict())
        return EXIT_OK

    if args.command == "witness":
        return _witness(args)

    if args.command == "count":
        thresholds = [int(t) for t in args.thresholds.split(",")]
        series = survey.count_series(args.poly, args.prime, args.m, thresholds, args.height)
        _emit(series.to_json_dict())
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")  # pragma: no cover


def _witness(args) -> int:
    f = args.poly
    primes = [int(p) for p in args.prime.split(",")]
    p = primes[0]
    if args.mode == "zero-class":
        v = classify.zero_class_decide(f, p)
        out = {"kind": v.kind, "has_multiples_of_p": v.has_multiples}
        if v.witness is not None:
            r, d = v.witness
            out["witness"] = {"r": f"{r.numerator}/{r.denominator}", "d": d}
        _emit(out)
        return EXIT_OK
    if args.mode == "odd-valuation":
        n = classify.witness_odd_valuation(f, p)
        _emit({"n": n, "value": f.eval_int(n)})
        return EXIT_OK
    if args.mode == "multi":
        n = classify.witness_multi(f, primes)
        _emit({"n": n, "primes": primes, "value": f.eval_int(n)})
        return EXIT_OK
    if args.mode in ("degree1", "degree2"):
        if args.m is None:
            raise ValueError("--m is required for degree1/degree2")
        gen = construct.gen_degree1 if args.mode == "degree1" else construct.gen_degree2
        els = gen(f, p, args.m, args.count)
        _emit([
            {"d": e.d, "r": f"{e.r.numerator}/{e.r.denominator}", "q": e.q} for e in els
        ])
        return EXIT_OK
    if args.mode == "everywhere-local":
        if args.m is None:
            raise ValueError("--m is required for everywhere-local")
        results = local.everywhere_local_d(f, p, args.m, args.count)
        _emit([
            {
                "d": r.d,
                "q": r.q,
                "delta": r.delta,
                "base_point": r.t,
                "reports": [rep.to_json_dict() for rep in r.reports],
            }
            for r in results
        ])
        return EXIT_OK
    raise AssertionError  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
