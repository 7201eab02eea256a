"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 invalid state, 3 verification failure.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import sys

import numpy as np

from . import classify as cls
from . import kcbs, oracle

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.17g}"


def _json_num(x: float):
    return float(x) if math.isfinite(x) else None


def _emit(text: str, output: str | None) -> int:
    if output is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {output}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        values = [float(v) for v in args.lambdas]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(values) not in (2, 3) or not all(math.isfinite(v) for v in values):
        print("error: expected two or three finite numbers", file=sys.stderr)
        return EXIT_USAGE
    result = cls.classify(*values)
    payload = {
        "label": result.label.value,
        "chsh_max": _json_num(result.chsh_max),
        "kcbs_min": _json_num(result.kcbs_min),
        "argmin_s": _json_num(result.argmin_s),
        "sufficient_conditions": None,
    }
    if result.label is not cls.Label.INVALID:
        by_l3, by_cs = cls.is_noncontextual_sufficient(
            (values[0], values[1], values[2] if len(values) == 3 else 1 - values[0] - values[1])
        )
        payload["sufficient_conditions"] = {"lambda3_nonneg": by_l3, "cauchy_schwarz": by_cs}
    print(json.dumps(payload))
    return EXIT_INVALID if result.label is cls.Label.INVALID else EXIT_OK


def cmd_scan(args) -> int:
    if args.resolution < 2:
        print("error: --resolution must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    scan = cls.scan_region(args.resolution, workers=args.workers)
    rows = zip(
        scan.lambda1.ravel(), scan.lambda2.ravel(), scan.labels.ravel(),
        scan.chsh_max.ravel(), scan.kcbs_min.ravel(),
    )
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("lambda1,lambda2,label,chsh_max,kcbs_min\n")
        for l1, l2, label, chsh, kc in rows:
            buf.write(f"{_fmt(l1)},{_fmt(l2)},{label.value},{_fmt(chsh)},{_fmt(kc)}\n")
        text = buf.getvalue()
    else:
        text = json.dumps([
            {"lambda1": float(l1), "lambda2": float(l2), "label": label.value,
             "chsh_max": _json_num(chsh), "kcbs_min": _json_num(kc)}
            for l1, l2, label, chsh, kc in rows
        ]) + "\n"
    return _emit(text, args.output)


def cmd_boundary(args) -> int:
    if args.samples < 2:
        print("error: --samples must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    if args.which == "local":
        curve = cls.boundary_local(args.samples)
    else:
        curve = cls.boundary_contextual_numeric(args.samples)
    if args.format == "csv":
        text = "lambda1,lambda2\n" + "".join(
            f"{_fmt(a)},{_fmt(b)}\n" for a, b in curve.samples
        )
    else:
        text = json.dumps([{"lambda1": float(a), "lambda2": float(b)} for a, b in curve.samples]) + "\n"
    return _emit(text, args.output)


def cmd_verify(args) -> int:
    if args.seed < 0 or args.trials < 1 or args.n_starts < 1:
        print("error: --seed must be non-negative, --trials and --n-starts positive", file=sys.stderr)
        return EXIT_USAGE
    fault = kcbs.inject_fault(args.inject_fault) if args.inject_fault else contextlib.nullcontext()
    with fault:
        results = oracle.run_verification(args.seed, args.trials, args.n_starts)
    print(f"verification seed={args.seed} trials={args.trials} n_starts={args.n_starts}")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"  {r.name:<22} max_gap={r.max_gap:<12.6g} tol={r.tol:<8.6g} {status}")
    failed = [r for r in results if not r.passed]
    for r in failed:
        offender = ", ".join(f"{x:.6g}" if isinstance(x, float) else str(x) for x in _flatten(r.offender))
        print(f"  offending input for {r.name}: ({offender})")
    return EXIT_VERIFY if failed else EXIT_OK


def _flatten(items):
    for x in items or ():
        if isinstance(x, (tuple, list)):
            yield from _flatten(x)
        else:
            yield float(x) if isinstance(x, (float, np.floating)) else x


def cmd_spectrum(args) -> int:
    try:
        s = float(args.s)
        k = kcbs.spectrum_from_s(s)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps({"k_max": k.k_max, "k_mid": k.k_mid, "k_min": k.k_min}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biphoton", description="CHSH / KCBS classification of biphoton states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify one spectrum")
    p.add_argument("lambdas", nargs="+", metavar="LAMBDA", help="lambda1 lambda2 [lambda3]")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", help="classify a grid over the (lambda1, lambda2) domain")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("boundary", help="sample a locality or contextuality frontier")
    p.add_argument("--which", choices=["local", "contextual"], required=True)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("verify", help="run the brute-force oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--n-starts", type=int, default=oracle.DEFAULT_STARTS)
    p.add_argument("--inject-fault", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="KCBS spectrum at parameter s")
    p.add_argument("s")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
