"""Command-line entry point: ``renyi-combining <verb> [options]``.

Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage or
domain errors.  Files given with ``--out`` are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from decimal import Decimal, InvalidOperation
from typing import Sequence

from . import analysis, polarization
from .channels import atomic_write_text, channel_entropy, channel_to_joint, load_channel
from .combining import check_bounds, gap_delta
from .core import Alpha, EntropyKind, KKKind
from .errors import RenyiError
from .precision import get_precision

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
VERIFY_SUITES = ("ce-a", "ce-c", "linear", "appendix", "all")


def parse_alpha_range(text: str) -> list[Decimal]:
    """``start:end:step`` into the end-exclusive Decimal grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:end:step, got {text!r}")
    try:
        start, stop, step = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"non-numeric alpha range {text!r}") from None
    if step <= 0 or stop <= start:
        raise argparse.ArgumentTypeError(f"empty alpha range {text!r}")
    return analysis.alpha_grid(start, stop, step)


def _alpha_arg(text: str) -> Alpha:
    try:
        return Alpha.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# verbs


def cmd_entropy(args) -> int:
    W = load_channel(args.channel)
    h = channel_entropy(W, args.alpha, args.kind)
    unit = "bits" if args.bits else "nats"
    if args.bits:
        h /= math.log(2)
    _emit(_json({"kind": EntropyKind.parse(args.kind).value, "alpha": str(args.alpha),
                 "channel": args.channel, "entropy": h, "unit": unit}), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    j1 = channel_to_joint(load_channel(args.ch1))
    j2 = channel_to_joint(load_channel(args.ch2))
    rep = check_bounds(j1, j2, args.alpha, args.kind)
    d = rep.to_dict()
    d.update(ch1=args.ch1, ch2=args.ch2)
    _emit(_json(d), args.out)
    return EXIT_OK


def cmd_gap(args) -> int:
    P = get_precision(args.precision)
    p = P.num(args.p)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "delta"])
    for a in args.alpha_range:
        w.writerow([str(a), P.fmt(gap_delta(p, Alpha.parse(str(a)), args.kind, P))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    table = analysis.conjecture_scan(args.func, args.alpha_range, args.grid, args.tol, args.precision)
    _emit(_json(table.to_dict()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    P = get_precision(args.precision)
    suite = args.suite
    if suite == "ce-a":
        reports = [analysis.verify_counterexample_A(P)]
    elif suite == "ce-c":
        reports = [analysis.verify_counterexample_C(P)]
    elif suite == "linear":
        reports = [analysis.verify_linearity(c, n_pairs=args.samples, seed=args.seed)
                   for c in analysis.LINEAR_CASES]
    elif suite == "appendix":
        reports = [analysis.verify_appendix_identities(seed=args.seed)]
    else:
        reports = analysis.verify_all(P, seed=args.seed, n_pairs=args.samples)
    print("\n".join(r.to_text() for r in reports))
    if args.out:
        atomic_write_text(args.out, _json([r.to_dict() for r in reports]))
    ok = all(r.passed for r in reports)
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_polarize(args) -> int:
    cfg = polarization.PolarConfig(args.alpha, args.depth, args.a, args.b,
                                   "posterior_merge" if args.merge else "none")
    res = polarization.polarize_tree(load_channel(args.channel), cfg)
    stats = _json(res.stats_dicts())
    if args.out:
        atomic_write_text(args.out, res.to_csv())
        if args.stats:
            atomic_write_text(args.stats, stats)
        else:
            sys.stdout.write(stats)
    else:
        sys.stdout.write(res.to_csv())
        if args.stats:
            atomic_write_text(args.stats, stats)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="renyi-combining",
        description="Renyi information-combining bounds, convexity checks and polarization.",
    )
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")
    kinds = [k.value for k in EntropyKind]

    def common(p, out_help="output file (default: stdout)"):
        p.add_argument("--out", help=out_help)
        p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    def prec(p):
        p.add_argument("--precision", choices=["double", "extended"], default=None,
                       help="arithmetic backend (default: $RENYI_PRECISION or double)")

    p = sub.add_parser("entropy", help="conditional entropy of X given the channel output")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--channel", required=True, help="bsc:p, bec:e, or a .json/.csv file")
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    common(p)
    p.set_defaults(handler=cmd_entropy)

    p = sub.add_parser("bounds", help="combined entropy vs the BSC and BEC expressions (JSON)")
    p.add_argument("--kind", required=True, choices=kinds)
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--ch1", required=True)
    p.add_argument("--ch2", required=True)
    common(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("gap", help="gap between the two bounds for two BSC(p) copies (CSV)")
    p.add_argument("--kind", required=True, choices=["A", "H", "C"])
    p.add_argument("--p", required=True)
    p.add_argument("--alpha-range", required=True, type=parse_alpha_range, metavar="A:B:S")
    prec(p)
    common(p)
    p.set_defaults(handler=cmd_gap)

    p = sub.add_parser("scan", help="grid convexity classification over an alpha range (JSON)")
    p.add_argument("--func", required=True, choices=[k.value for k in KKKind])
    p.add_argument("--alpha-range", required=True, type=parse_alpha_range, metavar="A:B:S")
    p.add_argument("--grid", type=int, default=analysis.DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=None)
    prec(p)
    common(p)
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("verify", help="run a verification suite; exit 1 on any failure")
    p.add_argument("suite", choices=VERIFY_SUITES)
    p.add_argument("--samples", type=int, default=1000, help="random pairs for the linearity suite")
    prec(p)
    common(p, "write the JSON report here")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("polarize", help="polarization tree of the J mutual information (CSV)")
    p.add_argument("--alpha", required=True, type=_alpha_arg)
    p.add_argument("--channel", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--a", type=float, default=0.1)
    p.add_argument("--b", type=float, default=0.9)
    p.add_argument("--merge", action="store_true", help="merge equal-posterior outputs (alpha=1 only)")
    p.add_argument("--stats", help="write level statistics JSON here")
    common(p, "CSV file (default: stdout)")
    p.set_defaults(handler=cmd_polarize)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except (RenyiError, ValueError, OSError) as exc:
        print(f"renyi-combining {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
