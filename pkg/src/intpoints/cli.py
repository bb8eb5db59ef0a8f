"""Command-line front end.

    intpoints enumerate --curve '{"form":"short","A":"0","B":"1"}' --box '[-10,10,-10,10]'
    intpoints tau --j 1728
    intpoints verify --check L5

Every run prints {"manifest": ..., "report": ...} as JSON. Exit status is 0 on
success, 2 on bad input and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from . import bounds_lab as bl
from . import lattice_modular as lm
from .curve_models import ShortCurve, box_from_json, curve_from_json, curve_to_json, to_short_form
from .delpezzo import DP1Surface, count_S_N
from .errors import NumericError, ValidationError
from .heights import canonical_height_decomposed, point
from .point_enum import (
    CountReport,
    _certified_points_bound,
    arbitrary_box_pipeline,
    enumerate_box,
    main_theorem_pipeline,
    sieve_certificate,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
SUPPORTED_PREC = (53,)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bad JSON argument {text!r}: {exc}") from None


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _clean(obj):
    """JSON-safe copy: tuples to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# --- subcommands -------------------------------------------------------------


def cmd_enumerate(args):
    curve = curve_from_json(args.curve)
    box = box_from_json(args.box)
    if args.method == "brute":
        rep = enumerate_box(curve, box)
    elif args.method == "pipeline":
        rep = arbitrary_box_pipeline(curve, box, eps=args.eps)
    else:
        short, change = to_short_form(curve)
        if not change.is_identity:
            raise ValidationError("--method sieve needs a short Weierstrass curve")
        Y = max(abs(box.y_lo), abs(box.y_hi))
        bound, parts = _certified_points_bound(short, Y, [(box.x_lo, box.x_hi)], args.exact_alpha)
        pts = enumerate_box(curve, box).points
        rep = CountReport(points=pts, upper_bound=bound, branch="sieve", details=[{"sieve_parts": parts}])
    rows = [("x", "y")] + [(x, y) for x, y in (rep.points or [])]
    return rep.to_json(), rows


def cmd_height(args):
    curve = curve_from_json(args.curve)
    if not isinstance(curve, ShortCurve):
        raise ValidationError("height needs a short Weierstrass curve")
    x, y = _json_arg(args.point)
    br = canonical_height_decomposed(curve, point(curve, Fraction(str(x)), Fraction(str(y))), with_oracle=not args.no_oracle)
    out = br.to_json()
    out["curve"] = curve_to_json(curve)
    rows = [("p", "lambda_p")] + [(p, v) for p, v in br.finite_parts] + [("inf", br.lambda_inf)]
    return out, rows


def cmd_tau(args):
    fit = lm.associate_tau(float(Fraction(args.j)), with_residual=True)
    out = {
        "j": args.j,
        "tau": [fit.tau.value.real, fit.tau.value.imag],
        "region": fit.tau.region,
        "residual": fit.residual,
        "iterations": fit.iterations,
    }
    return out, [("re", "im", "region"), (fit.tau.value.real, fit.tau.value.imag, fit.tau.region)]


def cmd_sieve_bound(args):
    curve = curve_from_json(args.curve)
    if not isinstance(curve, ShortCurve):
        raise ValidationError("sieve-bound needs a short Weierstrass curve")
    a, b = _json_arg(args.interval)
    cert = sieve_certificate(curve, (int(a), int(b)), args.exact_alpha)
    return cert.to_json(), [("lo", "hi", "bound"), (a, b, cert.bound)]


def cmd_pipeline(args):
    curve = curve_from_json(args.curve)
    if isinstance(curve, ShortCurve):
        curve = curve.to_long()
    rep = main_theorem_pipeline(curve, args.N, delta=args.delta, k=args.k, eps=args.eps)
    rows = [("x", "y")] + [(x, y) for x, y in (rep.points or [])]
    return rep.to_json(), rows


def _run_one(cid: str) -> dict:
    return bl.run_check(cid).to_json()


def cmd_verify(args):
    ids = list(bl.CHECKS) if args.all else [args.check.upper()]
    for cid in ids:
        if cid not in bl.CHECKS:
            raise ValidationError(f"unknown check {cid!r}; choose from {sorted(bl.CHECKS)}")
    if args.jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_run_one, ids))
    else:
        reports = [_run_one(c) for c in ids]
    rows = [("check", "samples", "worst_case", "threshold", "passed", "empirical_constant")]
    for r in reports:
        rows.append((r["check_id"], r["samples"], r["worst_case"], r["threshold"], r["passed"], r["empirical_constant"]))
    for row in rows:
        print("  ".join(f"{str(c):>14}" for c in row), file=sys.stderr)
    return reports, rows


def cmd_delpezzo(args):
    surface = DP1Surface.from_json(_json_arg(args.surface))
    rep = count_S_N(surface, args.N)
    rows = [("u", "v", "count", "singular")]
    rows += [(u, v, c, 0) for (u, v), c in sorted(rep.per_fiber.items())]
    rows += [(f["u"], f["v"], f["count"], 1) for f in rep.singular_fibers]
    out = rep.to_json()
    out["surface"] = surface.to_json()
    return out, rows


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="also write a CSV table here")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--prec", type=int, default=53, help="working precision in bits (53 only)")

    p = _Parser(prog="intpoints", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enumerate", parents=[common], help="integral points in a box")
    s.add_argument("--curve", required=True)
    s.add_argument("--box", required=True)
    s.add_argument("--method", choices=("brute", "sieve", "pipeline"), default="brute")
    s.add_argument("--exact-alpha", action="store_true")
    s.add_argument("--eps", type=float, default=0.01)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("height", parents=[common], help="local height decomposition of a point")
    s.add_argument("--curve", required=True)
    s.add_argument("--point", required=True, help="JSON [x, y]")
    s.add_argument("--no-oracle", action="store_true")
    s.set_defaults(func=cmd_height)

    s = sub.add_parser("tau", parents=[common], help="tau on the real-j arcs for a j-invariant")
    s.add_argument("--j", required=True)
    s.set_defaults(func=cmd_tau)

    s = sub.add_parser("sieve-bound", parents=[common], help="large-sieve bound on an x-interval")
    s.add_argument("--curve", required=True)
    s.add_argument("--interval", required=True, help="JSON [a, b]")
    s.add_argument("--exact-alpha", action="store_true")
    s.set_defaults(func=cmd_sieve_bound)

    s = sub.add_parser("pipeline", parents=[common], help="main counting pipeline on [-N, N]^2")
    s.add_argument("--curve", required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--k", type=float, default=4.5)
    s.add_argument("--eps", type=float, default=None)
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("verify", parents=[common], help="numerical lemma checks")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--check")
    g.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("delpezzo", parents=[common], help="count S(N) on a degree-1 del Pezzo surface")
    s.add_argument("--surface", required=True, help='JSON {"F4":[c0..c4],"F6":[c0..c6]}')
    s.add_argument("--N", type=int, required=True)
    s.set_defaults(func=cmd_delpezzo)
    return p


def _config(args) -> dict:
    skip = {"func", "out", "csv"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        if args.prec not in SUPPORTED_PREC:
            raise ValidationError(f"--prec {args.prec} unsupported; only {SUPPORTED_PREC} bits are implemented")
        if args.jobs < 1:
            raise ValidationError("--jobs must be >= 1")
        report, rows = args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = _config(args)
    manifest = {
        "subcommand": args.command,
        "config": config,
        "input_digest": _digest(config),
        "version": __version__,
        "wall_time": time.perf_counter() - t0,
    }
    text = json.dumps(_clean({"manifest": manifest, "report": report}), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
