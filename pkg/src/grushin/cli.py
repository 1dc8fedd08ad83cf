"""Command-line front-end.

Every subcommand prints a JSON report (keys sorted) on stdout, or ``key: value``
lines with ``--format text``. Exit status: 0 success or pass, 1 a verified
negative result (conformality fails, obstruction found, curve not
admissible, map not entire affine, lengths disagree), 2 usage or input error.

Relative output paths are resolved against ``$GRUSHIN_OUTPUT_DIR`` when it is
set.
"""
import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from .curves import admissibility_check, grushin_length, length_distortion, pushforward
from .documents import load_document
from .errors import DocumentError, GrushinError, NotEntireAffine
from .geodesic import cc_distance_upper
from .maps import classify_entire
from .topology import axis_components, obstruction_check
from .verify import emit_grid, verify_conformal

OUTPUT_ENV = "GRUSHIN_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def output_path(path):
    base = os.environ.get(OUTPUT_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _alpha(value):
    try:
        a = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {value!r}")
    if not (math.isfinite(a) and a > 0):
        raise argparse.ArgumentTypeError("alpha must be a positive finite number")
    return a


def _positive_int(value):
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


# --- subcommands -------------------------------------------------------------


def cmd_eval(args):
    gmap = load_document(args.map, "map")
    pts = np.array(args.point, dtype=float)
    g1, g2 = gmap.evaluate(pts[:, 0], pts[:, 1])
    rows = [{"x": x, "y": y, "g1": a, "g2": b} for (x, y), a, b in zip(pts, g1, g2)]
    return {"alpha": gmap.alpha, "points": rows}, 0


def cmd_verify(args):
    gmap = load_document(args.map, "map")
    domain = load_document(args.domain, "domain")
    rep = verify_conformal(gmap.alpha, gmap, domain, grid=args.grid)
    return rep.to_dict(), 0 if rep.passed else 1


def cmd_length(args):
    curve = load_document(args.curve, "curve")
    res = grushin_length(args.alpha, curve, rtol=args.rtol)
    return {"alpha": args.alpha, **res.to_dict()}, 0


def cmd_admissible(args):
    curve = load_document(args.curve, "curve")
    rep = admissibility_check(args.alpha, curve, levels=args.levels)
    return {"alpha": args.alpha, **rep.to_dict()}, 0 if rep.verdict == "admissible" else 1


def cmd_push_curve(args):
    gmap = load_document(args.map, "map")
    curve = load_document(args.curve, "curve")
    pushed = pushforward(gmap, curve, samples=args.samples)
    return {"kind": "polyline", "t": pushed.t, "points": pushed.points}, 0


def cmd_distort(args):
    gmap = load_document(args.map, "map")
    curve = load_document(args.curve, "curve")
    res = length_distortion(gmap.alpha, gmap, curve, samples=args.samples)
    gap = abs(res.pushed_length - res.weighted_length)
    agree = bool(gap <= args.rtol * max(1.0, abs(res.weighted_length)))
    return {"alpha": gmap.alpha, "agree": agree, **res.to_dict()}, 0 if agree else 1


def cmd_distance(args):
    res = cc_distance_upper(args.alpha, tuple(args.p), tuple(args.q), knots=args.knots, iterations=args.iterations, seed=args.seed)
    return {"alpha": args.alpha, "p": args.p, "q": args.q, **res.to_dict()}, 0


def cmd_classify_entire(args):
    gmap = load_document(args.map, "map")
    try:
        c = classify_entire(gmap)
    except NotEntireAffine as exc:
        return {"entire_affine": False, "reason": str(exc)}, 1
    return {"entire_affine": True, "a": c.a, "b": c.b, "residual": c.residual}, 0


def cmd_axis_components(args):
    domain = load_document(args.domain, "domain")
    comps = axis_components(domain)
    return {"count": len(comps), "components": [{"ymin": lo, "ymax": hi} for lo, hi in comps]}, 0


def cmd_obstruct(args):
    d1 = load_document(args.domain, "domain")
    d2 = load_document(args.other, "domain")
    res = obstruction_check(d1, d2, allow_side_swap=not args.no_side_swap)
    if res.obstructed:
        return {"obstructed": True, "certificate": res.certificate}, 1
    return {
        "obstructed": False,
        "axis_map": res.axis_map,
        "side_map": res.side_map,
        "swapped": res.swapped,
    }, 0


def cmd_grid(args):
    gmap = load_document(args.map, "map")
    domain = load_document(args.domain, "domain")
    path = output_path(args.out)
    try:
        rows = emit_grid(gmap.alpha, gmap, domain, args.resolution, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}")
    return {"path": path, "rows": rows}, 0


def build_parser():
    parser = argparse.ArgumentParser(prog="grushin", description="Conformal maps, lengths and domains in the Grushin plane.")
    parser.add_argument("--format", choices=("json", "text"), default="json", help="report format on stdout")
    parser.add_argument("--report", metavar="PATH", help="also write the report to PATH")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "evaluate a map at points")
    p.add_argument("--map", required=True)
    p.add_argument("--point", nargs=2, type=float, action="append", required=True, metavar=("X", "Y"))

    p = add("verify", cmd_verify, "check conformality on a domain")
    p.add_argument("--map", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--grid", type=_positive_int, default=100)

    p = add("length", cmd_length, "Carnot-Caratheodory length of a curve")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--rtol", type=float, default=1e-12)

    p = add("admissible", cmd_admissible, "admissibility of a curve")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--levels", type=int, default=3)

    p = add("push-curve", cmd_push_curve, "image of a curve as a polyline document")
    p.add_argument("--map", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--samples", type=_positive_int, default=4097)

    p = add("distort", cmd_distort, "compare pushed length with the weighted length")
    p.add_argument("--map", required=True)
    p.add_argument("--curve", required=True)
    p.add_argument("--samples", type=_positive_int, default=4097)
    p.add_argument("--rtol", type=float, default=1e-6)

    p = add("distance", cmd_distance, "upper bound on the distance between two points")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--p", nargs=2, type=float, required=True, metavar=("X", "Y"))
    p.add_argument("--q", nargs=2, type=float, required=True, metavar=("X", "Y"))
    p.add_argument("--knots", type=int, default=33)
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)

    p = add("classify-entire", cmd_classify_entire, "recognise an entire affine map")
    p.add_argument("--map", required=True)

    p = add("axis-components", cmd_axis_components, "components of a domain on the singular line")
    p.add_argument("--domain", required=True)

    p = add("obstruct", cmd_obstruct, "incidence obstruction between two domains")
    p.add_argument("--domain", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--no-side-swap", action="store_true", help="forbid exchanging the half-planes")

    p = add("grid", cmd_grid, "write a CSV grid of g, |Wbar| and det D_alpha")
    p.add_argument("--map", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--resolution", type=_positive_int, default=100)
    p.add_argument("--out", default="grid.csv")
    return parser


def _text(report, prefix=""):
    lines = []
    for key in sorted(report):
        val = report[key]
        if isinstance(val, dict):
            lines.extend(_text(val, f"{prefix}{key}."))
        else:
            lines.append(f"{prefix}{key}: {json.dumps(val)}")
    return lines


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except DocumentError as exc:
        print(f"grushin: invalid document: {exc}", file=sys.stderr)
        return 2
    except (UsageError, GrushinError, ValueError) as exc:
        print(f"grushin: {exc}", file=sys.stderr)
        return 2
    report = _clean(report)
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.report:
        path = output_path(args.report)
        try:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"grushin: cannot write {path}: {exc.strerror}", file=sys.stderr)
            return 2
    print(text if args.format == "json" else "\n".join(_text(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
