"""Command-line front end.

All numbers are exact strings (``"3"``, ``"-7/2"``, ``"1/2+sqrt(2)"``);
decimals are rejected. JSON output carries ``"schema": "1"``. Domain errors
exit with status 1 and a JSON error object on stdout; malformed arguments
exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction

from . import reals
from .construction import (
    Basic,
    choose_N_for_lambda,
    contains,
    parse_spec,
    spec_to_json,
    window,
)
from .errors import ApavoidError, PreconditionUnmet
from .escape import (
    DEFAULT_DEPTH,
    Progression,
    certify_escape_rational,
    certify_escape_search,
    claim1_verify,
    equidist_stats,
)
from .finite_complement import find_two_sided_ap, verify_ap_avoids
from .intervals import IntervalSet
from .reals import format_exact, parse_exact

SCHEMA = "1"
CONFIG_ENV = "APAVOID_CONFIG"


@dataclass(frozen=True)
class Config:
    default_N: int = 3
    search_depth: int = DEFAULT_DEPTH
    max_refine_width: Fraction = reals.DEFAULT_MAX_WIDTH
    output_format: str = "json"

    def __post_init__(self):
        if self.default_N < 1:
            raise ValueError("default_N must be >= 1")
        if self.search_depth < 1:
            raise ValueError("search_depth must be >= 1")
        if self.max_refine_width <= 0:
            raise ValueError("max_refine_width must be positive")
        if self.output_format not in ("json", "csv"):
            raise ValueError("output_format must be json or csv")

    @classmethod
    def from_text(cls, text: str) -> "Config":
        """Parse ``key=value`` lines; ``#`` starts a comment."""
        values = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in cls.__dataclass_fields__:
                raise ValueError(f"bad config line: {raw!r}")
            if key in ("default_N", "search_depth"):
                values[key] = int(value)
            elif key == "max_refine_width":
                values[key] = _fraction(value)
            else:
                values[key] = value
        return cls(**values)

    @classmethod
    def load(cls, environ=None) -> "Config":
        environ = os.environ if environ is None else environ
        path = environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


# -- argument types ---------------------------------------------------------


def _exact(text: str):
    try:
        return parse_exact(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    value = _exact(text)
    if not isinstance(value, Fraction):
        raise argparse.ArgumentTypeError(f"{text!r} is not rational")
    return value


def _point(text: str):
    parts = [_exact(p) for p in text.split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def _spec(text: str):
    try:
        return parse_spec(text)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _intervals(text: str) -> IntervalSet:
    try:
        return IntervalSet.from_json(json.loads(text))
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(f"bad interval list: {exc}") from None


def _fmt_point(p):
    if isinstance(p, tuple):
        return [format_exact(c) for c in p]
    return format_exact(p)


# -- commands ----------------------------------------------------------------


def _window_N(args, cfg):
    N = args.N if args.N is not None else cfg.default_N
    if N == 1:
        warnings.warn("N = 1 gives the empty set", stacklevel=2)
    return N


def cmd_window(args, cfg, out):
    N = _window_N(args, cfg)
    spec = args.spec if args.spec is not None else Basic(N)
    ws = window(spec, args.lo, args.hi)
    if _format(args, cfg) == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["lo", "hi"])
        w.writerows(ws.to_json())
        return 0
    _emit(out, {
        "spec": spec_to_json(spec),
        "from": format_exact(args.lo),
        "to": format_exact(args.hi),
        "intervals": ws.to_json(),
        "measure": format_exact(ws.measure()),
    })
    return 0


def cmd_check(args, cfg, out):
    spec = args.spec if args.spec is not None else Basic(cfg.default_N)
    _emit(out, {"spec": spec_to_json(spec), "x": _fmt_point(args.x), "member": contains(spec, args.x)})
    return 0


def cmd_escape(args, cfg, out):
    spec = args.spec if args.spec is not None else Basic(cfg.default_N)
    depth = args.depth if args.depth is not None else cfg.search_depth
    prog = Progression(args.x0, args.delta)
    rational = isinstance(args.x0, Fraction) and isinstance(args.delta, Fraction)
    method = args.method
    if method == "auto":
        method = "constructive" if isinstance(spec, Basic) and rational else "search"
    if method == "constructive":
        if not (isinstance(spec, Basic) and rational):
            raise ValueError("constructive certificates need a basic spec and rational x0, delta")
        result = certify_escape_rational(spec.N, args.x0, args.delta)
    else:
        result = certify_escape_search(spec, prog, depth)
    payload = {"spec": spec_to_json(spec), "x0": _fmt_point(args.x0), "delta": _fmt_point(args.delta)}
    payload.update(result.to_json())
    _emit(out, payload)
    return 0


def cmd_claim1(args, cfg, out):
    N = args.N if args.N is not None else cfg.default_N
    try:
        report = claim1_verify(N, args.x0, args.delta, args.k)
    except PreconditionUnmet as exc:
        _emit(out, {"error": "PreconditionUnmet", "message": str(exc), "failed": exc.failed,
                    "report": exc.report.to_json()})
        return 1
    _emit(out, report.to_json())
    return 0


def cmd_equidist(args, cfg, out):
    N = args.N if args.N is not None else cfg.default_N
    diag = equidist_stats(N, Progression(args.x0, args.delta), args.M, args.eps)
    if args.figure:
        from .plotting import render_equidist

        render_equidist(diag, args.figure, title=f"N={N}, M={args.M}")
    fmt = args.format or "csv"
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerows(diag.csv_rows())
        return 0
    _emit(out, {
        "N": N,
        "M": diag.M,
        "epsilon": format_exact(diag.epsilon),
        "L": diag.L,
        "counts": list(diag.counts),
        "frequencies": [format_exact(f) for f in diag.frequencies],
        "deviations": [format_exact(d) for d in diag.deviations],
    })
    return 0


def cmd_find_ap(args, cfg, out):
    witness = find_two_sided_ap(args.G, args.xi)
    payload = witness.to_json()
    if args.verify_range is not None:
        payload["verify_range"] = args.verify_range
        payload["verified"] = verify_ap_avoids(args.G, witness, args.verify_range)
    _emit(out, payload)
    return 0 if payload.get("verified", True) else 1


def cmd_choose_N(args, cfg, out):
    _emit(out, {"lambda": format_exact(args.lam), "N": choose_N_for_lambda(args.lam)})
    return 0


def cmd_plot_window(args, cfg, out):
    from .plotting import render_window, window_segments

    N = _window_N(args, cfg)
    segments = window_segments(N, args.lo, args.hi)
    if args.figure:
        render_window(segments, args.figure, title=f"S({N}) on [{args.lo}, {args.hi})")
    if _format(args, cfg) == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["lo", "hi", "cell", "residue", "member"])
        for s in segments:
            w.writerow([s["lo"], s["hi"], s["cell"], s["residue"], int(s["member"])])
        return 0
    _emit(out, {
        "N": N,
        "from": format_exact(args.lo),
        "to": format_exact(args.hi),
        "segments": [
            {**s, "lo": format_exact(s["lo"]), "hi": format_exact(s["hi"])} for s in segments
        ],
    })
    return 0


# -- plumbing ----------------------------------------------------------------


def _format(args, cfg):
    return args.format or cfg.output_format


def _emit(out, payload):
    json.dump({"schema": SCHEMA, **payload}, out)
    out.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apavoid",
        description="Exact constructions of large sets without infinite arithmetic progressions.",
    )
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("window", parents=[common], help="exact S ∩ [from, to)")
    p.add_argument("--N", type=int)
    p.add_argument("--spec", type=_spec, help="one-dimensional spec (overrides --N)")
    p.add_argument("--from", dest="lo", type=_exact, required=True)
    p.add_argument("--to", dest="hi", type=_exact, required=True)
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("check", parents=[common], help="membership of a point")
    p.add_argument("--spec", type=_spec)
    p.add_argument("--x", type=_point, required=True, help="comma-separated for products")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("escape", parents=[common], help="certificate that x0 + n*delta leaves the set")
    p.add_argument("--spec", type=_spec)
    p.add_argument("--x0", type=_point, required=True)
    p.add_argument("--delta", type=_point, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--method", choices=("auto", "constructive", "search"), default="auto")
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("claim1", parents=[common], help="fraction of terms in [beta_k/(N+1), beta_k)")
    p.add_argument("--N", type=int)
    p.add_argument("--x0", type=_fraction, required=True)
    p.add_argument("--delta", type=_fraction, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_claim1)

    p = sub.add_parser("equidist", parents=[common], help="tallies of fractional parts over Q_0..Q_{N-1}")
    p.add_argument("--N", type=int)
    p.add_argument("--x0", type=_exact, required=True)
    p.add_argument("--delta", type=_exact, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--eps", type=_fraction, required=True)
    p.add_argument("--figure", help="also write a bar chart to this path")
    p.set_defaults(func=cmd_equidist)

    p = sub.add_parser("find-ap", parents=[common], help="two-sided progression avoiding G")
    p.add_argument("--G", type=_intervals, required=True, help='JSON, e.g. [["0","1/2"]]')
    p.add_argument("--xi", type=_fraction, required=True)
    p.add_argument("--verify-range", type=int)
    p.set_defaults(func=cmd_find_ap)

    p = sub.add_parser("choose-N", parents=[common], help="smallest N with 2/N <= 1 - lambda")
    p.add_argument("--lambda", dest="lam", type=_fraction, required=True)
    p.set_defaults(func=cmd_choose_N)

    p = sub.add_parser("plot-window", parents=[common], help="kept/deleted segments of S(N) on [from, to)")
    p.add_argument("--N", type=int)
    p.add_argument("--from", dest="lo", type=_fraction, required=True)
    p.add_argument("--to", dest="hi", type=_fraction, required=True)
    p.add_argument("--figure", help="also render the segments to this image path")
    p.set_defaults(func=cmd_plot_window)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        cfg = Config.load()
    except (OSError, ValueError) as exc:
        parser.error(f"config: {exc}")
    args = parser.parse_args(argv)
    reals.DEFAULT_MAX_WIDTH = cfg.max_refine_width
    try:
        return args.func(args, cfg, out)
    except ApavoidError as exc:
        _emit(out, {"error": type(exc).__name__, "message": str(exc)})
        return 1
    except ValueError as exc:
        parser.error(str(exc))


def main(argv=None):
    sys.exit(run(argv))
