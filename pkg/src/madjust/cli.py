"""Command-line interface (``madj``).

Exit status: 0 on a positive answer, 1 when the answer is negative (set
invalid, no set exists, effect not estimable from the data), 2 on usage,
file or format errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import criteria
from .enumeration import find_min_adj_set, iter_madj
from .estimate import estimate_ipw, estimate_m_adjustment, estimate_ms_adjustment, load_csv, to_csv
from .exceptions import (
    DataFormatError,
    EstimationError,
    GraphFormatError,
    MGraphError,
    QueryError,
)
from .mgraph import parse_mgraph
from .simulate import parse_scm, sample

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2
EXIT_INTERRUPTED = 130

_CHECKERS = {
    "m": criteria.check_m_criterion,
    "math": criteria.check_m_criterion_math,
    "sufficient": criteria.check_m_sufficient,
    "adjustment": criteria.check_adjustment,
    "backdoor": criteria.check_backdoor,
}


class UsageError(Exception):
    pass


def _names(text):
    if text is None:
        return []
    return [t.strip() for t in text.split(",") if t.strip()]


def _assignment(text):
    out = {}
    for part in _names(text):
        name, eq, value = part.partition("=")
        if not eq or not name.strip() or not value.strip():
            raise UsageError(f"treatment values must look like X=1, got {part!r}")
        out[name.strip()] = value.strip()
    if not out:
        raise UsageError("--x needs at least one NAME=VALUE")
    return out


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _graph(args):
    g = parse_mgraph(_read(args.graph))
    if g.selection is not None and args.ms is False:
        # --no-ms: analyse the graph as if no selection took place
        kinds = {n: k for n, k in g.kinds.items() if n != g.selection}
        edges = [(a, b) for a, b in g.directed_edges if b != g.selection]
        g = g.replace_edges(directed=edges, nodes=kinds)
    return g


def _mode(args, g):
    return "ms" if args.ms or g.selection is not None else "m"


def _emit(obj, args):
    if args.text:
        if isinstance(obj, dict):
            for key, value in obj.items():
                print(f"{key}: {value}")
        else:
            print(obj)
    else:
        print(json.dumps(obj, sort_keys=False))


def cmd_check(args):
    g = _graph(args)
    q = criteria.make_query(g, _names(args.x), _names(args.y), _names(args.z))
    if args.criterion == "m":
        check = criteria.check_ms_criterion if _mode(args, g) == "ms" else criteria.check_m_criterion
    else:
        check = _CHECKERS[args.criterion]
    verdict = check(g, q)
    _emit(verdict.to_dict(), args)
    return EXIT_OK if verdict.valid else EXIT_NEGATIVE


def cmd_list(args):
    g = _graph(args)
    x, y = _names(args.x), _names(args.y)
    criteria.make_query(g, x, y)  # validate before streaming anything
    if args.limit is not None and args.limit < 0:
        raise UsageError("--limit must be nonnegative")
    count, truncated = 0, False
    try:
        for z in iter_madj(g, x, y, _mode(args, g)):
            if args.limit is not None and count >= args.limit:
                truncated = True
                break
            count += 1
            if args.text:
                print("{" + ", ".join(sorted(z)) + "}", flush=True)
            else:
                print(json.dumps(sorted(z)), flush=True)
    except KeyboardInterrupt:
        _emit({"count": count, "truncated": True, "interrupted": True}, args)
        return EXIT_INTERRUPTED
    _emit({"count": count, "truncated": truncated}, args)
    return EXIT_OK if count else EXIT_NEGATIVE


def cmd_min(args):
    g = _graph(args)
    best = find_min_adj_set(g, _names(args.x), _names(args.y), _mode(args, g))
    if best is None:
        _emit({"set": None, "size": None}, args)
        return EXIT_NEGATIVE
    _emit({"set": sorted(best), "size": len(best)}, args)
    return EXIT_OK


def cmd_estimate(args):
    g = _graph(args)
    d = load_csv(_read(args.data))
    x, y, z = _assignment(args.x), _names(args.y), _names(args.z)
    mode = _mode(args, g)
    if mode == "ms":
        if args.ipw:
            raise UsageError("--ipw is only available without selection")
        fn = estimate_ms_adjustment
    else:
        fn = estimate_ipw if args.ipw else estimate_m_adjustment
    try:
        est = fn(d, g, x, y, z, force=args.force, smooth=args.smooth)
    except EstimationError as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__}, args)
        return EXIT_NEGATIVE
    _emit(est.to_dict(), args)
    return EXIT_OK


def cmd_simulate(args):
    scm = parse_scm(_read(args.scm))
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    d = sample(scm, args.n, seed=args.seed)
    sys.stdout.write(to_csv(d))
    return EXIT_OK


def _add_mode(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--ms", dest="ms", action="store_true", default=None,
                       help="use the ms-variants (default when the graph has a selection node)")
    group.add_argument("--no-ms", dest="ms", action="store_false",
                       help="ignore the selection node and use the m-variants")


def _add_output(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", dest="text", action="store_false", default=False,
                       help="JSON output (default)")
    group.add_argument("--text", dest="text", action="store_true", help="plain-text output")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="madj",
        description="Covariate adjustment under missing data and selection bias.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check one covariate set")
    p.add_argument("graph")
    p.add_argument("--x", required=True, help="treatments, comma-separated")
    p.add_argument("--y", required=True, help="outcomes, comma-separated")
    p.add_argument("--z", default="", help="covariates, comma-separated")
    p.add_argument("--criterion", choices=sorted(_CHECKERS), default="m",
                   help="which criterion to apply (default: m, or ms with selection)")
    _add_mode(p)
    _add_output(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("list", help="stream every valid covariate set")
    p.add_argument("graph")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--limit", type=int, default=None, help="stop after N sets")
    _add_mode(p)
    _add_output(p)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("min", help="find a valid covariate set of minimum size")
    p.add_argument("graph")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    _add_mode(p)
    _add_output(p)
    p.set_defaults(func=cmd_min)

    p = sub.add_parser("estimate", help="estimate P(y | do(x)) from a CSV file")
    p.add_argument("graph")
    p.add_argument("data")
    p.add_argument("--x", required=True, help="treatment values, e.g. X=1,X2=0")
    p.add_argument("--y", required=True)
    p.add_argument("--z", default="")
    p.add_argument("--ipw", action="store_true", help="use the inverse-probability-weighted form")
    p.add_argument("--force", action="store_true", help="estimate even if the criterion fails")
    p.add_argument("--smooth", type=float, default=0.0, help="additive smoothing (default 0)")
    _add_mode(p)
    _add_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="sample a dataset from an SCM file")
    p.add_argument("scm")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="override the file's seed")
    p.set_defaults(func=cmd_simulate, text=False)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, MGraphError, QueryError, DataFormatError, ValueError) as exc:
        print(f"madj: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
