"""Command line interface: ``imds <command> ...``.

Machine-readable output goes to stdout, diagnostics to stderr. The exit
status is 0 only when the command succeeded and its verdict is affirmative.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .enumerator import (SearchJob, checkpoint_resume, enumerate_representatives,
                         iter_class)
from .errors import (CheckpointError, FieldError, NotInvolutoryError, NotMDSError,
                     SingularMatrixError)
from .field import GF
from .forms import RepTuple, build_representative, canonicalize, I4
from .matrix import (flatten, format_matrix, in_L4, is_involutory, is_mds_full, mat_add,
                     parse_matrix, rank, row_col_sums_one)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def make_field(m: int, poly: str | None) -> GF:
    if poly is None:
        poly = os.environ.get(f"IMDS_DEFAULT_POLY_{m}")
    return GF(m, poly)


def _read_matrix(F: GF, path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_matrix(F, text)


def _hex_list(F: GF, values, alpha: bool = False) -> list[str]:
    return [F.format(v, alpha) for v in values]


def cmd_field_info(args) -> int:
    F = make_field(args.m, args.poly)
    info = {
        "m": F.m,
        "poly": f"{F.poly:#x}",
        "order": F.order,
        "units": F.n_units,
        "generator": F.format(F.generator),
        "antilog": [F.format(F.antilog(k)) for k in range(F.n_units)],
    }
    print(_dumps(info))
    return EXIT_OK


def cmd_make_rep(args) -> int:
    F = make_field(args.m, args.poly)
    parts = [s for s in args.tuple.split(",") if s.strip()]
    if len(parts) != 5:
        print("error: --tuple needs five comma-separated elements p,q,r,c,d", file=sys.stderr)
        return EXIT_USAGE
    t = RepTuple(*F.parse_many(parts))
    R = build_representative(F, t)
    if not t.mds_viable(F):
        print("warning: not MDS-viable (needs r != pq and d != 1)", file=sys.stderr)
    print(format_matrix(F, R, args.alpha))
    return EXIT_OK


def cmd_check(args) -> int:
    F = make_field(args.m, args.poly)
    M = _read_matrix(F, args.matrix)
    invol = is_involutory(F, M)
    verdict = {
        "involutory": invol,
        "mds": is_mds_full(F, M),
        "row_col_sums_one": row_col_sums_one(F, M),
        "in_L4": in_L4(F, M),
        "rank_M_plus_I": rank(F, mat_add(F, M, I4)),
    }
    if args.json:
        print(_dumps(verdict))
    else:
        yn = {True: "yes", False: "no"}
        print(f"involutory: {yn[verdict['involutory']]}")
        print(f"MDS: {yn[verdict['mds']]}")
        print(f"row-col-sums-1: {yn[verdict['row_col_sums_one']]}")
        print(f"rank(M+I): {verdict['rank_M_plus_I']}")
    return EXIT_OK if invol and verdict["mds"] else EXIT_NEGATIVE


def cmd_canonicalize(args) -> int:
    F = make_field(args.m, args.poly)
    M = _read_matrix(F, args.matrix)
    try:
        R, D, t = canonicalize(F, M, verify=args.verify)
    except (NotInvolutoryError, NotMDSError, SingularMatrixError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    print(_dumps({
        "R": _hex_list(F, flatten(R), args.alpha),
        "D": _hex_list(F, D, args.alpha),
        "tuple": _hex_list(F, t, args.alpha),
    }))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    F = make_field(args.m, args.poly)
    if args.mode == "all" and F.m >= 6 and not args.force:
        print("error: --mode all for m >= 6 emits an enormous stream; pass --force",
              file=sys.stderr)
        return EXIT_USAGE
    if args.resume and not args.checkpoint:
        print("error: --resume needs --checkpoint", file=sys.stderr)
        return EXIT_USAGE

    job = SearchJob(F, mode=args.mode, start=args.start, stop=args.stop,
                    checkpoint_interval=args.checkpoint_interval)
    if args.resume and Path(args.checkpoint).exists():
        job = checkpoint_resume(job, args.checkpoint)
        print(f"resuming at tuple {job.cursor}", file=sys.stderr)

    poly = f"{F.poly:#x}"
    out = sys.stdout
    sink = None
    if args.mode == "reps":
        def sink(t, R):
            out.write(_dumps({"m": F.m, "poly": poly, "tuple": _hex_list(F, t),
                              "matrix": _hex_list(F, flatten(R))}) + "\n")
    elif args.mode == "all":
        def sink(t, R):
            tup = _hex_list(F, t)
            for D, M in iter_class(F, R):
                out.write(_dumps({"m": F.m, "poly": poly, "tuple": tup,
                                  "diag": _hex_list(F, D),
                                  "matrix": _hex_list(F, flatten(M))}) + "\n")

    report = enumerate_representatives(job, sink, jobs=args.jobs, checkpoint=args.checkpoint,
                                       max_tuples=args.max_tuples, verify=args.verify)
    summary = report.to_dict()
    elapsed = summary.pop("elapsed")
    if args.mode == "count":
        print(_dumps(summary))
    else:
        print(_dumps(summary), file=sys.stderr)
    print(f"elapsed {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imds", description="4x4 involutory MDS matrices over GF(2^m)")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def field_args(p):
        p.add_argument("-m", type=int, required=True, choices=range(3, 9), metavar="{3..8}",
                       help="field degree")
        p.add_argument("--poly", help="irreducible polynomial as hex bits, e.g. 0x13")

    p = sub.add_parser("field-info", help="print field parameters and tables")
    field_args(p)
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("make-rep", help="build the representative for a tuple p,q,r,c,d")
    field_args(p)
    p.add_argument("-t", "--tuple", required=True, help="e.g. a^0,a^0,a^1,a^1,a^1")
    p.add_argument("--alpha", action="store_true", help="print entries as a^k")
    p.set_defaults(func=cmd_make_rep)

    p = sub.add_parser("check", help="test a matrix for involution / MDS / row sums / rank")
    field_args(p)
    p.add_argument("matrix", help="file with 16 elements, or - for stdin")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("canonicalize", help="find representative R and D with D^-1 R D = M")
    field_args(p)
    p.add_argument("matrix", help="file with 16 elements, or - for stdin")
    p.add_argument("--alpha", action="store_true")
    p.add_argument("--verify", action="store_true", help="re-check the result")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("enumerate", help="search all class representatives")
    field_args(p)
    p.add_argument("--mode", choices=("count", "reps", "all"), default="count")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint", help="checkpoint file path")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--checkpoint-interval", type=int, default=1 << 30)
    p.add_argument("--start", type=int, default=0, help="first tuple index")
    p.add_argument("--stop", type=int, default=None, help="one past the last tuple index")
    p.add_argument("--max-tuples", type=int, default=None,
                   help="stop (and checkpoint) after this many tuples")
    p.add_argument("--force", action="store_true")
    p.add_argument("--verify", action="store_true",
                   help="full structural check of every emitted representative")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK
    except (FieldError, CheckpointError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
