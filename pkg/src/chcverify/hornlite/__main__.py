"""Command line entry: chc-horn-lite [options] FILE -> sat/unsat/unknown."""

from __future__ import annotations

import argparse
import sys

from .parser import HornParseError, parse_script
from .solver import solve_system


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="chc-horn-lite",
        description="reference Horn solver for SMT-LIB2 HORN scripts "
                    "over linear integer arithmetic")
    ap.add_argument("file", help="input .smt2 script")
    ap.add_argument("--timeout", type=float, default=None,
                    help="soft time budget in seconds")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--max-depth", type=int, default=14,
                    help="bounded unfolding depth limit")
    ap.add_argument("--parse-only", action="store_true",
                    help="only check well-formedness; print 'parsed'")
    ap.add_argument("--verbose", action="store_true")
    args = ap.parse_args(argv)

    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    try:
        system = parse_script(text)
    except HornParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if args.parse_only:
        print("parsed")
        return 0
    result = solve_system(system, timeout=args.timeout, seed=args.seed,
                          max_depth=args.max_depth, verbose=args.verbose)
    print(result.status)
    if result.status == "sat" and system.wants_model and result.model:
        print(result.model)
    if args.verbose and result.detail:
        print(f"; {result.detail}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
