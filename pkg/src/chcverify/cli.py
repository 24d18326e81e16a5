"""chc-verify: the command-line pipeline.

    chc-verify run FILE [--no-sync] [--emit-chc[=pre]] [--dump-summaries] ...
    chc-verify oracle FILE [--k K] [--b B] [--d D]
    chc-verify bench [DIR] [--json] [--report-dir OUT] ...

Exit status of `run`: 0 SAFE, 1 UNSAFE, 2 UNKNOWN, 3 tool error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus as corpus_mod
from .backend import (EXIT_CODES, BackendError, SolverConfig, Verdict,
                      find_solver, solve)
from .encoder import EncodeError, encode_program, render_system
from .frontend import FrontendError, load_program
from .oracle import OracleConfig, run_oracle
from .report import BenchResult, render_table, to_json, write_report
from .symexec import render_summary
from .sync import apply_all

TOOL_ERROR = 3


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="chc-verify",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="verify one program")
    run_p.add_argument("file")
    run_p.add_argument("--no-sync", action="store_true",
                       help="skip the iterator synchronization transformation")
    run_p.add_argument("--emit-chc", nargs="?", const="post",
                       choices=["pre", "post"],
                       help="print the clause system (pre = before sync) and exit")
    run_p.add_argument("--dump-summaries", action="store_true",
                       help="print the branch summaries and exit")
    run_p.add_argument("--dump-smt2", metavar="PATH",
                       help="also write the solver script here")
    run_p.add_argument("--keep-smt2", action="store_true",
                       help="keep the temporary solver script")
    _solver_flags(run_p)

    oracle_p = sub.add_parser("oracle", help="bounded brute-force check")
    oracle_p.add_argument("file")
    oracle_p.add_argument("--k", type=int, default=4, help="max list length")
    oracle_p.add_argument("--b", type=int, default=4, help="integer bound")
    oracle_p.add_argument("--d", type=int, default=16, help="recursion depth cap")
    oracle_p.add_argument("--max-runs", type=int, default=200_000)

    bench_p = sub.add_parser("bench", help="run a benchmark directory")
    bench_p.add_argument("dir", nargs="?", default=None,
                         help="benchmark directory (default: shipped corpus)")
    bench_p.add_argument("--json", action="store_true", dest="as_json",
                         help="print the JSON report instead of the table")
    bench_p.add_argument("--report-dir", metavar="OUT",
                         help="write CSV/JSON and rendered figures here")
    bench_p.add_argument("--jobs", type=int, default=1)
    bench_p.add_argument("--no-oracle", action="store_true",
                         help="skip the bounded oracle cross-check")
    _solver_flags(bench_p)

    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        return cmd_bench(args)
    except (FrontendError, EncodeError, BackendError, OSError) as e:
        _print_error(e, getattr(args, "file", None))
        return TOOL_ERROR


def _solver_flags(p):
    p.add_argument("--solver", metavar="PATH",
                   help="Horn solver executable (default: z3 if present, "
                        "else the bundled chc-horn-lite)")
    p.add_argument("--engine", choices=["default", "spacer"], default="default")
    p.add_argument("--timeout", type=float, default=30.0,
                   help="solver timeout in seconds")


def _print_error(e, filename):
    if isinstance(e, FrontendError) and filename:
        print(e.located(str(filename)), file=sys.stderr)
    else:
        print(f"error: {e}", file=sys.stderr)


def _pipeline(path: Path, no_sync: bool):
    """parse -> lower -> summarize -> encode -> sync; returns systems."""
    program = load_program(path.read_text(), str(path))
    system, ctx, main = encode_program(program)
    if system is None:
        return program, None, None, ctx, main
    synced = system if no_sync else apply_all(system)
    return program, system, synced, ctx, main


def cmd_run(args) -> int:
    path = Path(args.file)
    t0 = time.monotonic()
    program, pre_system, system, ctx, main = _pipeline(path, args.no_sync)
    if pre_system is None:
        print(f"{path}: no verify directive; parse and lowering OK "
              f"({len(program.functions)} functions)")
        return 0
    for w in system.warnings:
        print(f"warning: {w}", file=sys.stderr)

    if args.dump_summaries:
        for key in ctx.order:
            inst = ctx.instances[key]
            print(f"; {inst.rel}  ({inst.fname})")
            for s in ctx.summaries[key]:
                print(render_summary(s))
        print("; main")
        print(render_summary(main.summary))
        return 0
    if args.emit_chc:
        chosen = pre_system if args.emit_chc == "pre" else system
        sys.stdout.write(render_system(chosen))
        return 0

    cfg = SolverConfig(
        solver=find_solver(args.solver) if args.solver else None,
        engine=args.engine,
        timeout=args.timeout,
        keep_smt2=args.keep_smt2,
        smt2_path=args.dump_smt2,
    )
    encode_time = time.monotonic() - t0
    verdict = solve(system, cfg)
    _report_run(path, pre_system, system, args, verdict, encode_time)
    return EXIT_CODES[verdict.outcome]


def _counts(system) -> str:
    return f"{len(system.relations)} relations, {len(system.clauses)} clauses"


def _report_run(path, pre_system, system, args, verdict: Verdict, encode_time):
    print(f"file:     {path}")
    print(f"encoding: {_counts(pre_system)}", end="")
    if system is not pre_system:
        print(f"  ->  {_counts(system)} after synchronization", end="")
        if system.sync_applied:
            print(f" ({len(system.sync_applied)} application(s))", end="")
    print()
    solver_cmd = " ".join(verdict.solver_cmd[:-1]) if verdict.solver_cmd else "?"
    print(f"solver:   {solver_cmd} (engine {args.engine}, "
          f"timeout {args.timeout:g}s)")
    print(f"times:    encode {encode_time:.2f}s, solve {verdict.wall:.2f}s")
    print(f"verdict:  {verdict.outcome}")
    if verdict.outcome == "SAFE" and verdict.model:
        print("invariant model:")
        for line in verdict.model.splitlines():
            print(f"  {line}")


def cmd_oracle(args) -> int:
    path = Path(args.file)
    program = load_program(path.read_text(), str(path))
    cfg = OracleConfig(max_list_len=args.k, int_bound=args.b,
                       max_depth=args.d, max_runs=args.max_runs)
    result = run_oracle(program, cfg)
    print(f"oracle:   {result.status}")
    print(f"runs:     {result.runs}"
          + (" (sampled: input space exceeds the run budget)"
             if result.sampled else ""))
    if result.blocked or result.assumed_out:
        print(f"skipped:  {result.assumed_out} by assume, "
              f"{result.blocked} blocked on empty-list access")
    if result.status == "VIOLATION":
        print(f"failure:  {result.what}")
        print(f"witness:  {_render_witness(result.witness)}")
        return 1
    if result.status == "DEPTH-EXCEEDED":
        print(f"depth-exceeded runs: {result.depth_exceeded}")
        return 2
    return 0


def _render_witness(witness: dict) -> str:
    parts = []
    for k, v in witness.items():
        if isinstance(v, tuple):
            parts.append(f"{k} = [{', '.join(map(str, v))}]")
        else:
            parts.append(f"{k} = {v}")
    return ", ".join(parts)


def cmd_bench(args) -> int:
    directory = Path(args.dir) if args.dir else corpus_mod.CORPUS_DIR
    entries = corpus_mod.entries(directory)
    solver_argv = find_solver(args.solver)

    def one(entry) -> BenchResult:
        t0 = time.monotonic()
        try:
            _, _, system, _, _ = _pipeline(entry.path, no_sync=False)
            if system is None:
                raise EncodeError("no verify directive")
            cfg = SolverConfig(solver=solver_argv, engine=args.engine,
                               timeout=args.timeout)
            verdict = solve(system, cfg).outcome
            detail = ""
        except (FrontendError, EncodeError, BackendError) as e:
            verdict, detail = "UNKNOWN", str(e)
        oracle_status = "-"
        if not args.no_oracle:
            try:
                program = load_program(entry.path.read_text(), str(entry.path))
                oracle_status = run_oracle(program).status
            except (FrontendError, Exception) as e:  # noqa: BLE001
                oracle_status = f"error: {e}"
        ms = (time.monotonic() - t0) * 1000
        return BenchResult(entry.name, entry.category, entry.expected,
                           verdict, oracle_status, ms, detail)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, entries))
    else:
        results = [one(e) for e in entries]

    if args.as_json:
        print(to_json(results))
    else:
        print(render_table(results))
    if args.report_dir:
        written = write_report(results, Path(args.report_dir))
        if not args.as_json:
            for p in written:
                print(f"wrote {p}")
    mismatches = [r for r in results if not r.ok]
    disagreements = [
        r for r in results
        if r.verdict == "SAFE" and r.oracle.startswith("VIOLATION")
    ]
    for r in disagreements:
        print(f"oracle disagreement on {r.name}: verifier SAFE but the "
              f"bounded oracle found a violation", file=sys.stderr)
    return 1 if (mismatches or disagreements) else 0


if __name__ == "__main__":
    sys.exit(main())
