"""Command line: ``orsplit run`` and ``orsplit oracle``.

Exit status is 0 when the run matches the sequential oracle, 1 when it does
not, and 2 on errors (unreadable program, parse error, protocol failure).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import CORPUS, RunConfig, compare_with_oracle, corpus_path, emit_report, run_benchmark, sequential_oracle
from .parser import ParseError
from .scheduler import POLICIES, STRATEGIES


def _program_path(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    shipped = corpus_path(arg if arg.endswith(".pl") else arg + ".pl")
    if shipped.exists():
        return shipped
    raise FileNotFoundError(f"no such program: {arg}")


def _resolve(args):
    if args.benchmark:
        if args.benchmark not in CORPUS:
            raise ValueError(f"unknown benchmark {args.benchmark!r}; choose from {', '.join(CORPUS)}")
        filename, query = CORPUS[args.benchmark]
        return corpus_path(filename), args.query or query, args.benchmark
    if not args.program or not args.query:
        raise ValueError("give --program and --query, or --benchmark")
    path = _program_path(args.program)
    return path, args.query, path.stem


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orsplit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def source_args(sp):
        sp.add_argument("--program", help="Prolog source file (or the name of a shipped corpus file)")
        sp.add_argument("--query", help="goal to solve, e.g. 'queens(8, Q)'")
        sp.add_argument("--benchmark", help="shipped instance: " + ", ".join(CORPUS))

    run = sub.add_parser("run", help="run a query on N agents and check it against the sequential engine")
    source_args(run)
    run.add_argument("--agents", type=int, default=1)
    run.add_argument("--policy", choices=POLICIES, default="bottom_most")
    run.add_argument("--strategy", choices=STRATEGIES, default="vertical_block")
    run.add_argument("--ratio", type=float, default=0.5, help="share kept by the giver under vertical_block")
    run.add_argument("--threshold", type=int, default=2, help="minimum load for a busy agent to share")
    run.add_argument("--poll-frequency", type=int, default=200, help="reductions between message checks")
    run.add_argument("--osc", action="store_true", help="execute side-effects in sequential order")
    run.add_argument("--first-solution", action="store_true")
    run.add_argument("--incremental", action=argparse.BooleanOptionalAction, default=True)
    run.add_argument("--gc-period", type=int, default=None, help="invalidate labels after every N sharings")
    run.add_argument("--delay-termination", action="store_true")
    run.add_argument("--load-propagation", choices=("sharing", "periodic"), default="sharing")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--reorder-window", type=int, default=0, help="max random delivery delay, in ticks")
    run.add_argument("--threaded", action="store_true", help="one thread per agent instead of lockstep")
    run.add_argument("--csv", metavar="OUT", help="write a CSV report ('-' for stdout)")
    run.add_argument("--no-check", action="store_true", help="skip the sequential oracle comparison")
    run.add_argument("--show-output", action="store_true", help="print the program's own output")

    oracle = sub.add_parser("oracle", help="run a query sequentially and print its answers and output")
    source_args(oracle)
    oracle.add_argument("--limit", type=int, default=None)
    return p


def _cmd_run(args) -> int:
    path, query, name = _resolve(args)
    config = RunConfig(
        program=str(path),
        query=query,
        agents=args.agents,
        policy=args.policy,
        strategy=args.strategy,
        ratio=args.ratio,
        threshold=args.threshold,
        poll_frequency=args.poll_frequency,
        osc=args.osc,
        first_solution=args.first_solution,
        seed=args.seed,
        incremental=args.incremental,
        gc_invalidation_period=args.gc_period,
        delay_termination=args.delay_termination,
        load_propagation=args.load_propagation,
        reorder_window=args.reorder_window,
        threaded=args.threaded,
        benchmark=name,
    )
    source = path.read_text()
    report = run_benchmark(config, source)
    if args.show_output:
        sys.stdout.write(report.side_effect_output)
    if args.csv == "-":
        sys.stdout.write(emit_report(report, "csv"))
    else:
        sys.stdout.write(emit_report(report, "text"))
        if args.csv:
            emit_report(report, "csv", args.csv)
    if args.no_check:
        return 0
    verdict = compare_with_oracle(report, sequential_oracle(source, query))
    for reason in verdict.reasons:
        print(f"FAIL: {reason}", file=sys.stderr)
    print("verdict: " + ("pass" if verdict else "fail"), file=sys.stderr)
    return 0 if verdict else 1


def _cmd_oracle(args) -> int:
    path, query, _ = _resolve(args)
    oracle = sequential_oracle(path.read_text(), query, limit=args.limit)
    for answer in oracle.solutions:
        print(answer)
    sys.stdout.write(oracle.output)
    print(f"{len(oracle.solutions)} answers", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_oracle(args)
    except (OSError, ParseError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
