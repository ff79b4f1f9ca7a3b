"""Run a benchmark over agent counts, policies and strategies; write one CSV row per run.

    python scripts/run_matrix.py --benchmark queens8 --agents 1 2 4 8 --out queens8.csv
"""

import argparse
import itertools
import sys

from orsplit.bench import CORPUS, RunConfig, compare_with_oracle, corpus_path, emit_report, run_benchmark, sequential_oracle
from orsplit.scheduler import POLICIES, STRATEGIES


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--benchmark", choices=list(CORPUS), required=True)
    p.add_argument("--agents", type=int, nargs="+", default=[1, 2, 4, 8])
    p.add_argument("--policies", nargs="+", choices=POLICIES, default=["bottom_most"])
    p.add_argument("--strategies", nargs="+", choices=STRATEGIES, default=list(STRATEGIES))
    p.add_argument("--copying", nargs="+", choices=["incremental", "full"], default=["incremental", "full"])
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--reorder-window", type=int, default=0)
    p.add_argument("--osc", action="store_true")
    p.add_argument("--out", default="-", help="CSV file, '-' for stdout")
    args = p.parse_args(argv)

    filename, query = CORPUS[args.benchmark]
    path = corpus_path(filename)
    source = path.read_text()
    oracle = sequential_oracle(source, query)
    reports = []
    failed = 0
    for agents, policy, strategy, copying, seed in itertools.product(
        args.agents, args.policies, args.strategies, args.copying, args.seeds
    ):
        if policy == "centralized" and agents < 2:
            continue
        cfg = RunConfig(
            program=str(path),
            query=query,
            agents=agents,
            policy=policy,
            strategy=strategy,
            incremental=copying == "incremental",
            osc=args.osc,
            seed=seed,
            reorder_window=args.reorder_window,
            benchmark=args.benchmark,
        )
        report = run_benchmark(cfg, source)
        verdict = compare_with_oracle(report, oracle)
        failed += not verdict
        print(
            f"{args.benchmark} agents={agents} {policy} {strategy} {copying} seed={seed}: "
            f"{report.solution_count} solutions, {report.bytes_total} bytes, {report.wall_ms / 1000:.2f} s"
            + ("" if verdict else "  FAIL " + "; ".join(verdict.reasons)),
            file=sys.stderr,
        )
        reports.append(report)
    text = emit_report(reports, "csv", None if args.out == "-" else args.out)
    if args.out == "-":
        sys.stdout.write(text)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
