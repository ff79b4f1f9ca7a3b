"""Payload bytes of incremental versus complete copying at the same seeds.

For each seed both modes run the same benchmark in lockstep mode; the table
lists sharing counts, total Reply_With_Work bytes and bytes per sharing.

    python scripts/compare_copying.py --program hamilton.pl --query 'cycle(P)' --agents 4 --seeds 0 1 2
"""

import argparse
import sys

from orsplit.bench import RunConfig, corpus_path, run_benchmark


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--program", default="hamilton.pl", help="corpus file name or path")
    p.add_argument("--query", default="cycle(P)")
    p.add_argument("--agents", type=int, default=4)
    p.add_argument("--strategy", default="horizontal")
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3])
    p.add_argument("--reorder-window", type=int, default=2)
    args = p.parse_args(argv)

    path = corpus_path(args.program)
    if not path.exists():
        path = args.program
    print(f"{'seed':>4} {'mode':>11} {'sharings':>8} {'bytes':>8} {'per share':>9}")
    for seed in args.seeds:
        for incremental in (True, False):
            r = run_benchmark(
                RunConfig(
                    program=str(path),
                    query=args.query,
                    agents=args.agents,
                    strategy=args.strategy,
                    incremental=incremental,
                    seed=seed,
                    reorder_window=args.reorder_window,
                )
            )
            shares = r.sharings_full + r.sharings_incremental
            size = r.message_bytes.get("Reply_With_Work", 0)
            mode = "incremental" if incremental else "full"
            print(f"{seed:>4} {mode:>11} {shares:>8} {size:>8} {size / max(shares, 1):>9.0f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
