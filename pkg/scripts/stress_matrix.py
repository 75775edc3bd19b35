#!/usr/bin/env python3
"""Compare linearizability rejection rates of the lock-protected register
and the window-short register across thread counts."""

import argparse
import time

from kslide.lincheck import check_linearizable, stress
from kslide.register import LockedSlidingRegister, WindowShortRegister


def rejection_count(threads, ops, k, histories, seed, factory) -> int:
    rejected = 0
    for i in range(histories):
        history = stress(threads, ops, k, seed=seed + i, register_factory=factory)
        if check_linearizable(history) is None:
            rejected += 1
    return rejected


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--histories", type=int, default=200, help="histories per cell")
    parser.add_argument("--ops", type=int, default=5, help="operations per thread")
    parser.add_argument("--k", type=int, default=2, help="window size")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", default="2,3,4", help="comma-separated thread counts")
    args = parser.parse_args()
    thread_counts = [int(part) for part in args.threads.split(",")]
    print(
        f"{args.histories} histories per cell, {args.ops} ops per thread, k={args.k}, "
        f"seed base {args.seed}"
    )
    for threads in thread_counts:
        t0 = time.monotonic()
        good = rejection_count(
            threads, args.ops, args.k, args.histories, args.seed, LockedSlidingRegister
        )
        bad = rejection_count(
            threads, args.ops, args.k, args.histories, args.seed, WindowShortRegister
        )
        dt = time.monotonic() - t0
        print(
            f"threads={threads}: correct register rejected {good}/{args.histories}, "
            f"window-short rejected {bad}/{args.histories} ({dt:.1f}s)"
        )


if __name__ == "__main__":
    main()
