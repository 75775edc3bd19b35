#!/usr/bin/env python3
"""Sweep window sizes: confirm agreement over every schedule with n = k
participants, then show the schedule that breaks agreement at n = k + 1."""

import argparse
import time

from kslide.sim import (
    consensus_protocol,
    default_inputs,
    find_violation,
    format_schedule,
    run_schedule,
    verify_all,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-k", type=int, default=3, help="largest window size to sweep")
    parser.add_argument(
        "--crashes", action="store_true", help="include crash truncations in the clean sweep"
    )
    args = parser.parse_args()
    protocol = consensus_protocol()
    for k in range(1, args.max_k + 1):
        t0 = time.monotonic()
        rep = verify_all(protocol, k, k, with_crashes=args.crashes)
        dt = time.monotonic() - t0
        print(
            f"k={k} n={k}: {rep.schedules_checked} schedules checked, "
            f"{len(rep.violations)} violations ({dt:.2f}s)"
        )
        n = k + 1
        scheds = find_violation(protocol, k, n, max_results=1)
        if scheds:
            out = run_schedule(protocol, default_inputs(n), k, scheds[0])
            decisions = ", ".join(f"p{p}={v}" for p, v in sorted(out.decisions.items()))
            print(
                f"k={k} n={n}: disagreement via "
                f"{','.join(format_schedule(scheds[0]))} giving {decisions}"
            )
        else:
            print(f"k={k} n={n}: no violation found")


if __name__ == "__main__":
    main()
