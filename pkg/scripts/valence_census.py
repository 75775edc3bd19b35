#!/usr/bin/env python3
"""Explore the configuration graph for a window size and proposal vector,
then report valence counts and every critical configuration."""

import argparse

from kslide.sim import consensus_protocol, default_inputs
from kslide.valence import Explorer


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=2, help="window size")
    parser.add_argument("--n", type=int, default=2, help="process count")
    parser.add_argument("--inputs", help="comma-separated proposals (default 0..n-1)")
    parser.add_argument(
        "--crash-aware", action="store_true", help="also follow crash steps"
    )
    args = parser.parse_args()
    if args.inputs:
        values = [int(part) for part in args.inputs.split(",")]
        inputs = {pid: values[pid - 1] for pid in range(1, args.n + 1)}
    else:
        inputs = default_inputs(args.n)
    explorer = Explorer(
        consensus_protocol(), inputs, args.k, crash_aware=args.crash_aware
    )
    vmap = explorer.valence_map()
    print(f"root: {explorer.classify()!r}")
    print(
        f"nodes: {len(vmap.nodes)} "
        f"({vmap.bivalent_count} bivalent, {vmap.monovalent_count} monovalent)"
    )
    print(f"edges: {len(vmap.edges)}")
    criticals = explorer.find_critical()
    print(f"critical configurations: {len(criticals)}")
    for i, cc in enumerate(criticals):
        succ = ", ".join(f"p{pid} step gives {val!r}" for pid, _, val in cc.successors)
        pend = ", ".join(
            f"p{pid}: {explorer.pending(cc.config, pid)!r}"
            for pid in sorted(inputs)
            if explorer.pending(cc.config, pid) is not None
        )
        print(
            f"  [{i}] decided={cc.config.decided} "
            f"pending[{pend or 'none'}] successors[{succ or 'none'}]"
        )


if __name__ == "__main__":
    main()
