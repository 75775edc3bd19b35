"""Command-line harness.

Subcommands: verify (exhaustive schedule checking, or replay of one
schedule), violate (agreement counterexample with one participant too
many), valence (configuration-graph export), and lincheck (threaded stress
histories through the linearizability checker, or re-checking a saved
history file). Exit codes: 0 when every checked property holds, 1 when a
violation was found, 2 on usage or structural errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from collections import defaultdict
from typing import Optional

from .consensus import check_outcome
from .lincheck import check_linearizable, stress
from .register import LockedSlidingRegister, WindowShortRegister
from .sim import (
    consensus_protocol,
    default_inputs,
    find_violation,
    format_schedule,
    format_step,
    parse_schedule,
    run_schedule,
    verify_all,
)
from .trace import (
    HistoryEventRecord,
    ScheduleRecord,
    TraceError,
    ValenceNodeRecord,
    history_from_records,
    history_to_records,
    outcome_record,
    read_records,
    serialize,
    violation_record,
    write_records,
)
from .valence import Explorer, sorted_values

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

REGISTER_FACTORIES = {
    None: LockedSlidingRegister,
    "window-short": WindowShortRegister,
}


def _default_seed() -> int:
    raw = os.environ.get("KSLIDE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"KSLIDE_SEED must be an integer, got {raw!r}")


def _parse_inputs(text: Optional[str], n: int) -> dict:
    if text is None:
        return default_inputs(n)
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise ValueError(f"--inputs takes comma-separated integers, got {text!r}")
    if len(values) != n:
        raise ValueError(f"--inputs needs {n} values, got {len(values)}")
    return {pid: values[pid - 1] for pid in range(1, n + 1)}


def _require_positive(name: str, value: int) -> int:
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {value}")
    return value


def _emit(records, output: Optional[str]) -> None:
    if output:
        write_records(output, records)


def cmd_verify(args) -> int:
    k = _require_positive("--k", args.k)
    n = _require_positive("--n", args.n)
    inputs = _parse_inputs(args.inputs, n)
    protocol = consensus_protocol()
    if args.schedule is not None:
        sched = parse_schedule(args.schedule.split(","))
        out = run_schedule(protocol, inputs, k, sched)
        records = [ScheduleRecord(tuple(format_schedule(sched))), outcome_record(out)]
        for record in records:
            print(serialize(record))
        _emit(records, args.output)
        report = check_outcome(inputs, out.decisions, out.crashed)
        print(
            "properties: "
            f"validity={report.validity} agreement={report.agreement} "
            f"termination={report.termination}"
        )
        return EXIT_OK if report.ok else EXIT_VIOLATION
    report = verify_all(protocol, k, n, inputs, with_crashes=args.crashes)
    label = (
        "schedules including crash truncations" if args.crashes else "crash-free schedules"
    )
    print(f"{report.schedules_checked} {label}, {len(report.violations)} violations")
    records = []
    for sched, prop in report.violations:
        failed = [
            name
            for name, held in (
                ("validity", prop.validity),
                ("agreement", prop.agreement),
                ("termination", prop.termination),
            )
            if not held
        ]
        print(f"violation: {','.join(format_schedule(sched))} breaks {','.join(failed)}")
        records.append(
            violation_record(k, n, inputs, sched, run_schedule(protocol, inputs, k, sched))
        )
    _emit(records, args.output)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def cmd_violate(args) -> int:
    k = _require_positive("--k", args.k)
    n = k + 1
    inputs = _parse_inputs(args.inputs, n)
    if args.max is not None:
        _require_positive("--max", args.max)
    protocol = consensus_protocol()
    scheds = find_violation(protocol, k, n, inputs, max_results=args.max)
    if not scheds:
        print("no agreement violation found")
        return EXIT_OK
    records = []
    for sched in scheds:
        out = run_schedule(protocol, inputs, k, sched)
        print(f"schedule: {','.join(format_schedule(sched))}")
        for pid, value in sorted(out.decisions.items()):
            print(f"  p{pid} decides {value}")
        records.append(violation_record(k, n, inputs, sched, out))
    _emit(records, args.output)
    return EXIT_VIOLATION


def _valence_records(vmap, critical_configs) -> list[ValenceNodeRecord]:
    ids = vmap.node_ids()
    edges_by_src = defaultdict(list)
    for src, step, dst in vmap.edges:
        edges_by_src[ids[src]].append((format_step(step), ids[dst]))
    critical_ids = {ids[cc.config] for cc in critical_configs}
    records = []
    for cfg, i in ids.items():
        valence = vmap.nodes[cfg]
        records.append(
            ValenceNodeRecord(
                node=i,
                values=sorted_values(valence.values),
                critical=i in critical_ids,
                decided=cfg.decided,
                edges=tuple(edges_by_src.get(i, ())),
            )
        )
    return records


def _valence_dot(vmap, critical_configs) -> str:
    ids = vmap.node_ids()
    critical_ids = {ids[cc.config] for cc in critical_configs}
    lines = ["digraph valence {"]
    for cfg, i in ids.items():
        attrs = [f'label="{vmap.nodes[cfg]!r}"']
        if i in critical_ids:
            attrs.append("peripheries=2")
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for src, step, dst in vmap.edges:
        lines.append(f'  n{ids[src]} -> n{ids[dst]} [label="{format_step(step)}"];')
    lines.append("}")
    return "\n".join(lines)


def cmd_valence(args) -> int:
    k = _require_positive("--k", args.k)
    n = _require_positive("--n", args.n)
    inputs = _parse_inputs(args.inputs, n)
    explorer = Explorer(consensus_protocol(), inputs, k, crash_aware=args.crash_aware)
    vmap = explorer.valence_map()
    critical = explorer.find_critical()
    broken_edges = [
        (src, step, dst)
        for src, step, dst in vmap.edges
        if not explorer.reachable_decisions(dst) <= explorer.reachable_decisions(src)
    ]
    if args.format == "json":
        records = _valence_records(vmap, critical)
        for record in records:
            print(serialize(record))
        _emit(records, args.output)
    elif args.format == "dot":
        text = _valence_dot(vmap, critical)
        print(text)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
    else:
        print(f"root: {explorer.classify()!r}")
        print(
            f"nodes: {len(vmap.nodes)} "
            f"({vmap.bivalent_count} bivalent, {vmap.monovalent_count} monovalent)"
        )
        print(f"critical configurations: {len(critical)}")
    if broken_edges:
        print(f"error: {len(broken_edges)} edges gained decision values", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_lincheck_stress(args) -> int:
    threads = _require_positive("--threads", args.threads)
    ops = _require_positive("--ops", args.ops)
    k = _require_positive("--k", args.k)
    histories = _require_positive("--histories", args.histories)
    seed = args.seed if args.seed is not None else _default_seed()
    factory = REGISTER_FACTORIES[args.mutant]
    failures = 0
    first_failing = None
    last = None
    for i in range(histories):
        history = stress(threads, ops, k, seed=seed + i, register_factory=factory)
        last = history
        if check_linearizable(history) is None:
            failures += 1
            if first_failing is None:
                first_failing = history
    print(f"{histories} histories checked, {failures} non-linearizable")
    if args.save:
        chosen = first_failing if first_failing is not None else last
        write_records(args.save, history_to_records(chosen))
        print(f"saved history to {args.save}")
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_lincheck_file(args) -> int:
    records = read_records(args.path)
    for record in records:
        if not isinstance(record, HistoryEventRecord):
            raise TraceError(f"history files hold history-event records, got {record!r}")
    history = history_from_records(records)
    witness = check_linearizable(history)
    if witness is None:
        print("not linearizable")
        return EXIT_VIOLATION
    print(f"linearizable ({len(witness)} operations ordered)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kslide",
        description="Sliding-window register verification harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser(
        "verify", help="check consensus properties over exhaustive schedules"
    )
    p_verify.add_argument("--k", type=int, required=True, help="window size")
    p_verify.add_argument("--n", type=int, required=True, help="process count")
    p_verify.add_argument("--inputs", help="comma-separated proposals, one per process")
    p_verify.add_argument(
        "--crashes", action="store_true", help="also enumerate crash truncations"
    )
    p_verify.add_argument(
        "--schedule", help="replay one schedule (comma-separated steps like E1,E2)"
    )
    p_verify.add_argument("--output", help="write trace records to this file")
    p_verify.set_defaults(func=cmd_verify)

    p_violate = sub.add_parser(
        "violate", help="produce an agreement violation with k + 1 processes"
    )
    p_violate.add_argument("--k", type=int, required=True, help="window size")
    p_violate.add_argument(
        "--inputs", help="comma-separated proposals for the k + 1 processes"
    )
    p_violate.add_argument(
        "--max", type=int, default=1, help="how many violating schedules to report"
    )
    p_violate.add_argument("--output", help="write trace records to this file")
    p_violate.set_defaults(func=cmd_violate)

    p_valence = sub.add_parser(
        "valence", help="explore and export the configuration graph"
    )
    p_valence.add_argument("--k", type=int, required=True, help="window size")
    p_valence.add_argument("--n", type=int, required=True, help="process count")
    p_valence.add_argument("--inputs", help="comma-separated proposals")
    p_valence.add_argument(
        "--format", choices=("text", "dot", "json"), default="text"
    )
    p_valence.add_argument(
        "--crash-aware", action="store_true", help="include crash steps as edges"
    )
    p_valence.add_argument("--output", help="write the export to this file")
    p_valence.set_defaults(func=cmd_valence)

    p_lincheck = sub.add_parser(
        "lincheck", help="linearizability checking of register histories"
    )
    lincheck_sub = p_lincheck.add_subparsers(dest="mode", required=True)

    p_stress = lincheck_sub.add_parser(
        "stress", help="generate histories from real threads and check them"
    )
    p_stress.add_argument("--threads", type=int, default=4)
    p_stress.add_argument("--ops", type=int, default=5, help="operations per thread")
    p_stress.add_argument("--k", type=int, default=2, help="window size")
    p_stress.add_argument(
        "--seed", type=int, default=None, help="base seed (default: $KSLIDE_SEED or 0)"
    )
    p_stress.add_argument("--histories", type=int, default=1000)
    p_stress.add_argument(
        "--mutant",
        choices=tuple(name for name in REGISTER_FACTORIES if name),
        default=None,
        help="stress a deliberately broken register instead",
    )
    p_stress.add_argument("--save", help="write one history (first failing, else last)")
    p_stress.set_defaults(func=cmd_lincheck_stress)

    p_file = lincheck_sub.add_parser("file", help="re-check a saved history")
    p_file.add_argument("--path", required=True)
    p_file.set_defaults(func=cmd_lincheck_file)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
