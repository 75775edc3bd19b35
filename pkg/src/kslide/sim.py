"""Deterministic schedule execution and exhaustive interleaving enumeration.

Protocols are described as bounded step functions over shared sliding
registers. A schedule is a sequence of Exec and Crash steps; running one is
fully deterministic, so interleavings can be enumerated and checked
exhaustively at small scale, including every crash truncation. The search
for agreement counterexamples with one participant too many lives here too.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from .consensus import check_outcome
from .lincheck import Event, History
from .register import SlidingRegister, Value, Window, first_non_bottom


class ScheduleError(ValueError):
    """A schedule step is not applicable to the current run state."""


@dataclass(frozen=True)
class Exec:
    """One atomic shared-register operation by process pid."""

    pid: int


@dataclass(frozen=True)
class Crash:
    """Permanent removal of process pid; its remaining steps never run."""

    pid: int


Step = Union[Exec, Crash]
Schedule = tuple  # tuple[Step, ...]


def format_step(step: Step) -> str:
    return f"E{step.pid}" if isinstance(step, Exec) else f"C{step.pid}"


def parse_step(text: str) -> Step:
    body = text.strip()
    if len(body) >= 2 and body[0] in "EC" and body[1:].isdigit():
        pid = int(body[1:])
        if pid >= 1:
            return Exec(pid) if body[0] == "E" else Crash(pid)
    raise ValueError(f"steps look like 'E1' or 'C2', got {text!r}")


def format_schedule(sched: Iterable[Step]) -> list[str]:
    return [format_step(s) for s in sched]


def parse_schedule(items: Iterable[str]) -> Schedule:
    return tuple(parse_step(s) for s in items)


@dataclass(frozen=True)
class WriteOp:
    reg: int
    value: Value


@dataclass(frozen=True)
class ReadOp:
    reg: int


RegisterOp = Union[WriteOp, ReadOp]


@dataclass(frozen=True)
class Protocol:
    """Bounded step-functional protocol description.

    next_op(pid, proposal, results) names the process's next shared-register
    operation given the results of its previous steps (None for a write, the
    window for a read). Once a process has taken steps_per_process steps,
    decide(pid, proposal, results) maps its results to a decision. Local
    computation is folded into the surrounding steps, so one step is exactly
    one atomic shared-register access.
    """

    name: str
    registers: int
    steps_per_process: int
    next_op: Callable[[int, Value, tuple], RegisterOp]
    decide: Callable[[int, Value, tuple], Value]


def consensus_protocol() -> Protocol:
    """The built-in two-step protocol: write the proposal, read the window,
    decide the oldest visible value."""

    def next_op(pid: int, proposal: Value, results: tuple) -> RegisterOp:
        if not results:
            return WriteOp(0, proposal)
        return ReadOp(0)

    def decide(pid: int, proposal: Value, results: tuple) -> Value:
        return first_non_bottom(results[-1])

    return Protocol(
        name="consensus",
        registers=1,
        steps_per_process=2,
        next_op=next_op,
        decide=decide,
    )


@dataclass(frozen=True)
class Configuration:
    """Canonical global state, hashable for deduplication.

    locals[pid - 1] is the tuple of step results the process has collected;
    registers[r] is a (write count, ring) pair; crashed and decided are kept
    sorted so equal states compare and hash equal.
    """

    locals: tuple
    registers: tuple
    crashed: tuple
    decided: tuple

    @property
    def n(self) -> int:
        return len(self.locals)

    def decisions(self) -> dict:
        return dict(self.decided)


def default_inputs(n: int) -> dict[int, int]:
    """Distinct proposals when the caller does not care: pid i proposes i - 1."""
    return {pid: pid - 1 for pid in range(1, n + 1)}


def _check_inputs(inputs: Mapping[int, Value]) -> None:
    n = len(inputs)
    if n == 0:
        raise ValueError("at least one process is required")
    if set(inputs) != set(range(1, n + 1)):
        raise ValueError(f"process ids must be exactly 1..{n}, got {sorted(inputs)}")


def initial_config(protocol: Protocol, inputs: Mapping[int, Value], k: int) -> Configuration:
    _check_inputs(inputs)
    empty = SlidingRegister(k).state()
    return Configuration(
        locals=((),) * len(inputs),
        registers=(empty,) * protocol.registers,
        crashed=(),
        decided=(),
    )


def pending_op(
    protocol: Protocol, inputs: Mapping[int, Value], cfg: Configuration, pid: int
) -> Optional[RegisterOp]:
    """The register operation pid would take next, or None if it crashed or
    already finished."""
    if pid in cfg.crashed:
        return None
    results = cfg.locals[pid - 1]
    if len(results) >= protocol.steps_per_process:
        return None
    return protocol.next_op(pid, inputs[pid], results)


def apply_exec(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    cfg: Configuration,
    pid: int,
) -> Configuration:
    """Run one step of pid against an immutable configuration."""
    if pid in cfg.crashed:
        raise ScheduleError(f"process {pid} crashed and cannot take steps")
    results = cfg.locals[pid - 1]
    if len(results) >= protocol.steps_per_process:
        raise ScheduleError(f"process {pid} already finished")
    op = protocol.next_op(pid, inputs[pid], results)
    if not 0 <= op.reg < len(cfg.registers):
        raise ValueError(f"protocol named unknown register {op.reg}")
    reg = SlidingRegister.from_state(k, cfg.registers[op.reg])
    if isinstance(op, WriteOp):
        reg.write(op.value)
        result = None
    else:
        result = reg.read()
    new_results = results + (result,)
    new_locals = cfg.locals[: pid - 1] + (new_results,) + cfg.locals[pid:]
    new_registers = (
        cfg.registers[: op.reg] + (reg.state(),) + cfg.registers[op.reg + 1 :]
    )
    decided = cfg.decided
    if len(new_results) == protocol.steps_per_process:
        value = protocol.decide(pid, inputs[pid], new_results)
        decided = tuple(sorted(cfg.decided + ((pid, value),)))
    return Configuration(new_locals, new_registers, cfg.crashed, decided)


def apply_crash(cfg: Configuration, pid: int) -> Configuration:
    if pid in cfg.crashed:
        raise ScheduleError(f"process {pid} crashed twice")
    if not 1 <= pid <= cfg.n:
        raise ScheduleError(f"unknown process id {pid}")
    return Configuration(
        cfg.locals, cfg.registers, tuple(sorted(cfg.crashed + (pid,))), cfg.decided
    )


@dataclass(frozen=True)
class Outcome:
    """What a schedule produced: decisions of the processes that completed,
    the crashed set, the final configuration, and optionally the register
    history of the run."""

    decisions: dict
    crashed: frozenset
    final_config: Configuration
    history: Optional[History] = None


def run_schedule(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    sched: Iterable[Step],
    record_history: bool = False,
) -> Outcome:
    """Execute a schedule deterministically against fresh registers.

    Exec steps are atomic; a Crash step removes the process. Steps that are
    not applicable (an unknown pid, a crashed or finished process taking a
    step, a second crash) raise ScheduleError. Incomplete schedules are
    fine: processes that never finish simply decide nothing.
    """
    _check_inputs(inputs)
    if record_history and protocol.registers != 1:
        raise ValueError("history recording assumes a single shared register")
    regs = [SlidingRegister(k) for _ in range(protocol.registers)]
    results: dict[int, list] = {pid: [] for pid in inputs}
    crashed: set[int] = set()
    decided: dict[int, Value] = {}
    events: list[Event] = []
    clock = 0
    for step in sched:
        pid = step.pid
        if pid not in results:
            raise ScheduleError(f"unknown process id {pid}")
        if isinstance(step, Crash):
            if pid in crashed:
                raise ScheduleError(f"process {pid} crashed twice")
            crashed.add(pid)
            continue
        if not isinstance(step, Exec):
            raise TypeError(f"not a schedule step: {step!r}")
        if pid in crashed:
            raise ScheduleError(f"process {pid} crashed and cannot take steps")
        taken = results[pid]
        if len(taken) >= protocol.steps_per_process:
            raise ScheduleError(f"process {pid} already finished")
        op = protocol.next_op(pid, inputs[pid], tuple(taken))
        if not 0 <= op.reg < len(regs):
            raise ValueError(f"protocol named unknown register {op.reg}")
        if isinstance(op, WriteOp):
            if record_history:
                events.append(Event("invoke", pid, "write", clock, value=op.value))
                clock += 1
            regs[op.reg].write(op.value)
            result = None
            if record_history:
                events.append(Event("respond", pid, "write", clock))
                clock += 1
        else:
            if record_history:
                events.append(Event("invoke", pid, "read", clock))
                clock += 1
            result = regs[op.reg].read()
            if record_history:
                events.append(Event("respond", pid, "read", clock, result=result))
                clock += 1
        taken.append(result)
        if len(taken) == protocol.steps_per_process:
            decided[pid] = protocol.decide(pid, inputs[pid], tuple(taken))
    final = Configuration(
        locals=tuple(tuple(results[pid]) for pid in sorted(results)),
        registers=tuple(r.state() for r in regs),
        crashed=tuple(sorted(crashed)),
        decided=tuple(sorted(decided.items())),
    )
    history = History(k, events) if record_history else None
    return Outcome(dict(decided), frozenset(crashed), final, history)


def _ops_map(n: int, ops_per_process) -> dict[int, int]:
    if isinstance(ops_per_process, int):
        return {pid: ops_per_process for pid in range(1, n + 1)}
    ops = dict(ops_per_process)
    if set(ops) != set(range(1, n + 1)):
        raise ValueError(f"per-process op counts must cover exactly 1..{n}")
    return ops


def _interleavings(sequences: list[tuple[int, tuple]]) -> Iterator[Schedule]:
    """All distinct interleavings of the per-process step sequences, choosing
    the smallest available pid first at every branch."""
    total = sum(len(steps) for _, steps in sequences)
    taken = [0] * len(sequences)
    prefix: list[Step] = []

    def rec() -> Iterator[Schedule]:
        if len(prefix) == total:
            yield tuple(prefix)
            return
        for i, (_, steps) in enumerate(sequences):
            if taken[i] < len(steps):
                prefix.append(steps[taken[i]])
                taken[i] += 1
                yield from rec()
                taken[i] -= 1
                prefix.pop()

    return rec()


def enumerate_schedules(
    n: int, ops_per_process=2, with_crashes: bool = False
) -> Iterator[Schedule]:
    """Yield every distinct complete schedule of n processes exactly once.

    Without crashes these are the interleavings of each process's ordered
    steps. With crashes, every schedule in which any subset of processes
    crashes at any boundary between its own steps is yielded as well: a
    process that crashes after b of its m steps contributes b Exec steps
    followed by one Crash marker. Crashing after the last step is omitted
    because it is observationally the same as completing. Order is
    deterministic: crash variants in boundary order per process, smallest
    pid first at every interleaving branch.
    """
    if n < 1:
        raise ValueError("need at least one process")
    ops = _ops_map(n, ops_per_process)
    pids = sorted(ops)
    if not with_crashes:
        yield from _interleavings(
            [(pid, (Exec(pid),) * ops[pid]) for pid in pids]
        )
        return
    variant_lists = []
    for pid in pids:
        m = ops[pid]
        variants = [(Exec(pid),) * m]
        variants.extend(
            (Exec(pid),) * b + (Crash(pid),) for b in range(m)
        )
        variant_lists.append(variants)

    def combos(i: int, chosen: list) -> Iterator[Schedule]:
        if i == len(pids):
            yield from _interleavings(list(zip(pids, chosen)))
            return
        for variant in variant_lists[i]:
            chosen.append(variant)
            yield from combos(i + 1, chosen)
            chosen.pop()

    yield from combos(0, [])


@dataclass(frozen=True)
class VerificationReport:
    schedules_checked: int
    violations: tuple  # ((schedule, PropertyReport), ...)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_all(
    protocol: Protocol,
    k: int,
    n: int,
    inputs: Optional[Mapping[int, Value]] = None,
    with_crashes: bool = False,
) -> VerificationReport:
    """Run every enumerated schedule and check the consensus properties on
    each outcome. Returns the total schedule count and all violations."""
    inputs = default_inputs(n) if inputs is None else dict(inputs)
    _check_inputs(inputs)
    count = 0
    violations = []
    for sched in enumerate_schedules(n, protocol.steps_per_process, with_crashes):
        out = run_schedule(protocol, inputs, k, sched)
        report = check_outcome(inputs, out.decisions, out.crashed)
        count += 1
        if not report.ok:
            violations.append((sched, report))
    return VerificationReport(count, tuple(violations))


def eviction_schedule(k: int, n: int) -> Schedule:
    """The canonical disagreement run for one participant too many.

    Process 1 writes and reads alone and decides its own value; the other k
    processes then write, which pushes process 1's value out of the size-k
    window; process 2 reads and decides the oldest survivor instead.
    """
    if n != k + 1:
        raise ValueError("the eviction run needs exactly k + 1 processes")
    if n < 2:
        raise ValueError("need at least two processes")
    steps = [Exec(1), Exec(1)]
    steps.extend(Exec(pid) for pid in range(2, n + 1))
    steps.append(Exec(2))
    return tuple(steps)


def find_violation(
    protocol: Protocol,
    k: int,
    n: int,
    inputs: Optional[Mapping[int, Value]] = None,
    max_results: Optional[int] = None,
) -> list[Schedule]:
    """Schedules whose outcome breaks agreement, eviction run first.

    The canonical eviction schedule is tried first when n == k + 1; after
    that every complete crash-free schedule is checked in enumeration order.
    Crash markers cannot create disagreement on their own (they only remove
    future steps), so the complete crash-free set is the exhaustive one for
    runs where every process decides.
    """
    inputs = default_inputs(n) if inputs is None else dict(inputs)
    _check_inputs(inputs)
    found: list[Schedule] = []
    seen: set[Schedule] = set()

    def violates(sched: Schedule) -> bool:
        try:
            out = run_schedule(protocol, inputs, k, sched)
        except ScheduleError:
            return False
        return not check_outcome(inputs, out.decisions, out.crashed).agreement

    if n == k + 1 and n >= 2:
        candidate = eviction_schedule(k, n)
        if violates(candidate):
            found.append(candidate)
            seen.add(candidate)
    for sched in enumerate_schedules(n, protocol.steps_per_process):
        if max_results is not None and len(found) >= max_results:
            break
        if sched in seen:
            continue
        if violates(sched):
            found.append(sched)
            seen.add(sched)
    if max_results is not None:
        return found[:max_results]
    return found


def random_schedule(
    n: int,
    ops_per_process=2,
    seed: int = 0,
    crash_probability: float = 0.0,
) -> Schedule:
    """One valid complete-or-crash-truncated schedule, deterministic in seed."""
    if not 0.0 <= crash_probability <= 1.0:
        raise ValueError("crash probability must be within [0, 1]")
    ops = _ops_map(n, ops_per_process)
    rng = random.Random(seed)
    remaining = dict(ops)
    alive = set(remaining)
    steps: list[Step] = []
    while True:
        choices = sorted(pid for pid in alive if remaining[pid] > 0)
        if not choices:
            return tuple(steps)
        pid = rng.choice(choices)
        if crash_probability > 0.0 and rng.random() < crash_probability:
            steps.append(Crash(pid))
            alive.discard(pid)
        else:
            steps.append(Exec(pid))
            remaining[pid] -= 1
