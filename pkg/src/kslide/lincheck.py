"""Linearizability checking of concurrent register histories.

A history is a timestamped list of invocation and response events collected
from real threads. The checker searches for a total order of the completed
operations that respects real-time precedence and replays correctly against
the sequential sliding-register semantics. A threaded stress driver that
produces such histories lives here as well.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from typing import Callable, List, Optional

from .register import BOTTOM, LockedSlidingRegister, SlidingRegister, Value, Window


class MalformedHistoryError(ValueError):
    """The event list is structurally broken, independent of linearizability."""


@dataclass(frozen=True)
class Event:
    """One invocation or response boundary.

    kind is "invoke" or "respond"; op is "write" or "read". A write invoke
    carries the written value; a read respond carries the returned window.
    timestamp is a global monotonic order index, not wall-clock time.
    """

    kind: str
    pid: int
    op: str
    timestamp: int
    value: Value = None
    result: Optional[Window] = None


@dataclass
class History:
    k: int
    events: List[Event] = field(default_factory=list)

    def validate(self) -> None:
        """Raise MalformedHistoryError unless events form per-process
        alternating invoke/respond pairs with strictly increasing timestamps.
        Pending invocations at the end of the history are allowed."""
        last_ts = None
        open_ops: dict[int, Event] = {}
        for ev in self.events:
            if ev.kind not in ("invoke", "respond"):
                raise MalformedHistoryError(f"unknown event kind {ev.kind!r}")
            if ev.op not in ("write", "read"):
                raise MalformedHistoryError(f"unknown operation {ev.op!r}")
            if last_ts is not None and ev.timestamp <= last_ts:
                raise MalformedHistoryError(
                    f"timestamps must increase strictly, got {ev.timestamp} after {last_ts}"
                )
            last_ts = ev.timestamp
            if ev.kind == "invoke":
                if ev.pid in open_ops:
                    raise MalformedHistoryError(
                        f"process {ev.pid} invoked while an operation is open"
                    )
                if ev.op == "write" and (ev.value is None or ev.value is BOTTOM):
                    raise MalformedHistoryError("write invocation needs a real value")
                open_ops[ev.pid] = ev
            else:
                started = open_ops.pop(ev.pid, None)
                if started is None or started.op != ev.op:
                    raise MalformedHistoryError(
                        f"response without matching invocation for process {ev.pid}"
                    )
                if ev.op == "read" and not isinstance(ev.result, tuple):
                    raise MalformedHistoryError("read response needs a window tuple")

    def operations(self) -> "list[OpRecord]":
        """Pair events into operation records, ordered by invocation time."""
        self.validate()
        ops: list[OpRecord] = []
        open_idx: dict[int, int] = {}
        for ev in self.events:
            if ev.kind == "invoke":
                open_idx[ev.pid] = len(ops)
                ops.append(
                    OpRecord(ev.pid, ev.op, ev.value, None, ev.timestamp, None)
                )
            else:
                i = open_idx.pop(ev.pid)
                base = ops[i]
                ops[i] = OpRecord(
                    base.pid, base.op, base.value, ev.result, base.invoked, ev.timestamp
                )
        return ops


@dataclass(frozen=True)
class OpRecord:
    pid: int
    op: str
    value: Value
    result: Optional[Window]
    invoked: int
    responded: Optional[int]

    @property
    def pending(self) -> bool:
        return self.responded is None


def check_linearizable(history: History) -> Optional[List[OpRecord]]:
    """Witness linearization of a history, or None if there is none.

    Depth-first search over linearization orders. An operation becomes a
    candidate once every completed operation that responded before it was
    invoked has been placed. Writes replay unconditionally; a read is kept
    only when the sequential register would return exactly the recorded
    window. Visited (placed-set, register-state) pairs are memoized.

    Completed operations must all be placed. Pending writes at the end of
    the history may or may not have taken effect, so both branches are
    explored; pending reads returned nothing and constrain nothing, so they
    are dropped.
    """
    ops = history.operations()
    usable = [o for o in ops if not o.pending or o.op == "write"]
    must = frozenset(i for i, o in enumerate(usable) if not o.pending)
    preds = []
    for o in usable:
        preds.append(
            frozenset(
                j
                for j, p in enumerate(usable)
                if not p.pending and p.responded < o.invoked
            )
        )
    k = history.k
    start = SlidingRegister(k).state()
    seen: set[tuple] = set()

    def dfs(placed: frozenset, reg_state: tuple, order: list) -> Optional[list]:
        if must <= placed:
            return list(order)
        key = (placed, reg_state)
        if key in seen:
            return None
        seen.add(key)
        for i, op in enumerate(usable):
            if i in placed or not preds[i] <= placed:
                continue
            reg = SlidingRegister.from_state(k, reg_state)
            if op.op == "write":
                reg.write(op.value)
            elif reg.read() != op.result:
                continue
            found = dfs(placed | {i}, reg.state(), order + [op])
            if found is not None:
                return found
        return None

    return dfs(frozenset(), start, [])


class _TickCounter:
    """Global monotonic order index shared by the stress threads. The lock
    guards only the increment, never the register operation being timed."""

    def __init__(self) -> None:
        self._n = 0
        self._lock = threading.Lock()

    def tick(self) -> int:
        with self._lock:
            n = self._n
            self._n += 1
            return n


def stress(
    threads: int,
    ops_per_thread: int,
    k: int,
    seed: int = 0,
    register_factory: Callable[[int], object] = LockedSlidingRegister,
) -> History:
    """Drive one shared register from real threads and record the history.

    Each thread runs a seeded half-read half-write operation mix, so the
    per-thread sequences are reproducible even though the interleaving is up
    to the operating system scheduler. Written values are distinct across
    the whole run, which keeps windows unambiguous for the checker.
    """
    if threads < 2:
        raise ValueError("stress needs at least 2 threads")
    if ops_per_thread < 1:
        raise ValueError("each thread must run at least one operation")
    reg = register_factory(k)
    clock = _TickCounter()
    per_thread: dict[int, list[Event]] = {pid: [] for pid in range(1, threads + 1)}

    def worker(pid: int) -> None:
        rng = random.Random(seed * 1_000_003 + pid)
        out = per_thread[pid]
        for i in range(ops_per_thread):
            if rng.random() < 0.5:
                out.append(Event("invoke", pid, "read", clock.tick()))
                window = reg.read()
                out.append(Event("respond", pid, "read", clock.tick(), result=window))
            else:
                value = pid * 1000 + i
                out.append(Event("invoke", pid, "write", clock.tick(), value=value))
                reg.write(value)
                out.append(Event("respond", pid, "write", clock.tick()))

    workers = [
        threading.Thread(target=worker, args=(pid,)) for pid in per_thread
    ]
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    events = sorted(
        (ev for evs in per_thread.values() for ev in evs), key=lambda e: e.timestamp
    )
    history = History(k, events)
    history.validate()
    return history
