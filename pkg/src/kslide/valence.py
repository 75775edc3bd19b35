"""Configuration-graph analysis for bounded protocols.

For a protocol, proposals, and window size, every reachable configuration
has a decision set: the values some process can still end up deciding in
some schedule extension. A configuration is monovalent when that set is a
singleton and bivalent when both outcomes remain possible. This module
computes decision sets exhaustively with memoization, classifies
configurations, finds critical ones (bivalent, but every next operation
forces monovalence), exports the whole graph, and checks whether pending
operations commute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .register import Value
from .sim import (
    Configuration,
    Crash,
    Exec,
    Protocol,
    Schedule,
    Step,
    apply_crash,
    apply_exec,
    initial_config,
    pending_op,
)


class ExplorationBoundError(RuntimeError):
    """The protocol exceeds the explorer's per-process step bound."""


def sorted_values(values) -> tuple:
    """Deterministic ordering for decision values, with a repr fallback for
    values that do not compare with each other."""
    try:
        return tuple(sorted(values))
    except TypeError:
        return tuple(sorted(values, key=repr))


@dataclass(frozen=True)
class Valence:
    """Decision set of a configuration."""

    values: frozenset

    @property
    def monovalent(self) -> bool:
        return len(self.values) == 1

    @property
    def bivalent(self) -> bool:
        return len(self.values) >= 2

    @property
    def value(self) -> Value:
        if not self.monovalent:
            raise ValueError("only a monovalent configuration has one value")
        return next(iter(self.values))

    def __repr__(self) -> str:
        if self.monovalent:
            return f"Monovalent({self.value!r})"
        if self.bivalent:
            inner = ", ".join(repr(v) for v in sorted_values(self.values))
            return f"Bivalent({{{inner}}})"
        return "Valence(none)"


@dataclass(frozen=True)
class CriticalConfig:
    """A bivalent configuration whose every Exec successor is monovalent.

    successors lists (pid, successor configuration, successor valence) in
    pid order. It is empty when no process can take a step anymore, which
    happens only in runs that already decided two different values.
    """

    config: Configuration
    successors: tuple


@dataclass
class ValenceMap:
    """Exported configuration graph: nodes in discovery order with their
    valences, and edges labeled by the step that produced them."""

    root: Configuration
    nodes: dict  # Configuration -> Valence
    edges: list  # (source Configuration, Step, destination Configuration)

    @property
    def bivalent_count(self) -> int:
        return sum(1 for v in self.nodes.values() if v.bivalent)

    @property
    def monovalent_count(self) -> int:
        return sum(1 for v in self.nodes.values() if v.monovalent)

    def node_ids(self) -> dict:
        return {cfg: i for i, cfg in enumerate(self.nodes)}


class Explorer:
    """Exhaustive forward exploration of one protocol instance.

    Decision sets and witness schedules are memoized per configuration, so
    repeated classification queries over the same instance stay cheap. With
    crash_aware=True the successor relation also includes crash steps;
    decision sets do not change, because never scheduling a process reaches
    the same decisions as crashing it, but the option exists to make that
    checkable.
    """

    def __init__(
        self,
        protocol: Protocol,
        inputs: Mapping[int, Value],
        k: int,
        crash_aware: bool = False,
        step_bound: int = 16,
    ):
        if protocol.steps_per_process > step_bound:
            raise ExplorationBoundError(
                f"protocol takes {protocol.steps_per_process} steps per process, "
                f"bound is {step_bound}"
            )
        self.protocol = protocol
        self.inputs = dict(inputs)
        self.k = k
        self.crash_aware = crash_aware
        self._decisions: dict[Configuration, frozenset] = {}
        self._witness: dict[Configuration, dict] = {}

    @property
    def initial(self) -> Configuration:
        return initial_config(self.protocol, self.inputs, self.k)

    def pending(self, cfg: Configuration, pid: int):
        return pending_op(self.protocol, self.inputs, cfg, pid)

    def exec_successors(self, cfg: Configuration) -> list[tuple[int, Configuration]]:
        out = []
        for pid in sorted(self.inputs):
            if self.pending(cfg, pid) is not None:
                out.append(
                    (pid, apply_exec(self.protocol, self.inputs, self.k, cfg, pid))
                )
        return out

    def successors(self, cfg: Configuration) -> list[tuple[Step, Configuration]]:
        out: list[tuple[Step, Configuration]] = [
            (Exec(pid), nxt) for pid, nxt in self.exec_successors(cfg)
        ]
        if self.crash_aware:
            for pid in sorted(self.inputs):
                if self.pending(cfg, pid) is not None:
                    out.append((Crash(pid), apply_crash(cfg, pid)))
        return out

    def reachable_decisions(self, cfg: Optional[Configuration] = None) -> frozenset:
        """Exact set of values decidable by any process in any extension."""
        cfg = self.initial if cfg is None else cfg
        return self._explore(cfg)

    def _explore(self, cfg: Configuration) -> frozenset:
        cached = self._decisions.get(cfg)
        if cached is not None:
            return cached
        witness: dict[Value, Schedule] = {v: () for _, v in cfg.decided}
        for step, succ in self.successors(cfg):
            for v in self._explore(succ):
                if v not in witness:
                    witness[v] = (step,) + self._witness[succ][v]
        result = frozenset(witness)
        self._decisions[cfg] = result
        self._witness[cfg] = witness
        return result

    def witness(self, value: Value, cfg: Optional[Configuration] = None) -> Schedule:
        """A schedule extension from cfg after which value has been decided."""
        cfg = self.initial if cfg is None else cfg
        self._explore(cfg)
        try:
            return self._witness[cfg][value]
        except KeyError:
            raise KeyError(f"{value!r} is not decidable from this configuration")

    def classify(self, cfg: Optional[Configuration] = None) -> Valence:
        return Valence(self.reachable_decisions(cfg))

    def walk(self, start: Optional[Configuration] = None) -> Iterator[Configuration]:
        """Breadth-first pass over every reachable configuration."""
        start = self.initial if start is None else start
        queue = [start]
        visited = {start}
        while queue:
            cfg = queue.pop(0)
            yield cfg
            for _, succ in self.successors(cfg):
                if succ not in visited:
                    visited.add(succ)
                    queue.append(succ)

    def find_critical(
        self, start: Optional[Configuration] = None
    ) -> list[CriticalConfig]:
        """All reachable bivalent configurations whose every Exec successor
        is monovalent, in discovery order."""
        out = []
        for cfg in self.walk(start):
            if not self.classify(cfg).bivalent:
                continue
            succs = self.exec_successors(cfg)
            valences = [self.classify(nxt) for _, nxt in succs]
            if all(v.monovalent for v in valences):
                out.append(
                    CriticalConfig(
                        cfg,
                        tuple(
                            (pid, nxt, val)
                            for (pid, nxt), val in zip(succs, valences)
                        ),
                    )
                )
        return out

    def valence_map(self, start: Optional[Configuration] = None) -> ValenceMap:
        start = self.initial if start is None else start
        nodes: dict[Configuration, Valence] = {}
        edges: list[tuple[Configuration, Step, Configuration]] = []
        queue = [start]
        nodes[start] = self.classify(start)
        while queue:
            cfg = queue.pop(0)
            for step, succ in self.successors(cfg):
                edges.append((cfg, step, succ))
                if succ not in nodes:
                    nodes[succ] = self.classify(succ)
                    queue.append(succ)
        return ValenceMap(start, nodes, edges)


def check_commutation(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    cfg: Configuration,
    pid_a: int,
    pid_b: int,
) -> bool:
    """True when the next operations of two processes reach the same
    configuration in either order. Both processes must have a pending
    operation in cfg."""
    if pid_a == pid_b:
        raise ValueError("commutation needs two distinct processes")
    for pid in (pid_a, pid_b):
        if pending_op(protocol, inputs, cfg, pid) is None:
            raise ValueError(f"process {pid} has no pending operation")
    ab = apply_exec(protocol, inputs, k, apply_exec(protocol, inputs, k, cfg, pid_a), pid_b)
    ba = apply_exec(protocol, inputs, k, apply_exec(protocol, inputs, k, cfg, pid_b), pid_a)
    return ab == ba


def reachable_decisions(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    cfg: Optional[Configuration] = None,
    crash_aware: bool = False,
) -> frozenset:
    return Explorer(protocol, inputs, k, crash_aware).reachable_decisions(cfg)


def classify(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    cfg: Optional[Configuration] = None,
    crash_aware: bool = False,
) -> Valence:
    return Explorer(protocol, inputs, k, crash_aware).classify(cfg)


def find_critical(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    start: Optional[Configuration] = None,
) -> list[CriticalConfig]:
    return Explorer(protocol, inputs, k).find_critical(start)


def valence_map(
    protocol: Protocol,
    inputs: Mapping[int, Value],
    k: int,
    start: Optional[Configuration] = None,
) -> ValenceMap:
    return Explorer(protocol, inputs, k).valence_map(start)
