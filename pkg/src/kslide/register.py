"""Atomic k-sliding read/write register.

A size-k sliding register is an append/read-last-k shared object: write(v)
appends v to the logical sequence of written values, and read() returns the
last k of them, oldest first. While fewer than k values have been written,
the missing leading slots hold the reserved marker BOTTOM. With k == 1 the
object degenerates to a classic atomic register.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Any, Optional

Value = Any  # hashable application value; never BOTTOM
Window = tuple  # k slots, oldest first; BOTTOM entries form a prefix


class _Bottom:
    """Reserved placeholder for a slot that was never written."""

    __slots__ = ()
    _instance: Optional["_Bottom"] = None

    def __new__(cls) -> "_Bottom":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "⊥"


BOTTOM = _Bottom()


def first_non_bottom(window: Window) -> Optional[Value]:
    """Oldest surviving value in a window, or None if nothing was written."""
    for slot in window:
        if slot is not BOTTOM:
            return slot
    return None


class SlidingRegister:
    """Sequential reference implementation.

    State is a ring of the last k written values plus a total write counter;
    the counter is what distinguishes a partially filled window (padded with
    BOTTOM) from a full one.
    """

    def __init__(self, k: int):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ValueError(f"window size must be a positive integer, got {k!r}")
        self.k = k
        self._ring: deque = deque(maxlen=k)
        self._writes = 0

    @property
    def writes(self) -> int:
        return self._writes

    def write(self, value: Value) -> None:
        """Append one value to the logical sequence."""
        if value is BOTTOM:
            raise ValueError("BOTTOM marks missing values and cannot be written")
        self._ring.append(value)
        self._writes += 1

    def read(self) -> Window:
        """Window of the last k written values, oldest first, BOTTOM padded."""
        ring = tuple(self._ring)
        return (BOTTOM,) * (self.k - len(ring)) + ring

    def narrow(self, k_prime: int) -> "NarrowView":
        """Size-k' view of this register, 1 <= k' <= k."""
        return NarrowView(self, k_prime)

    # Snapshots let the simulator and explorer step over immutable states.
    def state(self) -> tuple:
        return (self._writes, tuple(self._ring))

    @classmethod
    def from_state(cls, k: int, state: tuple) -> "SlidingRegister":
        writes, ring = state
        reg = cls(k)
        reg._ring.extend(ring)
        reg._writes = writes
        return reg

    def __repr__(self) -> str:
        return f"<{type(self).__name__} k={self.k} writes={self._writes} window={list(self.read())}>"


class NarrowView:
    """Size-k' window onto a wider register.

    Writes pass straight through; reads keep only the newest k' slots of the
    base window, so the view behaves exactly like a size-k' register fed the
    same writes.
    """

    def __init__(self, base, k: int):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ValueError(f"view size must be a positive integer, got {k!r}")
        if k > base.k:
            raise ValueError(f"cannot widen a size-{base.k} register to {k}")
        self._base = base
        self.k = k

    def write(self, value: Value) -> None:
        self._base.write(value)

    def read(self) -> Window:
        return self._base.read()[-self.k:]

    def narrow(self, k_prime: int) -> "NarrowView":
        if k_prime > self.k:
            raise ValueError(f"cannot widen a size-{self.k} view to {k_prime}")
        return NarrowView(self._base, k_prime)

    def __repr__(self) -> str:
        return f"<NarrowView k={self.k} of {self._base!r}>"


class LockedSlidingRegister(SlidingRegister):
    """Thread-safe variant: every operation is one mutex critical section."""

    def __init__(self, k: int):
        super().__init__(k)
        self._lock = threading.Lock()

    def write(self, value: Value) -> None:
        with self._lock:
            super().write(value)

    def read(self) -> Window:
        with self._lock:
            return super().read()


class WindowShortRegister(LockedSlidingRegister):
    """Deliberately broken register used to calibrate the history checker.

    The ring is one slot too small, so once more than k - 1 values have been
    written, reads silently lose the oldest value that should still be
    visible and pad with an extra BOTTOM instead.
    """

    def __init__(self, k: int):
        super().__init__(k)
        self._ring = deque(maxlen=k - 1 if k > 1 else 0)
