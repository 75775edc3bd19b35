import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kslide.register import (
    BOTTOM,
    LockedSlidingRegister,
    NarrowView,
    SlidingRegister,
    WindowShortRegister,
    first_non_bottom,
)
from oracles import FullSequenceRegister, padded_last_k

values = st.integers(min_value=0, max_value=9)
write_lists = st.lists(values, max_size=30)
sizes = st.integers(min_value=1, max_value=5)


def test_empty_window_is_all_bottom():
    reg = SlidingRegister(3)
    assert reg.read() == (BOTTOM, BOTTOM, BOTTOM)
    assert reg.writes == 0


def test_partial_window_pads_on_the_left():
    reg = SlidingRegister(2)
    reg.write(5)
    assert reg.read() == (BOTTOM, 5)


def test_full_window_keeps_write_order():
    reg = SlidingRegister(2)
    reg.write(5)
    reg.write(7)
    assert reg.read() == (5, 7)


def test_overflow_evicts_the_oldest():
    reg = SlidingRegister(2)
    for v in (5, 7, 9):
        reg.write(v)
    assert reg.read() == (7, 9)
    assert reg.writes == 3


def test_k1_degenerates_to_plain_register():
    reg = SlidingRegister(1)
    assert reg.read() == (BOTTOM,)
    reg.write(4)
    assert reg.read() == (4,)
    reg.write(6)
    assert reg.read() == (6,)


@pytest.mark.parametrize("bad", [0, -1, 2.5, "2", True])
def test_rejects_bad_window_sizes(bad):
    with pytest.raises(ValueError):
        SlidingRegister(bad)


def test_bottom_is_not_writable():
    reg = SlidingRegister(2)
    with pytest.raises(ValueError):
        reg.write(BOTTOM)


def test_bottom_is_a_singleton():
    assert type(BOTTOM)() is BOTTOM
    assert repr(BOTTOM) == "⊥"


def test_first_non_bottom():
    assert first_non_bottom((BOTTOM, BOTTOM)) is None
    assert first_non_bottom((BOTTOM, 4)) == 4
    assert first_non_bottom((3, 4)) == 3
    assert first_non_bottom(()) is None


@given(write_lists, sizes)
def test_matches_full_sequence_oracle(writes, k):
    reg = SlidingRegister(k)
    oracle = FullSequenceRegister(k)
    for v in writes:
        reg.write(v)
        oracle.write(v)
        assert reg.read() == oracle.read()
    assert reg.writes == len(writes)


@given(write_lists, sizes)
def test_window_shape_invariants(writes, k):
    reg = SlidingRegister(k)
    for v in writes:
        reg.write(v)
    window = reg.read()
    assert len(window) == k
    pad = k - min(len(writes), k)
    assert all(slot is BOTTOM for slot in window[:pad])
    assert all(slot is not BOTTOM for slot in window[pad:])


@given(write_lists, sizes)
def test_read_is_pure(writes, k):
    reg = SlidingRegister(k)
    for v in writes:
        reg.write(v)
    before = reg.state()
    assert reg.read() == reg.read()
    assert reg.state() == before


@given(write_lists, sizes)
def test_state_round_trip(writes, k):
    reg = SlidingRegister(k)
    for v in writes:
        reg.write(v)
    clone = SlidingRegister.from_state(k, reg.state())
    assert clone.read() == reg.read()
    assert clone.writes == reg.writes
    clone.write(99)
    # clones are independent
    assert reg.writes == len(writes)


@given(write_lists, sizes, sizes)
def test_narrow_equals_suffix_and_oracle(writes, k, k_prime):
    if k_prime > k:
        k, k_prime = k_prime, k
    reg = SlidingRegister(k)
    small = FullSequenceRegister(k_prime)
    for v in writes:
        reg.write(v)
        small.write(v)
    view = reg.narrow(k_prime)
    assert view.read() == reg.read()[k - k_prime:]
    assert view.read() == small.read()


def test_narrow_rejects_widening_and_zero():
    reg = SlidingRegister(2)
    with pytest.raises(ValueError):
        reg.narrow(3)
    with pytest.raises(ValueError):
        reg.narrow(0)


def test_narrow_writes_pass_through():
    reg = SlidingRegister(3)
    view = reg.narrow(2)
    view.write(8)
    assert reg.read() == (BOTTOM, BOTTOM, 8)
    assert view.read() == (BOTTOM, 8)


def test_narrow_full_width_is_identity():
    reg = SlidingRegister(2)
    reg.write(1)
    assert reg.narrow(2).read() == reg.read()


def test_nested_narrowing():
    reg = SlidingRegister(3)
    for v in (1, 2, 3):
        reg.write(v)
    view = reg.narrow(2).narrow(1)
    assert view.read() == (3,)
    with pytest.raises(ValueError):
        reg.narrow(2).narrow(3)


@given(write_lists, sizes)
def test_locked_register_same_sequential_semantics(writes, k):
    locked = LockedSlidingRegister(k)
    plain = SlidingRegister(k)
    for v in writes:
        locked.write(v)
        plain.write(v)
    assert locked.read() == plain.read()


def test_locked_register_under_contention():
    reg = LockedSlidingRegister(3)
    per_thread = 200
    threads = 4

    def hammer(base):
        for i in range(per_thread):
            reg.write(base + i)
            window = reg.read()
            assert len(window) == 3

    workers = [threading.Thread(target=hammer, args=(t * 1000,)) for t in range(threads)]
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    assert reg.writes == threads * per_thread
    assert all(slot is not BOTTOM for slot in reg.read())


def test_window_short_mutant_loses_the_oldest():
    reg = WindowShortRegister(2)
    reg.write(1)
    assert reg.read() == (BOTTOM, 1)
    reg.write(2)
    # a correct size-2 register would show (1, 2)
    assert reg.read() == (BOTTOM, 2)


def test_padded_last_k_oracle_shape():
    assert padded_last_k([], 2) == (BOTTOM, BOTTOM)
    assert padded_last_k([5], 2) == (BOTTOM, 5)
    assert padded_last_k([5, 7, 9], 2) == (7, 9)
