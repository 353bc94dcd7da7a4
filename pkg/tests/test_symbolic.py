"""Tests for eventually periodic shift points."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chainchaos.errors import InputError, SFTError
from chainchaos.symbolic import (ShiftPoint, admissible_words, greedy_tail,
                                 point_word_distance, word_distance)

GOLDEN = ((1, 1), (1, 0))
FULL = ((1, 1), (1, 1))


def test_normalization_absorbs_head_into_cycle():
    assert ShiftPoint((0, 1, 1), (1,)) == ShiftPoint((0,), (1,))
    assert ShiftPoint((0, 1, 0, 1), (0, 1)) == ShiftPoint((), (0, 1))
    assert ShiftPoint((), (1, 1, 1)) == ShiftPoint((), (1,))


def test_shift_drops_head():
    x = ShiftPoint((0, 1), (1,))
    assert x.shift() == ShiftPoint((1,), (1,)) == ShiftPoint((), (1,))
    assert x.shift(5) == ShiftPoint((), (1,))
    assert ShiftPoint((), (0, 1)).shift() == ShiftPoint((), (1, 0))


def test_symbols_and_word():
    x = ShiftPoint((0,), (1, 0))
    assert x.word(6) == (0, 1, 0, 1, 0, 1)
    assert list(x.symbols(5)) == [0, 1, 0, 1, 0]


def test_distance_exact():
    zero = ShiftPoint((), (0,))
    one = ShiftPoint((), (1,))
    alt = ShiftPoint((), (0, 1))
    assert zero.distance(one) == 1
    assert zero.distance(alt) == Fraction(1, 2)
    assert alt.distance(ShiftPoint((0, 1), (0, 1))) == 0
    # first disagreement beyond both cycle alignments is detected as equality
    assert ShiftPoint((), (0, 1, 0, 1)).distance(ShiftPoint((), (0, 1))) == 0


def test_distance_cap_on_array_heads():
    a = ShiftPoint(np.zeros(100, dtype=np.uint8), (0,))
    b = ShiftPoint((), (0,))
    assert a.distance(b) == 0
    c = ShiftPoint(np.array([0] * 70 + [1], dtype=np.uint8), (0,))
    # the disagreement at index 70 is past the scan cap
    assert c.distance(b, cap=64) == 0
    assert c.distance(b, cap=80) == Fraction(1, 2 ** 70)


def test_parse_and_repr():
    assert ShiftPoint.parse("0|1") == ShiftPoint((0,), (1,))
    assert ShiftPoint.parse("|01") == ShiftPoint((), (0, 1))
    with pytest.raises(InputError):
        ShiftPoint.parse("0101")
    with pytest.raises(InputError):
        ShiftPoint.parse("01|")


def test_validate_against_adjacency():
    ShiftPoint((), (0, 1)).validate(GOLDEN)
    with pytest.raises(SFTError):
        ShiftPoint((), (1,)).validate(GOLDEN)           # 11 forbidden in the tail
    with pytest.raises(SFTError):
        ShiftPoint((1, 1), (0,)).validate(GOLDEN)       # 11 forbidden in the head
    with pytest.raises(SFTError):
        ShiftPoint((2,), (0,)).validate(GOLDEN)         # symbol out of range


def test_word_distance_and_point_word_distance():
    assert word_distance((0, 0), (0, 1)) == Fraction(1, 2)
    assert word_distance((0, 0), (1, 0)) == 1
    assert word_distance((0, 1), (0, 1)) == 0
    x = ShiftPoint((), (0, 1))
    assert point_word_distance(x, (0, 1)) == 0
    assert point_word_distance(x, (0, 0)) == Fraction(1, 2)


def test_admissible_words_golden_mean():
    assert admissible_words(GOLDEN, 2) == [(0, 0), (0, 1), (1, 0)]
    assert len(admissible_words(FULL, 3)) == 8


def test_greedy_tail():
    assert greedy_tail(FULL, 0) == ((), (0,))
    assert greedy_tail(GOLDEN, 1) == ((), (0,))
    cycle_only = ((0, 1), (0, 0))  # 0 -> 1 -> 0
    head, cyc = greedy_tail(((0, 1), (1, 0)), 0)
    assert head == () and cyc == (1, 0)


points = st.builds(
    ShiftPoint,
    st.lists(st.integers(0, 1), max_size=4).map(tuple),
    st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple),
)


@given(points, points)
def test_distance_symmetric(a, b):
    assert a.distance(b) == b.distance(a)


@given(points, points, points)
def test_distance_ultrametric(a, b, c):
    assert a.distance(c) <= max(a.distance(b), b.distance(c))


@given(points)
def test_shift_contracts_tail(a):
    # shifting never increases the distance to the shifted canonical form
    s = a.shift(1)
    assert isinstance(s, ShiftPoint)
    assert s.symbol(0) == a.symbol(1)
