"""
Tests for the register value order
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vm.values import (MEM_INT, MEM_NULL, MEM_REAL, MEM_STR, Ordering, compare_values, mem_compare, mem_flags,
                       normalize_value, null_compare, value_type_name)

values = st.one_of(
    st.none(),
    st.integers(min_value=-(2 ** 63), max_value=2 ** 63 - 1),
    st.floats(allow_nan=False),
    st.text(max_size=8),
)


def test_examples():
    assert compare_values(5, 5) is Ordering.EQUAL
    assert compare_values(None, 0) is Ordering.LESS
    assert compare_values(2, 2.5) is Ordering.LESS
    assert compare_values(None, None) is Ordering.EQUAL
    assert compare_values("a", 10 ** 18) is Ordering.GREATER
    assert compare_values(3.0, 3) is Ordering.EQUAL


def test_text_orders_by_code_point():
    assert mem_compare("abc", "abd") == -1
    assert mem_compare("é", "z") == 1
    assert mem_compare("", "a") == -1


def test_flags():
    assert mem_flags(None) == MEM_NULL
    assert mem_flags(1) == MEM_INT
    assert mem_flags(1.5) == MEM_REAL
    assert mem_flags("x") == MEM_STR
    assert [value_type_name(v) for v in (None, 1, 1.0, "")] == ["Null", "Int", "Real", "Text"]


def test_null_compare_matches_total_order():
    assert null_compare(MEM_NULL, MEM_NULL) == 0
    assert null_compare(MEM_NULL, MEM_INT) == -1
    assert null_compare(MEM_STR, MEM_NULL) == 1


def test_large_ints_compare_exactly_against_reals():
    big = 2 ** 53 + 1
    assert mem_compare(big, float(2 ** 53)) == 1


def test_normalize_value():
    assert normalize_value(float("nan")) is None
    assert normalize_value(np.int64(7)) == 7 and type(normalize_value(np.int64(7))) is int
    assert normalize_value(True) == 1
    with pytest.raises(ValueError):
        normalize_value(b"bytes")


@given(values, values)
def test_antisymmetric(a, b):
    assert mem_compare(a, b) == -mem_compare(b, a)


@given(values)
def test_reflexive(a):
    assert mem_compare(a, a) == 0


@given(values, values, values)
def test_transitive(a, b, c):
    if mem_compare(a, b) <= 0 and mem_compare(b, c) <= 0:
        assert mem_compare(a, c) <= 0


@given(st.integers(min_value=-2 ** 52, max_value=2 ** 52), st.floats(allow_nan=False, allow_infinity=False))
def test_int_real_compare_numerically(i, r):
    expected = (i > r) - (i < r)
    assert mem_compare(i, r) == expected
