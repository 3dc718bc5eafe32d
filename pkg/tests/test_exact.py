from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brf import exact

fracs = st.fractions(min_value=-100, max_value=100, max_denominator=1000)


@given(fracs)
def test_fraction_roundtrip(q):
    assert exact.to_fraction(exact.to_fmpq(q)) == q
    assert exact.to_fraction(str(q)) == q


def test_decimal_floats_read_exactly():
    assert exact.to_fraction(0.1) == F(1, 10)
    assert exact.to_fraction("5/6") == F(5, 6)
    with pytest.raises(TypeError):
        exact.to_fraction(object())


@given(fracs.filter(lambda q: q >= 0))
def test_sqrt_of_squares(q):
    assert exact.sqrt_fraction(q * q) == q


def test_sqrt_of_non_square():
    assert exact.sqrt_fraction(F(2)) is None
    assert exact.sqrt_fraction(F(-4)) is None


@given(st.lists(st.lists(fracs, min_size=3, max_size=3), min_size=3, max_size=3))
def test_matrix_roundtrip(rows):
    m = exact.qmat(rows)
    assert exact.to_fractions(m) == rows
    assert np.allclose(exact.to_float(m), np.array(rows, dtype=float))


def test_nullspace_and_rank():
    m = exact.qmat([[1, 2, 3], [2, 4, 6]])
    assert exact.rank(m) == 1
    ns = exact.nullspace(m)
    assert ns.ncols() == 2
    assert exact.is_zero(m * ns)


@given(fracs.filter(lambda q: q != 0))
def test_proportionality(r):
    b = exact.qmat([[1, F(1, 3)], [0, 2]])
    got, res = exact.proportionality(b * exact.to_fmpq(r), b)
    assert got == r and res == 0
