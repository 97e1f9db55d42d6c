import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcyc import families
from weakcyc.lattice import (LogMag, ZERO, ZVector, apply_shift, beta, beta_array, direct_log2_beta,
                             log2_sum_pow, pnorm, vector_from_logs)


def test_logmag_arithmetic():
    a, b = LogMag.of(8.0), LogMag.of(2.0)
    assert (a + b).linear() == 16.0
    assert (a - b).linear() == 4.0
    assert (-a).linear() == 0.125
    assert a.power(0.5).value == pytest.approx(1.5)
    assert LogMag.of(0).is_zero and ZERO.linear() == 0.0


def test_logmag_refuses_overflow():
    with pytest.raises(OverflowError):
        LogMag(9**8).linear()
    with pytest.raises(ValueError):
        LogMag.of(-1.0)


def test_beta_matches_direct_sum():
    w = families.prop19(3)
    for a, b in [(1, 1), (1, 27), (-40, 13), (5, 300), (-300, -2)]:
        assert beta(w, a, b).value == pytest.approx(direct_log2_beta(w, a, b), abs=1e-9)
    with pytest.raises(ValueError):
        beta(w, 3, 2)


def test_beta_array_vectorized():
    w = families.chan_sanders()
    a = np.array([1, -5, 2])
    b = np.array([10, 5, 2])
    got = beta_array(w, a, b)
    assert list(got) == [direct_log2_beta(w, int(x), int(y)) for x, y in zip(a, b)]


def test_huge_products_stay_in_log_domain():
    w = families.prop18()
    # beta(1, 9^9) = 2^(2 * 9^8); only its logarithm is formed
    v = beta(w, 1, 9**9)
    assert v.value == 2 * 9**8
    with pytest.raises(OverflowError):
        v.linear()


def test_shift_moves_support_down():
    w = families.unweighted()
    x = ZVector.from_values({0: 1.0, 3: -2.0})
    y = apply_shift(w, x, 2)
    assert y.support == (-2, 1)
    assert y[1] == -2.0
    assert apply_shift(w, y, -2) == x


def test_weighted_shift_factor():
    w = families.from_log2_table({1: 1.0, 2: 2.0})
    # T e_2 = w_2 e_1, T^2 e_2 = w_2 w_1 e_0
    assert apply_shift(w, ZVector.basis(2), 2)[0] == pytest.approx(8.0)


def test_pnorm_and_zero_vector():
    x = ZVector.from_values({0: 3.0, 1: 4.0})
    assert pnorm(x, 2).linear() == pytest.approx(5.0)
    assert pnorm(x, math.inf).linear() == pytest.approx(4.0)
    assert pnorm(ZVector(), 2).is_zero
    with pytest.raises(ValueError):
        pnorm(x, 0.5)


def test_vector_from_logs_beyond_float_range():
    v = vector_from_logs([0, 1], [5000.0, 5001.0])
    n = pnorm(v, 2)
    assert n.value == pytest.approx(5001 + 0.5 * math.log2(1.25))


@given(st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=20), st.floats(1, 6))
def test_log2_sum_pow_matches_direct(logs, p):
    got = log2_sum_pow(np.array(logs), p)
    top = max(logs) * p
    ref = top + math.log2(math.fsum(2.0 ** (p * l - top) for l in logs))
    assert got == pytest.approx(ref, abs=1e-9)


@given(st.dictionaries(st.integers(-50, 50), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3), max_size=8),
       st.integers(-20, 20))
@settings(max_examples=60)
def test_shift_round_trip(values, n):
    w = families.prop19(2.5)
    x = ZVector.from_values(values)
    assert apply_shift(w, apply_shift(w, x, n), -n).close_to(x, 1e-9)
