import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcyc.circle import TrigPoly
from weakcyc.circle.trigpoly import frac_turn, turn

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
polys = st.dictionaries(st.integers(-12, 12), coef, max_size=6).map(TrigPoly)


def test_frac_turn_exact_for_large_frequencies():
    t = 0.1  # not dyadic as a real number, but exact as a float
    k = 10**30
    assert frac_turn(k, t) == float((k * Fraction(t)) % 1)
    assert frac_turn(3, 0.5) == 0.5


def test_turn():
    assert turn(1, 4) == pytest.approx(1j)
    assert turn(-5, 4) == pytest.approx(-1j)


def test_degree_and_access():
    p = TrigPoly({-3: 1, 2: 2j, 0: 0})
    assert p.degree == 3
    assert p[2] == 2j and p[7] == 0
    assert 0 not in p.coeffs
    assert TrigPoly().degree == 0


def test_conj_is_pointwise():
    p = TrigPoly({1: 1 + 2j, -2: 3})
    for t in (0.0, 0.17, 0.5):
        assert p.conj()(t) == pytest.approx(p(t).conjugate())


def test_shift_is_multiplication_by_z():
    p = TrigPoly({1: 1.0})
    t = 0.3
    assert p.shift(2)(t) == pytest.approx(p(t) * cmath.exp(2j * math.pi * 2 * t))


def test_normalized_monomial_and_general():
    m = TrigPoly.monomial(5, 3.0).normalized()
    assert m[5] == pytest.approx(1.0) and m.sup_bound == 1.0
    p = TrigPoly({0: 1.0, 1: 1.0}).normalized()
    assert abs(p(0.0)) <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        TrigPoly().normalized()


def test_sup_grid_certified():
    p = TrigPoly({0: 1.0, 3: 0.5, -7: 0.25j})
    g, ub = p.sup_grid()
    dense = np.abs(p.grid_values(1 << 14)).max()
    assert g <= dense + 1e-12 <= ub + 1e-12
    with pytest.raises(ValueError):
        p.sup_grid(10)


@given(polys, polys, st.floats(0, 1, exclude_max=True))
@settings(max_examples=80)
def test_algebra_pointwise(p, q, t):
    assert (p + q)(t) == pytest.approx(p(t) + q(t), abs=1e-9)
    assert (p * q)(t) == pytest.approx(p(t) * q(t), abs=1e-7)
    assert (p - q)(t) == pytest.approx(p(t) - q(t), abs=1e-9)
    assert (2 * p)(t) == pytest.approx(2 * p(t), abs=1e-9)


@given(polys, st.floats(0, 1, exclude_max=True))
def test_sup_bound_dominates_values(p, t):
    assert abs(p(t)) <= p.sup_bound + 1e-9
    assert p.sup_bound <= math.fsum(abs(v) for v in p.coeffs.values()) + 1e-12
