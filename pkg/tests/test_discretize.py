from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from weakcyc.circle import CircleMeasure
from weakcyc.circle.discretize import (combination_is_irrational, discretize_ac, discretize_atomic,
                                       independence_certificate, independent_points, refine, uniform_partition)


def test_partitions():
    p = uniform_partition(4)
    assert p[0] == (0.0, 0.25) and p[-1] == (0.75, 1.0)
    r = refine(p, 3)
    assert len(r) == 12 and r[2][1] == pytest.approx(0.25)
    with pytest.raises(ValueError):
        uniform_partition(0)


def test_independent_points_inside_arcs():
    arcs = uniform_partition(7)
    pts = independent_points(arcs)
    assert all(a < p.t < b for (a, b), p in zip(arcs, pts))
    assert independence_certificate(pts)
    assert not independence_certificate([])
    with pytest.raises(ValueError):
        independent_points([(0.2, 0.2)])


def test_certificate_rejects_repeated_primes():
    pts = independent_points(uniform_partition(2))
    assert not independence_certificate([pts[0], pts[0]])


@pytest.mark.parametrize("ns", [(1, 0, 0), (2, -3, 0), (1, 1, 1), (5, -2, 7)])
def test_integer_combinations_are_irrational(ns):
    pts = independent_points(uniform_partition(3))
    assert combination_is_irrational(pts, ns)


def test_rational_points_fail_the_exact_check():
    from weakcyc.circle.discretize import IndependentPoint
    p = IndependentPoint(Fraction(1, 3), Fraction(1, 8), 4)  # sqrt(4) is rational
    assert not combination_is_irrational([p], [1])


@st.composite
def step_measures(draw):
    n = draw(st.integers(1, 8))
    hs = draw(st.lists(st.floats(0, 3), min_size=n, max_size=n))
    return CircleMeasure.step(hs)


@given(step_measures(), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_discretizations_keep_arc_masses(mu, n):
    part = uniform_partition(n)
    ac = discretize_ac(mu, part)
    at, used = discretize_atomic(mu, part)
    for arc in part:
        assert ac.mass(arc) == pytest.approx(mu.mass(arc), abs=1e-12)
        assert at.mass(arc) == pytest.approx(mu.mass(arc), abs=1e-12)
    assert len(used) == len(at.atoms)
    assert not ac.atoms and not at.segments
