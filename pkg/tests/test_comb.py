from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcyc.circle import CircleMeasure, CombLevel, CombMeasure, load_measure
from weakcyc.circle.comb import box_width_for, comb_parameters, geo_exact, sinc


@st.composite
def combs(draw):
    G = draw(st.sampled_from([1, 2, 4]))
    base = np.array(draw(st.lists(st.floats(0, 2), min_size=G, max_size=G)))
    mu = CombMeasure(G, base)
    cells = G
    for _ in range(draw(st.integers(0, 2))):
        Q = draw(st.sampled_from([4, 8]))
        box = draw(st.sampled_from([2, Q // 2]))
        k = cells * draw(st.integers(1, 3))
        s = np.array(draw(st.lists(st.floats(0, 1), min_size=G, max_size=G)))
        start = np.array(draw(st.lists(st.integers(0, Q - 1), min_size=G, max_size=G)))
        mu = mu.with_level(CombLevel(k, Q, box, s, start))
        cells = k * Q
    return mu


@given(combs())
@settings(max_examples=40, deadline=None)
def test_fourier_matches_explicit_expansion(mu):
    ex = mu.to_explicit()
    for l in range(-100, 101):
        assert abs(mu.fourier(l) - ex.fourier(l)) <= 1e-12


@given(combs())
@settings(max_examples=40, deadline=None)
def test_levels_keep_mass_and_round_trip(mu):
    assert mu.total_mass == pytest.approx(mu.prefix(0).total_mass, abs=1e-12)
    back = load_measure(mu.dumps())
    assert isinstance(back, CombMeasure)
    for l in (0, 1, -3, 17, 64):
        assert back.fourier(l) == mu.fourier(l)


def test_from_step_and_restrict():
    mu = CombMeasure.from_step(CircleMeasure.step([0.5, 1.5]), 2)
    assert mu.is_probability()
    assert mu.mass((0.5, 1.0)) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        mu.restrict((0.1, 0.5))
    with pytest.raises(ValueError):
        CombMeasure.from_step(CircleMeasure(((0.1, 1.0),), ()), 2)


def test_level_validation():
    with pytest.raises(ValueError):
        CombLevel(4, 4, 2, np.array([1.5]), np.array([0]))
    with pytest.raises(ValueError):
        CombLevel(4, 4, 4, np.array([0.5]), np.array([0]))
    with pytest.raises(ValueError):
        CombMeasure(2, np.ones(2), [CombLevel(3, 4, 2, np.zeros(2), np.zeros(2, dtype=int))])


def test_comb_parameters_hit_target():
    b = np.array([0.3, 0.2j, -0.1 + 0.1j])
    s, start, defect = comb_parameters(b, 64, 0.5)
    assert np.all(defect <= np.abs(b) * 2 * np.pi / 64 + 1e-15)
    with pytest.raises(ValueError):
        comb_parameters(np.array([0.9]), 64, 0.5)


def test_box_width_and_sinc():
    assert sinc(0.5) == pytest.approx(2 / np.pi)
    w = box_width_for(0.9)
    assert sinc(w) >= 0.9 and sinc(2 * w) < 0.9
    with pytest.raises(ValueError):
        box_width_for(1.0)


def test_huge_frequencies_are_exact():
    # a level at k = 2^80 writes its harmonic into mu^(k) exactly
    G = 1
    k = 1 << 80
    s = np.array([0.5])
    lev = CombLevel(k, 8, 4, s, np.array([0]))
    mu = CombMeasure.lebesgue(G).with_level(lev)
    assert mu.fourier(k) == pytest.approx(complex(lev.harmonic()[0]), abs=1e-12)
    assert abs(mu.fourier(k + 1)) < 1e-12
    assert geo_exact(0, 5, 3) == 5


def test_density_at_uses_exact_fractions():
    lev = CombLevel(2, 4, 2, np.array([1.0]), np.array([0]))
    mu = CombMeasure.lebesgue(1).with_level(lev)
    assert mu.density_at(Fraction(1, 16)) == 2.0
    assert mu.density_at(Fraction(5, 16)) == 0.0


@given(st.integers(-10**6, 10**6), st.integers(1, 60), st.integers(1, 500))
def test_geometric_sum_against_direct(l, n, k):
    direct = sum(np.exp(2j * np.pi * ((l * p) % k) / k) for p in range(n))
    assert abs(geo_exact(l, n, k) - direct) <= 1e-9
