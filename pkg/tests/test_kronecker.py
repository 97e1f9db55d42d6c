import math

import pytest

from weakcyc.circle.discretize import independent_points, uniform_partition
from weakcyc.circle.kronecker import SearchExhausted, circular_defect, kronecker_search


def test_single_rotation_minimal():
    t = math.sqrt(3) % 1
    res = kronecker_search([t], [1j], 0, 0.02, 10**5)
    for k in range(1, res.k):
        assert circular_defect(k, [t], [0.25]) >= 0.02
    assert res.defect < 0.02
    assert res.chordal == pytest.approx(2 * math.sin(math.pi * res.defect))


def test_respects_k0():
    t = math.sqrt(2) % 1
    assert kronecker_search([t], [1.0], 70, 0.01, 10**5).k > 70


def test_two_independent_points():
    pts = independent_points(uniform_partition(2))
    res = kronecker_search(pts, [1.0, -1.0], 0, 0.05, 10**6)
    assert circular_defect(res.k, pts, [0.0, 0.5]) < 0.05


def test_exhausted_search_reports_best():
    with pytest.raises(SearchExhausted) as e:
        kronecker_search([math.sqrt(2) % 1], [1.0], 0, 1e-9, 100)
    assert 1 <= e.value.best_k <= 100


def test_argument_errors():
    with pytest.raises(ValueError):
        kronecker_search([], [], 0, 0.1, 10)
    with pytest.raises(ValueError):
        kronecker_search([0.3], [2.0], 0, 0.1, 10)
    with pytest.raises(ValueError):
        kronecker_search([0.3], [1.0], 0, 0.0, 10)
