import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcyc import criteria, families
from weakcyc.lattice import LogMag, direct_log2_beta


def brute_super(w, k, n):
    back = max(direct_log2_beta(w, j - n, j) for j in range(-k, k + 1))
    fwd = min(direct_log2_beta(w, j, j + n) for j in range(-k, k + 1))
    return back - fwd


def brute_hyper(w, k, n):
    back = max(direct_log2_beta(w, j - n, j) for j in range(-k, k + 1))
    fwd = min(direct_log2_beta(w, j, j + n) for j in range(-k, k + 1))
    return max(back, -fwd)


@given(st.integers(0, 4), st.integers(1, 60))
@settings(max_examples=40, deadline=None)
def test_stats_match_brute_force(k, n):
    w = families.prop19(3)
    assert criteria.salas_super_stat(w, k, n).value == pytest.approx(brute_super(w, k, n), abs=1e-9)
    assert criteria.salas_hyper_stat(w, k, n).value == pytest.approx(brute_hyper(w, k, n), abs=1e-9)


def test_simplified_stats():
    w = families.chan_sanders()
    h, s = criteria.salas_simplified_stats(w, 2, 5)
    left = direct_log2_beta(w, -2, 2)
    right = direct_log2_beta(w, 3, 7)
    assert s.value == left - right
    assert h.value == max(left, -right)


def test_bad_arguments():
    w = families.unweighted()
    with pytest.raises(ValueError):
        criteria.stat_series(w, "bogus", 0, [1])
    with pytest.raises(ValueError):
        criteria.stat_series(w, "super", 0, [0])
    with pytest.raises(ValueError):
        criteria.evaluate_criterion(w, "super", 1, 0)


def test_decaying_weights_are_consistent():
    # w_n = 2 for n > 0, 1/2 for n <= 0: the hyper statistic collapses
    w = families.custom(lambda n: 2.0 if n > 0 else 0.5, 0.5, 2.0, name="tilt")
    v = criteria.evaluate_criterion(w, "hyper", 3, 200)
    assert v.verdict == "consistent_at_horizon"
    assert v.running_min.value < -20


def test_inconclusive_without_floor():
    w = families.custom(lambda n: 1.0 + 0.5 * (n % 2), 1.0, 1.5, name="wobble")
    v = criteria.evaluate_criterion(w, "hyper", 1, 50)
    assert v.verdict == "inconclusive"
    assert v.evidence


def test_threaded_evaluation_is_identical():
    w = families.prop19(2.5)
    a = criteria.evaluate_criterion(w, "super", 3, 500)
    b = criteria.evaluate_criterion(w, "super", 3, 500, threads=4)
    for k in a.statistic_series:
        assert np.array_equal(a.statistic_series[k], b.statistic_series[k])
    assert a.verdict == b.verdict


def test_symmetric_floor_reported():
    v = criteria.evaluate_criterion(families.unweighted(), "super", 2, 100)
    assert v.verdict == "violated"
    assert any("symmetric" in e for e in v.evidence)


def test_series_pairs():
    v = criteria.evaluate_criterion(families.unweighted(), "hyper", 0, 5)
    pairs = v.series_pairs(0)
    assert [n for n, _ in pairs] == [1, 2, 3, 4, 5]
    assert all(isinstance(m, LogMag) for _, m in pairs)


def test_d_m_and_window_transfer():
    w = families.prop19(3)
    assert criteria.d_m(families.unweighted(), 3) == 0
    assert criteria.window_transfer_slack(w, 3, 200) >= -1e-9
