import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakcyc import closure, families
from weakcyc.circle import CircleMeasure, TrigPoly
from weakcyc.lattice import ZVector


def test_power_log_divergence_rule():
    assert closure.power_log_diverges(0.5, 0)
    assert closure.power_log_diverges(1, 1)
    assert not closure.power_log_diverges(1, 2)
    assert not closure.power_log_diverges(1.5, 0)


@pytest.mark.parametrize("s,t", [(2.0, 0.0), (1.5, 1.0), (1.0, 2.0), (1.0, 3.0)])
def test_power_log_tail_bounds_the_remainder(s, t):
    n = 1000
    m = np.arange(n + 1, 2 * 10**6)
    partial = np.sum((m + 1.0) ** -s * np.log(m + 2.0) ** -t)
    assert partial <= closure.power_log_tail(s, t, n)


def test_checkpoints():
    assert closure.checkpoints(1000) == [1, 10, 100, 500, 1000]
    assert closure.checkpoints(1) == [1]


def test_series_verdict_classification():
    n = np.arange(1, 10**4 + 1, dtype=float)
    assert closure.series_verdict(1 / n).trend == "diverging_at_horizon"
    assert closure.series_verdict(2.0 ** -n).trend == "converging_at_horizon"
    v = closure.series_verdict(n ** -1.5, tail=closure.power_log_tail(1.5, 0, 10**4 - 1))
    assert v.certified and v.trend == "converging_at_horizon"
    with pytest.raises(ValueError):
        closure.series_verdict(np.array([1.0, -1.0]))


def test_l24_trivial_and_infinite_q():
    v = closure.l24_divergence([3.0, 0.0, 2.0], 2.0)
    assert v.trend == "trivial"
    v = closure.l24_divergence(closure.power_log_rule(0.0, 0, 0.5), math.inf, 1000)
    assert v.trend == "diverging_at_horizon"
    with pytest.raises(ValueError):
        closure.l24_divergence([1.0], 0.5)
    with pytest.raises(ValueError):
        closure.l24_divergence(closure.power_log_rule(1.0), 2.0)


def test_gram_bound_orthonormal():
    g = np.eye(5)
    stats = closure.gram_2seq_bound(g)
    assert stats.d == pytest.approx(1.0) and stats.c == 0
    assert stats.bound == pytest.approx(1.0)


def test_gram_declared_constant():
    g = np.array([[1.0, 0.1], [0.1, 1.0]])
    stats = closure.gram_2seq_bound(gram=g, declared_c=0.5)
    assert stats.certified and stats.c == 0.5
    with pytest.raises(ValueError):
        closure.gram_2seq_bound(gram=g, declared_c=1e-4)


@given(st.integers(2, 8), st.integers(2, 8), st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_gram_bound_property(n, dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, dim))
    a = rng.normal(size=n)
    stats = closure.gram_2seq_bound(g)
    assert np.linalg.norm(a @ g) <= stats.bound * np.linalg.norm(a) + 1e-9


def test_perturbation_bound():
    assert closure.pseq_perturbation_bound(1.0, [0.3, 0.4], 2.0) == pytest.approx(1.5)
    assert closure.pseq_perturbation_bound(2.0, [], 2.0) == 2.0
    with pytest.raises(closure.NoCertificate):
        closure.pseq_perturbation_bound(1.0, 1 / np.sqrt(np.arange(1, 10**4)), 2.0)


def test_admissible_exponent():
    assert closure.admissible_exponent("hilbert") == 2.0
    assert closure.admissible_exponent("banach") == 1.0
    assert closure.admissible_exponent("lp", 4.0) < 4 / 3
    assert closure.admissible_exponent("lp", 1.5) < 2.0
    with pytest.raises(ValueError):
        closure.admissible_exponent("lp")


def test_closedness_and_flag():
    v = closure.closedness_certificate(closure.power_log_rule(1.0), "hilbert", 1000)
    assert v.certificate
    v = closure.closedness_certificate(closure.power_log_rule(1.0), "banach", 1000)
    assert not v.certificate
    f = closure.not_weakly_supercyclic_flag(2.0 ** -np.arange(50), "hilbert", tail=4.0 ** -49)
    assert f.certificate


@given(st.integers(1, 30), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_row_sum_lemma_property(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 1, size=(n, n))
    pick = rng.random((n, n)) < 0.5
    for j in range(n):
        for k in range(j, n):
            if pick[j, k]:
                a[j, k] = max(a[j, k], 1.0)
            else:
                a[k, j] = max(a[k, j], 1.0)
    rep = closure.row_sum_check(a, 1.5)
    assert rep.ok and rep.worst_slack >= 0
    assert rep.partial_sums[-1] <= rep.comparison + 1e-12


def test_row_sum_preconditions():
    with pytest.raises(ValueError):
        closure.row_sum_check(np.zeros((2, 2)), 2.0)
    with pytest.raises(ValueError):
        closure.row_sum_check(np.ones((2, 2)), 1.0)
    with pytest.raises(ValueError):
        closure.row_sum_check(np.ones((2, 3)), 2.0)


def test_antisupercyclicity_shift():
    op = closure.ShiftOperator(families.unweighted(), 2.0)
    f = ZVector.from_values({0: 1.0, 1: 1.0})
    y = ZVector.basis(-1)
    stats = closure.antisupercyclicity_stat(op, f, y, range(0, 4))
    assert stats[1] == pytest.approx(1 / math.sqrt(2))
    assert stats[3] == 0


def test_antisupercyclicity_multiplication_decays():
    op = closure.MultiplicationOperator(CircleMeasure.lebesgue())
    one = TrigPoly.const(1.0)
    stats = closure.antisupercyclicity_stat(op, one, one, range(0, 5))
    assert stats[0] == pytest.approx(1.0)
    assert all(stats[n] < 1e-12 for n in range(1, 5))


def test_prop24_aggregation():
    ev = closure.PSeqEvidence("gram", 1.2)
    good = {"name": "x", "evidence": ev, "c2": closure.l24_divergence(closure.power_log_rule(0.5), 2.0, 1000)}
    bad = {"name": "y", "evidence": ev, "alpha": 2.0 ** -np.arange(300)}
    assert closure.prop24_certificate([good]).verdict == "pass"
    assert closure.prop24_certificate([good, bad]).verdict == "fail"
    assert closure.prop24_certificate([{"name": "z", "evidence": None, "c2": good["c2"]}]).verdict == "inconclusive"


def test_hypercyclicity_obstruction_bookkeeping():
    w = families.custom(lambda n: 2.0, 2.0, 2.0, name="two")
    x = ZVector.from_values({1: 0.75, 2: 0.6, 3: 0.3})
    rep = closure.hypercyclicity_obstruction(w, x, 0, 1.0, 1.5, range(1, 4))
    assert rep.A == [1, 2, 3]
    assert rep.bound_531_ok and rep.ajk_ok and rep.salsa_ok
    assert rep.rowsum is not None and rep.rowsum.ok
    with pytest.raises(ValueError):
        closure.hypercyclicity_obstruction(w, x, 0, 2.0, 1.5, range(1, 4))
