import math

import numpy as np
import pytest

from weakcyc.circle import CircleMeasure, TrigPoly
from weakcyc.circle.construction import (ConstructionFailed, cantor_pairs, enumerate_h, eps_schedule, g_function,
                                         lemma44_construct, pow2_at_least, theorem12_driver, theorem12_functions,
                                         weak_convergence_check)


def test_eps_schedule_tail_sum():
    delta = [2.0**-n for n in range(1, 12)]
    eps = eps_schedule(delta)
    for n in range(len(eps)):
        assert sum(eps[n:]) <= delta[n] / 12 + 1e-18
    assert all(a > b for a, b in zip(eps, eps[1:]))
    with pytest.raises(ValueError):
        eps_schedule([0.1, 0.0])


def test_enumerate_h_starts_and_normalizes():
    h = enumerate_h(12)
    assert [dict(p.coeffs) for p in h[:4]] == [{0: 1}, {1: 1}, {-1: 1}, {0: -1}]
    for p in h:
        assert p.sup_bound == 1.0
        assert np.abs(p.grid_values(512)).max() <= 1 + 1e-12
    assert len({tuple(sorted(p.coeffs.items())) for p in h}) == 12


def test_cantor_pairs():
    assert cantor_pairs(6) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]
    assert all(i <= 2 for i, _ in cantor_pairs(20, rows=2))


def test_theorem12_functions_scaling():
    h = enumerate_h(3)
    fs, pairs = theorem12_functions(h, 5)
    for f, (i, j) in zip(fs, pairs):
        assert f.sup_bound == pytest.approx(2.0**-i / math.sqrt(j))


def test_g_and_pow2():
    g = g_function(3, TrigPoly.const(0.5))
    assert g[3] == 1 and g[0] == -0.5
    assert [pow2_at_least(x) for x in (0.3, 1, 3, 4, 4.5, 1000)] == [1, 1, 4, 4, 8, 1024]


def test_weak_convergence_rows():
    ms = [CircleMeasure.step([2.0, 0.0]), CircleMeasure.step([1.5, 0.5]), CircleMeasure.lebesgue()]
    rep = weak_convergence_check(ms, [TrigPoly.monomial(1)], arcs=[(0.0, 0.5)])
    row = rep["rows"][0]
    assert row["diffs"][-1] == 0 and row["non_increasing"]
    assert row["restricted_max"] >= 0


@pytest.fixture(scope="module")
def three_stages():
    h = enumerate_h(2)
    fs, _ = theorem12_functions(h, 5)
    return fs, lemma44_construct(fs, lambda n: 2.0**-n, 3)


def test_small_construction_invariants(three_stages):
    fs, (states, ks) = three_stages
    assert len(states) == 3
    for a, b in zip(states, states[1:]):
        assert a.k < b.k and a.j < b.j and a.m < b.m
        assert b.m % a.m == 0
    for st in states:
        assert st.mu.is_probability()
        assert all(c.ok for c in st.checks.values())
        assert np.all(np.abs(st.b) <= fs[st.n].sup_bound * (1 + 1e-12))
        assert st.check_table()[0]["stage"] == st.n


def test_c_rule_uses_midpoints(three_stages):
    _, (states, _) = three_stages
    st = states[1]
    g = TrigPoly.monomial(1)
    assert st.c_value(g, 0) == pytest.approx(g(1 / (2 * st.m)))


def test_budget_exceeded_fails_loudly():
    fs, _ = theorem12_functions(enumerate_h(2), 5)
    with pytest.raises(ConstructionFailed) as e:
        lemma44_construct(fs, lambda n: 2.0**-n, 4, time_budget=1e-6)
    assert e.value.diagnostics


def test_driver_small():
    mu, ks, rep = theorem12_driver(h_count=2, stages=3)
    assert rep["checks_ok"] and rep["gram_ok"] and rep["final_pairings_ok"]
    assert rep["certificate"].verdict == "pass"
    assert mu.is_probability()
