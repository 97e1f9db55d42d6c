import numpy as np
import pytest

from weakcyc.circle import Check, CircleMeasure, CombMeasure, TrigPoly, lemma43_step
from weakcyc.circle.lemma43 import merge_checks, plan_comb, strict, weak


def test_check_helpers():
    assert strict(1.0, 0.5, "exact").ok and not strict(1.0, 1.0, "exact").ok
    assert weak(1.0, 1.0, "exact").ok
    m = merge_checks(strict(1.0, 0.5, "exact"), weak(1.0, 0.9, "sampled"))
    assert m.ok and m.slack == pytest.approx(0.1) and "sampled" in m.kind
    c = Check(np.bool_(True), np.float64(0.5), "exact")
    assert type(c.ok) is bool and type(c.slack) is float
    assert c.as_dict()["ok"] is True


def test_kronecker_route_single_arc():
    r = lemma43_step(CircleMeasure.lebesgue(), [(0.0, 1.0)], [1.0], 0, 0.05)
    assert r.ok and r.k > 0
    assert abs(r.nu.fourier(r.k) - 1.0) < 0.05
    assert r.nu.is_probability()


def test_kronecker_route_two_arcs():
    arcs = [(0.0, 0.5), (0.5, 1.0)]
    c = [0.5, 0.5j]
    r = lemma43_step(CircleMeasure.lebesgue(), arcs, c, 10, 0.05)
    assert r.ok and r.k > 10
    for (a, b), cj in zip(arcs, c):
        piece = r.nu.restrict((a, b))
        assert piece.total_mass == pytest.approx(0.5, abs=1e-12)
        assert abs(piece.fourier(r.k) / 0.5 - cj) < 0.05


def test_kronecker_route_argument_errors():
    with pytest.raises(ValueError):
        lemma43_step(CircleMeasure.lebesgue(), [(0.0, 1.0)], [0.0], 0, 0.05)
    with pytest.raises(ValueError):
        lemma43_step(CircleMeasure.lebesgue(), [(0.0, 0.5)], [1.0], 0, 0.05)
    with pytest.raises(ValueError):
        lemma43_step(CircleMeasure.lebesgue(), [(0.0, 1.0)], [1.0], 0, -1)
    with pytest.raises(ValueError):
        lemma43_step(CircleMeasure.lebesgue(), [(0.0, 1.0)], [1.0], 0, 0.1, method="other")


def test_comb_route_writes_targets():
    c = [0.5, 0.5j, -0.5, 0.25]
    tests = [TrigPoly.monomial(1), TrigPoly({2: 1.0, -1: 0.5})]
    r = lemma43_step(CombMeasure.lebesgue(4), 16, c, 0, 0.01, h_list=tests, method="comb")
    assert r.ok
    assert r.k % 16 == 0
    for j, cj in enumerate(c):
        piece = r.nu.restrict((j / 4, (j + 1) / 4))
        assert piece.total_mass == pytest.approx(0.25, abs=1e-12)
        assert abs(piece.fourier(r.k) * 4 - cj) < 0.01
    # the test functionals barely move
    for h in tests:
        old = sum(v * CombMeasure.lebesgue(4).fourier(k) for k, v in h.coeffs.items())
        new = sum(v * r.nu.fourier(k) for k, v in h.coeffs.items())
        assert abs(new - old) < 0.01


def test_comb_route_zero_targets_allowed():
    r = lemma43_step(CombMeasure.lebesgue(2), 4, [0.0, 0.3], 0, 0.02, method="comb")
    assert r.ok


def test_comb_plan_bounds():
    mu = CombMeasure.lebesgue(2)
    plan = plan_comb(mu, 8, np.array([0.4, 0.4j]), 0, 1e-3, 1e-2, [TrigPoly.monomial(3)], 0)
    assert plan.k % 8 == 0
    assert plan.change_bound(0) == 0
    assert plan.change_bound(plan.k) == plan.tv
    assert plan.change_bound(1) <= plan.change_bound(2) <= plan.tv
    assert plan.test_bound(TrigPoly.monomial(3)) <= 1e-2
