import math

import numpy as np
import pytest

from weakcyc import families, wcert
from weakcyc.lattice import ZVector, pnorm


def test_theorem15_params_values():
    c = wcert.theorem15_params(3)
    assert c.r(4) == 16
    assert c.alpha(np.array([0]))[0] == pytest.approx(math.log(2))
    assert c.rho(np.array([7]))[0] == pytest.approx(8 ** (-1 / 3) / math.log(9) ** 2)
    with pytest.raises(ValueError):
        wcert.WCertificate(c.r, c.alpha, c.rho, 1.0)


def test_shifted_certificate():
    c = wcert.theorem15_params(3).shifted(3)
    assert c.r(0) == 8
    assert c.unit_series is None


def test_reindex_offset_for_powers_of_two():
    # 2^(n+m) > 2^(n+m-1) + 2^(n+m-2) always, but r_1 > r_0 needs nothing extra
    assert wcert.reindex_offset(wcert.theorem15_params(3)) == 0
    bad = wcert.WCertificate(lambda n: n, np.log, np.ones_like, 2.0)
    with pytest.raises(ValueError):
        wcert.reindex_offset(bad)


def test_c0_variant():
    rep = wcert.check_w_conditions(families.unweighted(), wcert.theorem15_params(3), 2000, space="c0")
    assert "W3'" in rep.conditions and "W4'" in rep.conditions
    with pytest.raises(ValueError):
        wcert.check_w_conditions(families.unweighted(), wcert.theorem15_params(3), 10, space="l1")


def test_generic_weights_are_capped():
    with pytest.raises(ValueError):
        wcert.check_w_conditions(families.prop19(3), wcert.prop19_params(3), 10**5)


def test_prop19_certificate_runs():
    rep = wcert.check_w_conditions(families.prop19(3), wcert.prop19_params(3), 40)
    assert set(rep.summary()) == {"W1", "W2", "W3", "W4"}
    assert rep.xi is not None and rep.theta is not None
    assert rep.conditions["W3"].detail["verdict"].certified
    assert rep.overall


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0])
def test_prop19_w3_tail_dominates_partial_tails(p):
    n = np.arange(0, 10**6, dtype=float)
    terms = np.log(np.log(n + 4)) ** p / ((n + 1) * np.log2(n + 2) ** 2)
    for big_n in (10, 100, 5000):
        assert terms[big_n + 1:].sum() <= wcert.prop19_w3_tail(p, big_n)
    assert wcert.prop19_w3_tail(p, 1) == math.inf


def test_dense_targets_distinct_and_ordered():
    ts = list(wcert.dense_targets(200))
    assert len(ts) == len(set(ts)) == 200
    assert all(t for t in ts)
    assert ts[0].gamma() <= 1


def test_kappa_progressions_are_disjoint():
    targets = list(wcert.dense_targets(6))
    k = wcert.build_kappa(targets, lambda n: math.log(n + 2), 2.0)
    sets = [set(k.members(n, 20000)) for n in range(len(k.targets))]
    for i in range(len(sets)):
        for j in range(i):
            assert not (sets[i] & sets[j])
        for m in list(sets[i])[:20]:
            assert k.index_of(m) == i
            assert k(m) == k.targets[i]
    assert k(2) == ZVector() or k.index_of(2) is not None
    assert k.density(0) == pytest.approx(1 / k.primes[0])


def test_kappa_rejects_duplicates():
    x = ZVector.basis(0)
    with pytest.raises(ValueError):
        wcert.build_kappa([x, x], lambda n: n)


def test_kappa_dominated_by_a():
    targets = list(wcert.dense_targets(10))
    k = wcert.build_kappa(targets, lambda n: float(n), 2.0)
    for n, (x, m) in enumerate(zip(k.targets, k.m)):
        assert m >= max(x.gamma(), pnorm(x, 2).linear())


def test_a_sequence_constraints():
    cert = wcert.theorem15_params(3)
    a = wcert.choose_a_sequence(families.unweighted(), cert, 6)
    v = a.values
    c = cert.shifted(a.offset)
    r = [c.r(n) for n in range(6)]
    assert all(x <= y for x, y in zip(v, v[1:]))
    assert all(v[n] + v[n - 1] < r[n] - r[n - 1] - r[n - 2] for n in range(2, 6))


def test_prop34_evidence_constant_finite():
    w = families.unweighted()
    cert = wcert.theorem15_params(3)
    rep = wcert.check_w_conditions(w, cert, 10**4)
    vec = wcert.build_prop34_vector(w, cert, stages=5, horizon=10**4)
    ev = wcert.vector_pseq_evidence(rep, vec)
    assert ev.kind == "disjoint" and 1.0 <= ev.constant < math.inf


def test_prop34_summands_norms_add():
    w = families.unweighted()
    vec = wcert.build_prop34_vector(w, wcert.theorem15_params(3), stages=4)
    total = sum(2 ** (3 * pnorm(s, 3).value) for _, s in vec.summands if s)
    assert 2 ** (3 * pnorm(vec.u, 3).value) == pytest.approx(total, rel=1e-12)


@pytest.mark.parametrize("inverse", [False, True])
def test_prop18_certificates_pass(inverse):
    w = families.make_family("prop18_inverse" if inverse else "prop18")
    rep = wcert.check_w_conditions(w, wcert.prop18_params(inverse), 60)
    assert rep.overall
