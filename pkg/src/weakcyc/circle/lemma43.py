"""One building step of the measure construction.

Given a probability mu with a step density, disjoint arcs I_j carrying all
of its mass and targets c_j with 0 < |c_j| <= 1, produce nu and k > k0 with

    (B1) nu(I_j) = mu(I_j),
    (B2) |[mu - nu, h]| < eps for the test functions h,
    (B3) |restricted nu^(k) on I_j - c_j mu(I_j)| < eps,
    (B4) sup |mu^ - nu^| <= 2 max |c_j|.

``method="kronecker"`` follows the classical route: atoms at independent
points, a rotation k that steers every atom toward its target, then a step
smoothing of the atoms.  The number of atoms grows with the test functions
and the search cost grows like tol^-N, so this route is practical only for a
handful of atoms.  ``method="comb"`` multiplies the density by one resonant
comb level (see ``comb``); it needs no search and scales to the frequencies
of a full multi-stage construction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .comb import CombLevel, CombMeasure, box_width_for, cell_integral, comb_parameters
from .discretize import discretize_ac, discretize_atomic, refine
from .kronecker import kronecker_search
from .measure import CircleMeasure, pair
from .trigpoly import TrigPoly

MAX_BITS = 4096


class RefinementTooLarge(Exception):
    pass


@dataclass
class Check:
    """A verified condition: ``slack`` = allowed - observed (positive when it holds)."""

    ok: bool
    slack: float
    kind: str  # exact | structural | sampled
    detail: str = ""

    def __post_init__(self):
        self.ok = bool(self.ok)
        self.slack = float(self.slack)

    def as_dict(self):
        return {"ok": self.ok, "slack": self.slack, "kind": self.kind, "detail": self.detail}


def strict(bound: float, value: float, kind: str, detail: str = "") -> Check:
    return Check(value < bound, bound - value, kind, detail)


def weak(bound: float, value: float, kind: str, detail: str = "") -> Check:
    """value <= bound; the logged slack carries the margin (zero counts as passing)."""
    return Check(value <= bound, bound - value, kind, detail)


def merge_checks(*checks: Check) -> Check:
    """All must hold; the logged slack is the smallest one."""
    worst = min(checks, key=lambda c: c.slack)
    return Check(all(c.ok for c in checks), worst.slack, "+".join(sorted({c.kind for c in checks})),
                 "; ".join(c.detail for c in checks if c.detail))


@dataclass
class RefinementResult:
    nu: object
    k: int
    checks: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())


def _test_scale(h_list: Sequence[TrigPoly]) -> float:
    """max over tests of deg * sup, the Lipschitz constant in t divided by 2 pi."""
    return max((h.degree * h.sup_bound for h in h_list), default=0.0)


def _sample_freqs(K: int, extra: Sequence[int] = (), count: int = 256, seed: int = 0) -> list[int]:
    rng = random.Random(seed)
    ls = set(range(-min(K, 64), min(K, 64) + 1))
    ls.update(int(x) for x in extra)
    ls.update(rng.randint(-K, K) for _ in range(count))
    return sorted(ls)


# classical route


def _kronecker_step(mu: CircleMeasure, arcs, c, k0, eps, h_list, kmax, cap, b4_range):
    m = len(arcs)
    amp = np.abs(c)
    if mu.atoms:
        raise ValueError("mu must be absolutely continuous")
    restricted = [mu.restrict(I) for I in arcs]
    masses = [r.total_mass for r in restricted]

    # decay of the restricted coefficients: |mu_I^(k)| <= V / (pi |k|)
    V = max(r.jump_variation() for r in restricted)
    k1 = math.floor(3 * V / (math.pi * eps)) + 1

    # gamma: atoms at independent points of a refinement fine enough for the tests
    L = _test_scale(h_list)
    longest = max(b - a for a, b in arcs)
    r = 1
    if L:
        target = eps / (2 * m * 2 * math.pi * L)
        while longest / r >= target:
            r *= 2
    pieces = refine(arcs, r)
    if len(pieces) > cap:
        raise RefinementTooLarge(f"{len(pieces)} pieces exceed the cap {cap}")
    gamma, pts = discretize_atomic(mu, pieces)

    # steer every atom toward the phase of its arc's target
    owner = []
    for t, _ in gamma.atoms:
        owner.append(next(j for j, (a, b) in enumerate(arcs) if a <= t < b))
    by_t = {p.t: p for p in pts}
    points = [by_t[t] for t, _ in gamma.atoms]
    targets = [c[j] / abs(c[j]) for j in owner]
    tol = eps / (3 * 2 * math.pi)
    kr = kronecker_search(points, targets, max(k0, k1 - 1), tol, kmax)
    k = kr.k

    # eta: spread each atom over a short sub-piece of its piece
    width_cap = min(eps / (6 * math.pi * k), eps / (2 * m * 2 * math.pi * L) if L else math.inf)
    e = 0
    plen = min(b - a for a, b in pieces)
    while plen / 2**e >= width_cap:
        e += 1
    sub = []
    for (t, _), (a, b) in zip(gamma.atoms, [next(P for P in pieces if P[0] <= t < P[1]) for t, _ in gamma.atoms]):
        w = (b - a) / 2**e
        i = math.floor((t - a) / w)
        sub.append((a + i * w, a + (i + 1) * w))
    eta = discretize_ac(gamma, sub)

    nu = CircleMeasure()
    for j, I in enumerate(arcs):
        nu = nu + restricted[j].scale(1 - amp[j]) + eta.restrict(I).scale(amp[j])

    checks = {}
    b1 = max(abs(nu.mass(I) - masses[j]) for j, I in enumerate(arcs))
    checks["B1"] = weak(1e-12, b1, "exact", "arc masses")
    b2 = max((abs(pair(mu, h) - pair(nu, h)) for h in h_list), default=0.0)
    checks["B2"] = strict(eps, b2, "exact", f"{len(h_list)} tests")
    b3 = max(abs(nu.restrict(I).fourier(k) - c[j] * masses[j]) for j, I in enumerate(arcs))
    checks["B3"] = strict(eps, b3, "exact", f"k = {k}")
    K = b4_range or 4 * k
    ls = _sample_freqs(K, (k, -k, 2 * k))
    b4 = float(np.max(np.abs(mu.fourier_many(ls) - nu.fourier_many(ls))))
    checks["B4"] = weak(2 * float(amp.max()), b4, "sampled", f"{len(ls)} frequencies in [-{K}, {K}]")
    diag = {"k1": k1, "refinement": r, "atoms": len(gamma.atoms), "kronecker_defect": kr.defect,
            "smoothing_width": (pieces[0][1] - pieces[0][0]) / 2**e, "gamma": gamma, "eta": eta}
    return RefinementResult(nu, k, checks, diag)


# comb route


@dataclass
class CombPlan:
    """Parameters of one comb level and the bounds they certify."""

    k: int
    Q: int
    w: float
    M: int  # cell count of the previous level (the base grid for the first level)
    m: int  # grid of the arcs I_j
    s: np.ndarray
    start: np.ndarray
    defect: np.ndarray  # |harmonic - c| per base arc
    dmax: np.ndarray  # max density per base arc before the step
    tv: float  # ||mu - nu|| (total variation)
    maxds: float

    def change_bound(self, l: int) -> float:
        """Upper bound on |nu^(l) - mu^(l)|.

        On a cell of the previous level the density is a constant D and
        nu - mu = D (F - 1) with F - 1 of mean zero over each of its k
        periods; comparing e^(2 pi i l t) with its value at the centre of each
        period gives 2 pi (1 - w) D s |l| / k, and summing the periods of a
        cell as a geometric series gives pi (1 - w) D s M / k when |l| <= k/2.
        """
        l = abs(int(l))
        if l == 0:
            return 0.0
        if 2 * l > self.k:
            return self.tv
        return min(self.tv, 2 * math.pi * (1 - self.w) * self.maxds * min(l, self.M / 2) / self.k)

    def test_bound(self, h: TrigPoly) -> float:
        return math.fsum(abs(v) * self.change_bound(q) for q, v in h.coeffs.items())

    def band_bound(self, band: int) -> float:
        """sup over 0 < |l| < band of change_bound (it is non-decreasing in |l| up to k/2)."""
        return self.change_bound(band - 1) if band > 1 else 0.0


def _cells(mu: CombMeasure) -> int:
    return mu.levels[-1].Q * mu.levels[-1].k if mu.levels else mu.G


def plan_comb(mu: CombMeasure, m: int, c_base, k0: int, eps_b3: float, eps_tests: float,
              h_list: Sequence[TrigPoly] = (), band: int = 0) -> CombPlan:
    """Choose Q, w and k (all powers of two times the grids) for one comb level."""
    c_base = np.asarray(c_base, dtype=complex)
    if c_base.shape != (mu.G,):
        raise ValueError("the comb route takes one target per base arc")
    M = _cells(mu)
    if m % M:
        raise ValueError(f"arc grid {m} must be a multiple of the current cell count {M}")
    amp = float(np.abs(c_base).max())
    w = box_width_for(amp)
    dmax = mu.arc_max_density()
    Q = max(4, round(2 / w))
    while True:
        s, start, defect = comb_parameters(c_base, Q, w)
        # per arc I of the grid m: mu(I) |harmonic - c| <= dmax / m * defect
        if float(np.max(dmax * defect)) / m < eps_b3:
            break
        Q *= 2
        if Q.bit_length() > 60:
            raise RefinementTooLarge("phase grid Q exploded")
    maxds = float(np.max(dmax * s))
    masses = mu.base / mu.G
    tv = 2 * (1 - w) * math.fsum((masses * s).tolist())
    k = m
    while True:
        plan = CombPlan(k, Q, w, M, m, s, start, defect, dmax, tv, maxds)
        degs = max((h.degree for h in h_list), default=0)
        good = (k > k0 and k >= 2 * max(band, degs)
                and all(plan.test_bound(h) < eps_tests for h in h_list)
                and plan.band_bound(band) <= eps_tests)
        if good:
            return plan
        k *= 2
        if k.bit_length() > MAX_BITS:
            raise RefinementTooLarge(f"k exceeds 2^{MAX_BITS}")


def apply_plan(mu: CombMeasure, plan: CombPlan) -> CombMeasure:
    return mu.with_level(CombLevel(plan.k, plan.Q, round(plan.w * plan.Q), plan.s, plan.start))


def sample_arcs(G: int, m: int, count: int, seed: int = 0) -> list[int]:
    """Deterministic sample of arc indices of the grid m, spread over the base arcs."""
    rng = random.Random(seed)
    per = m // G
    out = {0, m - 1}
    for j in range(G):
        out.add(j * per + rng.randrange(per))
        if len(out) >= count:
            break
    return sorted(out)


def local_period(nu: CombMeasure, t0: Fraction, k: int) -> tuple[float, complex]:
    """(mass, coefficient at k) of nu over the period [t0, t0 + 1/k) of its last level.

    The density is constant on each of the Q cells of the period; it is
    evaluated pointwise with exact rational arithmetic, independently of the
    Fourier engine.
    """
    lev = nu.levels[-1]
    Q = lev.Q
    dens = np.array([nu.density_at(t0 + Fraction(2 * c + 1, 2 * Q * k)) for c in range(Q)])
    mass = math.fsum(dens.tolist()) / (Q * k)
    ci = cell_integral(k, Q * k)
    coef = complex(np.sum(dens * np.exp(2j * np.pi * np.arange(Q) / Q)) * ci)
    return mass, coef


def _comb_step(mu: CombMeasure, m: int, c_base, k0, eps, h_list, eps_tests, band, samples, b4_count):
    eps_tests = eps if eps_tests is None else eps_tests
    plan = plan_comb(mu, m, c_base, k0, eps, eps_tests, h_list, band)
    nu = apply_plan(mu, plan)
    k = plan.k
    c_base = np.asarray(c_base, dtype=complex)
    checks = {}

    # B1: whole periods of a mean-one factor inside every arc; sampled pointwise
    per = k // m
    worst1 = worst3 = 0.0
    arcs = sample_arcs(mu.G, m, samples)
    for i in arcs:
        t0 = Fraction(i, m)
        before = mu.density_at(t0 + Fraction(1, 2 * m)) / m
        mass, coef = local_period(nu, t0, k)
        j = i * mu.G // m
        worst1 = max(worst1, abs(per * mass - before) / before if before else per * mass)
        worst3 = max(worst3, abs(per * coef - c_base[j] * before))
    checks["B1"] = merge_checks(Check(k % m == 0, 1.0, "structural", f"{per} periods per arc"),
                                weak(1e-12, worst1, "sampled", f"relative, {len(arcs)} arcs"))
    b3_struct = float(np.max(plan.dmax * plan.defect)) / m
    checks["B3"] = merge_checks(strict(eps, b3_struct, "structural", f"Q = {plan.Q}"),
                                strict(eps, worst3, "sampled", f"{len(arcs)} arcs"))

    # B2: bound from the comb geometry, and the exact pairing
    b2_struct = max([plan.test_bound(h) for h in h_list] + [plan.band_bound(band)])
    b2_exact = max((abs(pair(mu, h) - pair(nu, h)) for h in h_list), default=0.0)
    checks["B2"] = merge_checks(strict(eps_tests, b2_struct, "structural",
                                       f"{len(h_list)} tests, band {band}"),
                                strict(eps_tests, b2_exact, "exact"))

    # B4: total variation, and sampled frequencies
    a = float(np.abs(c_base).max())
    ls = _sample_freqs(4 * k, (k, -k, 2 * k, plan.Q * k // 2, plan.M, band), b4_count)
    b4 = float(np.max(np.abs(mu.fourier_many(ls) - nu.fourier_many(ls))))
    checks["B4"] = merge_checks(weak(2 * a, plan.tv, "structural", "total variation"),
                                weak(2 * a, b4, "sampled", f"{len(ls)} frequencies"))
    diag = {"Q": plan.Q, "w": plan.w, "plan": plan, "b4_sampled_max": b4, "b3_structural": b3_struct}
    return RefinementResult(nu, k, checks, diag)


def lemma43_step(mu, arcs, c, k0: int, eps: float, h_list: Sequence[TrigPoly] = (), method: str = "kronecker",
                 eps_tests: float | None = None, band: int = 0, kmax: int = 1 << 24, cap: int = 20000,
                 b4_range: int | None = None, samples: int = 16, b4_count: int = 256) -> RefinementResult:
    """Run one step; see the module docstring for (B1)-(B4).

    Kronecker route: ``mu`` is a CircleMeasure, ``arcs`` a list of arcs and
    ``c`` one target per arc.  Comb route: ``mu`` is a CombMeasure, ``arcs``
    the size m of a uniform grid (a multiple of the current cell count) and
    ``c`` one target per base arc.  ``eps_tests`` (default ``eps``) is the
    budget for (B2); ``band`` adds the tests z^l, 0 < |l| < band.
    """
    c = np.asarray(c, dtype=complex)
    if np.abs(c).max() > 1 or (method == "kronecker" and np.any(c == 0)):
        raise ValueError("targets must satisfy 0 < |c_j| <= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if method == "kronecker":
        if band:
            h_list = list(h_list) + [TrigPoly.monomial(l) for l in range(-band + 1, band) if l]
        if len(c) != len(arcs):
            raise ValueError("one target per arc")
        if abs(sum(mu.mass(I) for I in arcs) - 1) > 1e-12:
            raise ValueError("the arcs must carry all of the mass")
        return _kronecker_step(mu, list(arcs), c, k0, eps if eps_tests is None else min(eps, eps_tests),
                               list(h_list), kmax, cap, b4_range)
    if method == "comb":
        return _comb_step(mu, int(arcs), c, k0, eps, list(h_list), eps_tests, band, samples, b4_count)
    raise ValueError(f"unknown method {method!r}")
