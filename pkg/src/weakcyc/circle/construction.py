"""Inductive construction of a probability measure with vanishing Fourier
coefficients and almost orthogonal functions g_n = z^(k_n) - f_n.

Stage n keeps a measure mu^n, integers k_n < k_(n+1), j_n, m_n (m_(n-1)
divides m_n) and constants b^n_j approximating f_(n+1) on the arcs of the
grid m_n.  Each stage is one comb step (``lemma43``) and logs the conditions
P1-P9 with numeric slacks:

  P1  k, j, m strictly increasing          P6  |mu^n^(l)| <= eps_n for |l| >= j_n
  P2  m_(n-1) | m_n                        P7  |change of mu^(l)| <= eps_n for |l| < j_(n-1)
  P3  constants approximate g_d, f_(n+1)   P8  sup |change of mu^| <= 2 max |b^(n-1)|
  P4  masses of the arcs of m_(n-1) kept   P9  |[mu^n - mu^(n-1), g_m conj(g_l)]| < eps_n
  P5  restricted mu^n^(k_n) ~ b^(n-1) mu^n(I), within eps_n / m_(n-1)

Each check is either exact (integer arithmetic, or a finite sum computed
with exact phase reduction), structural (a proven bound evaluated on the
stage parameters) or sampled (direct evaluation at a deterministic sample
where the full range is far too large to enumerate).
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..closure import (MultiplicationOperator, PSeqEvidence, antisupercyclicity_stat, gram_2seq_bound,
                       l24_divergence, power_log_rule, prop24_certificate)
from .comb import CombMeasure
from .lemma43 import Check, lemma43_step, merge_checks, sample_arcs, strict, weak
from .measure import pair
from .trigpoly import TrigPoly


class ConstructionFailed(Exception):
    """A stage check failed or the run left its budget; ``diagnostics`` says where."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


# schedules and test functions


def eps_schedule(delta: Sequence[float]) -> list[float]:
    """eps_n = 2^-n / 24 * min_{m <= n} delta_m 2^m, n = 1..len(delta).

    Then sum_{k >= n} eps_k <= delta_n / 12 < delta_n / 6.
    """
    out, floor = [], math.inf
    for n, d in enumerate(delta, 1):
        if d <= 0:
            raise ValueError("delta must be positive")
        floor = min(floor, d * 2.0**n)
        out.append(2.0**-n / 24 * floor)
    return out


def _gauss_order(t: int) -> list[complex]:
    vals = [complex(a, b) for a in range(-t, t + 1) for b in range(-t, t + 1) if a or b]
    return sorted(vals, key=lambda z: (max(abs(z.real), abs(z.imag)), abs(z.real) + abs(z.imag),
                                       z.imag != 0, z.real < 0, z.imag < 0, abs(z.imag)))


def enumerate_h(count: int) -> list[TrigPoly]:
    """The first ``count`` members of a dense sequence in the unit sphere of C(T).

    Height t lists polynomials with frequencies |k| <= t and Gaussian-integer
    coefficients with components in [-t, t], by number of terms, then
    coefficient tuple, then frequencies (0, 1, -1, 2, -2, ...).  Only primitive
    coefficient vectors are kept, each once, and every one is normalized to
    sup norm 1.  Every polynomial with Gaussian-rational coefficients is a
    positive multiple of exactly one listed vector, so the normalized list is
    dense.  It starts 1, z, conj(z), -1.
    """
    out: list[TrigPoly] = []
    seen = set()
    t = 1
    while len(out) < count:
        freqs = [0] + [s * f for f in range(1, t + 1) for s in (1, -1)]
        coefs = _gauss_order(t)
        for r in range(1, len(freqs) + 1):
            for cs in itertools.product(coefs, repeat=r):
                for fr in itertools.combinations(freqs, r):
                    key = tuple(sorted(zip(fr, cs), key=lambda x: x[0]))
                    if key in seen:
                        continue
                    parts = [int(v) for _, c in key for v in (c.real, c.imag)]
                    if math.gcd(*parts) != 1:
                        continue
                    seen.add(key)
                    out.append(TrigPoly(dict(key)).normalized())
                    if len(out) >= count:
                        return out
        t += 1
    return out


def cantor_pairs(count: int, rows: int | None = None) -> list[tuple[int, int]]:
    """Diagonal enumeration of {1..rows} x N: (1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ..."""
    out = []
    s = 2
    while len(out) < count:
        for i in range(1, s):
            if rows is None or i <= rows:
                out.append((i, s - i))
                if len(out) == count:
                    break
        s += 1
    return out


def theorem12_functions(h: Sequence[TrigPoly], count: int) -> tuple[list[TrigPoly], list[tuple[int, int]]]:
    """f_n = 2^-i j^(-1/2) h_i with (i, j) the n-th pair."""
    pairs = cantor_pairs(count, len(h))
    fs = [h[i - 1] * (2.0**-i / math.sqrt(j)) for i, j in pairs]
    return fs, pairs


def g_function(k: int, f: TrigPoly) -> TrigPoly:
    return TrigPoly.monomial(k) - f


def pow2_at_least(x: float) -> int:
    if x <= 1:
        return 1
    n = 1 << max(int(math.floor(math.log2(x))) - 1, 0)
    while n < x:
        n *= 2
    return n


# stages


@dataclass
class ConstructionState:
    n: int
    mu: CombMeasure
    k: int
    j: int
    m: int
    eps: float
    b: np.ndarray  # b^n on the base arcs: f_(n+1) at their midpoints
    Q: int | None = None
    w: float | None = None
    checks: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    c_rule = "c^{n,d}_j = g_d at the midpoint of the j-th arc of the grid m_n"
    b_rule = "b^n_j = f_(n+1) at the midpoint of the base arc containing the j-th arc of the grid m_n"

    def c_value(self, g: TrigPoly, j: int) -> complex:
        return g(Fraction(2 * j + 1, 2 * self.m))

    def check_table(self) -> list[dict]:
        return [{"stage": self.n, "check": name, **c.as_dict()} for name, c in self.checks.items()]


def _p3_need(k: int, f: TrigPoly) -> float:
    """Grid size making midpoint constants of z^k - f accurate to 1 (scale by 1/eps)."""
    return 2 * math.pi * (k + f.degree * f.sup_bound)


def _p3_check(state_m: int, G: int, gs: Sequence[TrigPoly], f_next: TrigPoly, b: np.ndarray,
              eps_next: float, ks: Sequence[int], fs: Sequence[TrigPoly], samples: int) -> Check:
    # approximation margins (the quantitative content of P3)
    err_g = max(_p3_need(k, f) / (2 * state_m) for k, f in zip(ks, fs))
    err_b = 2 * math.pi * f_next.degree * f_next.sup_bound / (2 * G)
    struct = weak(eps_next, max(err_g, err_b), "structural", f"grid {state_m}, base grid {G}")
    # norm bounds |c| <= 1 + a_d <= 2 and |b| <= a_(n+1)
    # |b| is a rounded evaluation of f_(n+1), hence the relative allowance of 1e-12
    norms_ok = all(1 + f.sup_bound <= 2 for f in fs) and float(np.abs(b).max()) <= f_next.sup_bound * (1 + 1e-12)
    norms = Check(norms_ok, min(2 - (1 + f.sup_bound) for f in fs), "exact",
                  f"max|b| = {float(np.abs(b).max()):.6g} <= a = {f_next.sup_bound:.6g}")
    # direct evaluation at points of sampled arcs
    rng = random.Random(1)
    worst = 0.0
    for i in sample_arcs(G, state_m, samples):
        mid = Fraction(2 * i + 1, 2 * state_m)
        t = Fraction(i, state_m) + Fraction(rng.randrange(1 << 20), (1 << 20) * state_m)
        for g in gs:
            worst = max(worst, abs(g(t) - g(mid)))
        worst = max(worst, abs(f_next(t) - b[i * G // state_m]))
    sampled = weak(eps_next, worst, "sampled", f"{samples} arcs")
    return merge_checks(struct, norms, sampled)


def _sampled_band(rng: random.Random, band: int, count: int) -> list[int]:
    ls = set(range(1, min(band, 64)))
    ls.update({band - 1, band // 2, max(band - 2, 1)})
    ls.update(rng.randrange(1, band) for _ in range(count) if band > 1)
    pos = sorted(x for x in ls if 0 < x < band)
    return [0] + pos + [-x for x in pos[:16]]


def _decay_samples(j: int, count: int, seed: int = 2) -> list[int]:
    rng = random.Random(seed)
    ls = {j, j + 1, 2 * j, -j, -(2 * j)}
    ls.update(rng.randrange(j, 2 * j + 1) for _ in range(count))
    return sorted(ls)


def lemma44_construct(f_seq: Sequence[TrigPoly], delta: Sequence[float] | Callable[[int], float], stages: int,
                      G: int | None = None, time_budget: float = 300.0, samples: int = 16,
                      freq_samples: int = 64, log: Callable[[str], None] | None = None
                      ) -> tuple[list[ConstructionState], list[int]]:
    """Run ``stages`` stages; ``f_seq`` needs stages + 1 entries (f_(N+1) fixes b^N).

    ``delta`` is a sequence or a function of n >= 1.  Raises
    ConstructionFailed when a check fails or the time budget runs out.
    """
    N = stages
    if N < 1:
        raise ValueError("stages must be >= 1")
    if len(f_seq) < N + 1:
        raise ValueError("f_seq needs stages + 1 functions")
    fs = list(f_seq[: N + 1])
    if any(f.sup_bound > 1 for f in fs):
        raise ValueError("every f_n needs sup norm <= 1")
    dl = [delta(n) for n in range(1, N + 2)] if callable(delta) else list(delta)[: N + 1]
    if len(dl) < N + 1:
        dl = dl + [dl[-1] / 2 ** (i + 1) for i in range(N + 1 - len(dl))]
    eps = eps_schedule(dl)  # eps[n - 1] = eps_n
    E = lambda n: eps[n - 1]  # noqa: E731
    say = log or (lambda s: None)
    t0 = time.perf_counter()

    if G is None:
        G = pow2_at_least(max(2 * math.pi * f.degree * f.sup_bound / E(n) for n, f in enumerate(fs, 1) if n >= 2))
    base_mid = np.array([Fraction(2 * j + 1, 2 * G) for j in range(G)], dtype=object)

    def midvals(f: TrigPoly) -> np.ndarray:
        return np.array([f(t) for t in base_mid], dtype=complex)

    ks = [0]
    gs = [g_function(0, fs[0])]
    mu = CombMeasure.lebesgue(G)
    m1 = pow2_at_least(max(G, _p3_need(0, fs[0]) / E(2)))
    st = ConstructionState(1, mu, 0, 1, m1, E(1), midvals(fs[1]))
    st.checks["P3"] = _p3_check(m1, G, gs, fs[1], st.b, E(2), ks, fs[:1], samples)
    st.checks["P6"] = weak(E(1), mu.jump_variation_bound() / (math.pi * st.j), "structural",
                           "Lebesgue seed: all nonzero coefficients vanish")
    st.diagnostics = {"G": G, "seconds": time.perf_counter() - t0}
    states = [st]
    say(f"stage 1: G = {G}, m = {m1}")

    for n in range(2, N + 1):
        prev = states[-1]
        tests = [gs[a] * gs[b].conj() for a in range(len(gs)) for b in range(a)]  # g_m conj(g_l), l < m
        step = lemma43_step(prev.mu, prev.m, prev.b, prev.k, E(n) / prev.m, tests, method="comb",
                            eps_tests=E(n), band=prev.j, samples=samples, b4_count=freq_samples)
        plan = step.diagnostics["plan"]
        mu, k = step.nu, step.k
        ks.append(k)
        fn = fs[n - 1]
        gs.append(g_function(k, fn))
        m = pow2_at_least(max(plan.Q * k, 2 * prev.m, max(_p3_need(kd, fd) for kd, fd in zip(ks, fs)) / E(n + 1)))
        V = mu.jump_variation_bound()
        # a 1e-9 relative margin keeps V / (pi j) <= eps_n through float rounding
        j = max(prev.j + 1, math.ceil(V * (1 + 1e-9) / (math.pi * E(n))) + 1)
        stt = ConstructionState(n, mu, k, j, m, E(n), midvals(fs[n]), plan.Q, plan.w)
        C = stt.checks
        for name in ("B1", "B2", "B3", "B4"):
            stt.diagnostics[name] = step.checks[name]

        C["P1"] = Check(prev.k < k and prev.j < j and prev.m < m,
                        float(min(k - prev.k, j - prev.j, m - prev.m)), "exact", f"k = {k}, j = {j}, m = {m}")
        C["P2"] = Check(m % prev.m == 0, m / prev.m - 1, "exact", f"m_n / m_(n-1) = {m // prev.m}")
        C["P3"] = _p3_check(m, G, gs, fs[n], stt.b, E(n + 1), ks, fs[:n], samples)
        C["P4"] = step.checks["B1"]
        b3 = step.checks["B3"]
        C["P5"] = Check(b3.ok, b3.slack, b3.kind, b3.detail + f"; budget eps_n / m_(n-1) = {E(n) / prev.m:.3g}")

        tail = V / (math.pi * j)
        dec = _decay_samples(j, freq_samples)
        vals = np.abs(mu.fourier_many(dec))
        C["P6"] = merge_checks(weak(E(n), tail, "structural", f"V = {V:.4g}, |mu^(l)| <= V / (pi |l|)"),
                               weak(E(n), float(vals.max()), "sampled", f"{len(dec)} frequencies in [j, 2j]"))

        rng = random.Random(n)
        band = _sampled_band(rng, prev.j, freq_samples)
        diffs = np.abs(mu.fourier_many(band) - prev.mu.fourier_many(band))
        C["P7"] = merge_checks(weak(E(n), plan.band_bound(prev.j), "structural", f"band |l| < {prev.j}"),
                               weak(E(n), float(diffs.max()), "sampled", f"{len(band)} frequencies"))

        bound8 = 2 * float(np.abs(prev.b).max())
        b4 = step.checks["B4"]
        C["P8"] = Check(b4.ok, b4.slack, b4.kind,
                        f"2 max|b^(n-1)| = {bound8:.6g} <= 2 a_n = {2 * fn.sup_bound:.6g}")

        if tests:
            parts = []
            for h in tests:
                exact = abs(pair(mu, h) - pair(prev.mu, h))
                parts.append(strict(E(n), plan.test_bound(h), "structural"))
                parts.append(strict(E(n), exact, "exact"))
            C["P9"] = merge_checks(*parts)
            C["P9"].detail = f"{len(tests)} products"
        else:
            C["P9"] = Check(True, E(n), "exact", "no pairs yet")

        stt.diagnostics.update({"seconds": time.perf_counter() - t0, "k_bits": k.bit_length(),
                                "m_bits": m.bit_length(), "j_bits": j.bit_length(), "V": V,
                                "max_density": mu.max_density(), "tv": plan.tv})
        states.append(stt)
        say(f"stage {n}: k = 2^{k.bit_length() - 1}, Q = {plan.Q}, m = 2^{m.bit_length() - 1}, "
            f"j ~ 2^{j.bit_length() - 1}, {stt.diagnostics['seconds']:.1f}s")
        bad = [name for name, c in C.items() if not c.ok]
        if bad:
            raise ConstructionFailed(f"stage {n}: checks {bad} failed",
                                     {"stage": n, "checks": {b: C[b].as_dict() for b in bad},
                                      "ks": ks, "m": m, "j": j})
        if time.perf_counter() - t0 > time_budget:
            raise ConstructionFailed(f"time budget of {time_budget}s exhausted after stage {n}",
                                     {"stage": n, "seconds": time.perf_counter() - t0,
                                      "k_bits": k.bit_length(), "m_bits": m.bit_length(), "ks": ks})

    # |[mu^N, g_n conj(g_d)]| against 6 eps_n + sum_{m >= n} eps_(m+1) < delta_n
    final = states[-1]
    gram_rows = []
    for n in range(2, N + 1):
        for d in range(1, n):
            v = abs(pair(final.mu, gs[n - 1] * gs[d - 1].conj()))
            bound = 6 * E(n) + math.fsum(eps[n:])
            gram_rows.append({"n": n, "d": d, "value": v, "bound": bound, "delta": dl[n - 1],
                              "ok": v < bound < dl[n - 1]})
    final.diagnostics["pairings"] = gram_rows
    final.diagnostics["g"] = gs
    final.diagnostics["f"] = fs
    final.diagnostics["eps"] = eps
    final.diagnostics["delta"] = dl
    return states, ks


def weak_convergence_check(measures: Sequence, tests: Sequence[TrigPoly], arcs: Sequence | None = None) -> dict:
    """|[mu^n - mu^N, f]| per test, optionally also for each restriction to ``arcs``."""
    last = measures[-1]
    rows = []
    for f in tests:
        ref = pair(last, f)
        diffs = [abs(pair(mu, f) - ref) for mu in measures]
        row = {"test": repr(f), "diffs": diffs,
               "non_increasing": all(b <= a + 1e-12 for a, b in zip(diffs, diffs[1:]))}
        if arcs is not None:
            per_arc = []
            for I in arcs:
                r_last = pair(last.restrict(I), f)
                per_arc.append(max(abs(pair(mu.restrict(I), f) - r_last) for mu in measures))
            row["restricted_max"] = max(per_arc)
        rows.append(row)
    return {"rows": rows}


# the full driver


def theorem12_driver(h_count: int = 4, stages: int = 6, delta: Callable[[int], float] | None = None,
                     time_budget: float = 300.0, horizon: int = 10_000, samples: int = 16,
                     freq_samples: int = 64, log: Callable[[str], None] | None = None):
    """Build mu^N for f_n = 2^-i j^(-1/2) h_i and certify the almost orthogonality of g_n.

    Returns (mu^N, [k_1..k_N], report).  The report holds the stage states,
    the pairings |<g_n, g_d>| in L2(mu^N), the Gram sum against
    sum_n (n - 1) 4^-n = 1/9, the per-family divergence of sum_j 2^-2i / j,
    sampled decay snapshots and the aggregated weak supercyclicity evidence.
    """
    if h_count < 1 or stages < 1:
        raise ValueError("h_count and stages must be >= 1")
    delta = delta or (lambda n: 2.0**-n)
    hs = enumerate_h(h_count)
    fs, pairs = theorem12_functions(hs, stages + 1)
    states, ks = lemma44_construct(fs, delta, stages, time_budget=time_budget, samples=samples,
                                   freq_samples=freq_samples, log=log)
    mu = states[-1].mu
    gs = [g_function(k, f) for k, f in zip(ks, fs)]
    N = len(gs)
    gram = np.array([[pair(mu, gs[a] * gs[b].conj()) for b in range(N)] for a in range(N)])
    off = [(n + 1, d + 1, abs(gram[n, d])) for n in range(N) for d in range(n)]
    gram_sum = math.fsum(v * v for _, _, v in off)
    stats = gram_2seq_bound(gram=gram, declared_c=1 / 9 if gram_sum <= 1 / 9 else None)
    pair_rows = [{"n": n, "d": d, "value": v, "bound": 2.0**-n, "ok": v < 2.0**-n} for n, d, v in off]

    families = {}
    targets = []
    for i in range(1, h_count + 1):
        # alpha(m) = 2^-i j^(-1/2) on A_i; the series sum alpha^2 is l24 with c_j = 2^i (j)^(1/2), q = 2
        verdict = l24_divergence(power_log_rule(0.5, 0.0, 2.0**i), 2.0, horizon)
        families[i] = {"members": [n for n, (a, _) in enumerate(pairs[:N], 1) if a == i],
                       "trend": verdict.trend, "certified": verdict.certified,
                       "partial_sum": verdict.total}
        targets.append({"name": f"h_{i}", "p": 2.0, "c2": verdict,
                        "evidence": PSeqEvidence("gram", stats.bound, "2-sequence bound from the Gram sum")})
    cert = prop24_certificate(targets, 2.0)

    decay = []
    for st in states:
        ls = _decay_samples(st.j, freq_samples, seed=st.n)
        decay.append({"stage": st.n, "j": st.j, "sampled_max": float(np.abs(mu.fourier_many(ls)).max()),
                      "frequencies": len(ls)})
    stat = antisupercyclicity_stat(MultiplicationOperator(mu), TrigPoly.const(1), TrigPoly.const(1),
                                   [st.j for st in states])
    checks_ok = all(c.ok for st in states for c in st.checks.values())
    report = {
        "G": states[0].diagnostics["G"],
        "pairs": pairs[:N],
        "a": [f.sup_bound for f in fs],
        "states": states,
        "checks_ok": checks_ok,
        "pairings": pair_rows,
        "gram_sum": gram_sum,
        "gram_bound": 1 / 9,
        "gram_ok": gram_sum <= 1 / 9 + 1e-9,
        "two_sequence": stats,
        "families": families,
        "decay": decay,
        "coefficient_at_j": stat,
        "certificate": cert,
        "final_pairings_ok": all(r["ok"] for r in pair_rows),
    }
    return mu, ks, report
