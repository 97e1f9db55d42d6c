"""The (W1)-(W4) certificate for weak supercyclicity of invertible weighted
shifts, the progression map kappa and the candidate vector
u = sum rho_n T^(-r_n) kappa(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np
import sympy

from .closure import (PSeqEvidence, last_decade_increase, power_log_diverges, power_log_tail,
                      pseq_perturbation_bound, series_verdict)
from .lattice import WeightSequence, ZVector, apply_shift, beta, pnorm

GENERIC_HORIZON_CAP = 4000
W2_SAMPLE_CAP = 4096


@dataclass(frozen=True)
class WCertificate:
    """Sequences r_n, alpha_n, rho_n and the exponent p of the (W1)-(W4) conditions.

    ``r`` maps a Python int to a Python int; ``alpha`` and ``rho`` map an int
    array to a float array.  The optional ``unit_series`` pair (s, t) declares
    that rho_n^p alpha_n^p = (n+1)^(-s) ln(n+2)^(-t) exactly and
    ``rho_power`` that rho_n^(p/(p-1)) = (n+1)^(-s) ln(n+2)^(-t); with unit
    weights these turn the (W3)/(W4) trends into integral-test facts.
    """

    r: Callable[[int], int]
    alpha: Callable[[np.ndarray], np.ndarray]
    rho: Callable[[np.ndarray], np.ndarray]
    p: float
    name: str = "custom"
    unit_series: tuple | None = None
    rho_power: tuple | None = None
    alpha_unbounded: bool = False
    # (family name, N -> bound on the (W3) sum over n > N) valid for that family only
    w3_tail: tuple | None = None

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("the certificate needs p > 1")

    def shifted(self, m: int) -> "WCertificate":
        """The certificate with r_n, alpha_n, rho_n replaced by their values at n + m."""
        if m == 0:
            return self
        return WCertificate(lambda n: self.r(n + m), lambda n: self.alpha(np.asarray(n) + m),
                            lambda n: self.rho(np.asarray(n) + m), self.p, f"{self.name}+{m}",
                            None, None, self.alpha_unbounded)


def theorem15_params(p: float) -> WCertificate:
    """r_k = 2^k, alpha_n = ln(n+2), rho_n = (n+1)^(-1/p) ln(n+2)^(-2)."""
    return WCertificate(
        r=lambda n: 1 << n,
        alpha=lambda n: np.log(np.asarray(n, dtype=float) + 2),
        rho=lambda n: (np.asarray(n, dtype=float) + 1) ** (-1.0 / p) * np.log(np.asarray(n, dtype=float) + 2) ** -2,
        p=p,
        name=f"theorem15(p={p})",
        unit_series=(1.0, float(p)),
        rho_power=(1.0 / (p - 1), 2.0 * p / (p - 1)),
        alpha_unbounded=True,
    )


def prop18_params(inverse: bool = False) -> WCertificate:
    """rho = 1, r_n = 9^(2n+1) (9^(2n+2) for the inverse family), alpha_n = ln ln(n+4), p = 2."""
    off = 2 if inverse else 1
    return WCertificate(
        r=lambda n: 9 ** (2 * n + off),
        alpha=lambda n: np.log(np.log(np.asarray(n, dtype=float) + 4)),
        rho=lambda n: np.ones(np.shape(n)),
        p=2.0,
        name="prop18_inverse" if inverse else "prop18",
        alpha_unbounded=True,
    )


def prop19_params(p: float) -> WCertificate:
    """rho = 1, r_n = 3^n, alpha_n = ln ln(n+4)."""
    return WCertificate(
        r=lambda n: 3**n,
        alpha=lambda n: np.log(np.log(np.asarray(n, dtype=float) + 4)),
        rho=lambda n: np.ones(np.shape(n)),
        p=p,
        name=f"prop19(p={p})",
        alpha_unbounded=True,
        w3_tail=("prop19", lambda big_n: prop19_w3_tail(p, big_n)),
    )


def prop19_w3_tail(p: float, big_n: int) -> float:
    """Bound on sum_{n > N} ln ln(n+4)^p phi(n)^-p for the prop19 weights.

    With phi(n)^p = (n+1) log2(n+2)^2, each term is at most K h(n+4) where
    h(y) = (ln ln y)^p / (y ln(y)^2) and K = 2 ln(2)^2 (ln(N+4)/ln(N+2))^2
    (using n+1 >= (n+4)/2 for n >= 2).  h decreases once
    (ln y + 2) ln ln y > p, so the sum is at most K times the integral of h
    over [N+4, inf), which is the upper incomplete gamma Gamma(p+1, ln ln(N+4)).
    Returns inf when N is too small for these steps.
    """
    y0 = big_n + 3
    if big_n < 2 or y0 <= math.e or (math.log(y0) + 2) * math.log(math.log(y0)) <= p:
        return math.inf
    k = 2 * math.log(2) ** 2 * (math.log(big_n + 4) / math.log(big_n + 2)) ** 2
    v = math.log(math.log(big_n + 4))
    return k * float(sympy.uppergamma(sympy.Float(p) + 1, sympy.Float(v)).evalf(30))


def _lb(w: WeightSequence, a: int, b: int) -> float:
    """log2 beta(a, b) as a float; exact integer logs beyond the float range become +-inf."""
    v = beta(w, a, b).value
    if isinstance(v, int) and abs(v) > 1 << 1000:
        return math.inf if v > 0 else -math.inf
    return float(v)


def _is_unit(w: WeightSequence) -> bool:
    return w.lower_bound == 1.0 and w.upper_bound == 1.0


@dataclass
class ConditionResult:
    name: str
    status: str  # converging_at_horizon | diverging_at_horizon | inconclusive | pass | fail
    ok: bool
    detail: dict = field(default_factory=dict)


@dataclass
class WReport:
    cert: str
    family: str
    p: float
    horizon: int
    space: str
    conditions: dict
    offset: int
    overall: bool
    xi: np.ndarray | None = None
    theta: np.ndarray | None = None
    w3_terms: np.ndarray | None = None

    def summary(self) -> dict:
        return {name: (c.status, c.ok) for name, c in self.conditions.items()}


def _log2_terms_w3(w: WeightSequence, cert: WCertificate, horizon: int, lp: bool) -> np.ndarray:
    """log2 of rho_n^p alpha_n^p beta(1, r_n)^(-p) (or the p = 1 version for c0)."""
    ns = np.arange(horizon)
    lr = np.log2(cert.rho(ns)) + np.log2(cert.alpha(ns))
    if _is_unit(w):
        lb = np.zeros(horizon)
    else:
        lb = np.array([_lb(w, 1, cert.r(int(n))) for n in ns])
    e = cert.p if lp else 1.0
    return e * (lr - lb)


def _xi_generic(w: WeightSequence, cert: WCertificate, horizon: int, lp: bool) -> np.ndarray:
    """xi_m for m = 1..horizon-1 with the inner infinite sum truncated at the horizon."""
    ns = np.arange(horizon)
    p = cert.p if lp else 1.0
    la = np.log2(cert.alpha(ns)) + np.log2(cert.rho(ns))
    lrho = np.log2(cert.rho(ns))
    rs = [cert.r(int(n)) for n in ns]
    xi = np.full(horizon, np.nan)
    with np.errstate(over="ignore", under="ignore"):
        for m in range(1, horizon):
            below = np.array([p * (la[n] - lrho[m] + _lb(w, rs[n] - rs[m] + 1, 0)) for n in range(m)])
            above = np.array([p * (la[n] - lrho[m] - _lb(w, 1, rs[n] - rs[m]))
                              for n in range(m + 1, horizon)])
            if lp:
                xi[m] = float(np.sum(np.exp2(below))) + float(np.sum(np.exp2(above)))
            else:
                xi[m] = (float(np.exp2(below.max())) if below.size else 0.0) + \
                        (float(np.exp2(above.max())) if above.size else 0.0)
    return xi


def reindex_offset(cert: WCertificate, count: int = 64, limit: int = 256) -> int:
    """Smallest m with r_{1+m} > r_m and r_{n+m} > r_{n+m-1} + r_{n+m-2} for 2 <= n < count."""
    for m in range(limit):
        r = [cert.r(n + m) for n in range(count)]
        if r[1] > r[0] and all(r[n] > r[n - 1] + r[n - 2] for n in range(2, count)):
            return m
    raise ValueError("no re-indexing offset makes r grow faster than the sum of its two predecessors")


def check_w_conditions(w: WeightSequence, cert: WCertificate, horizon: int, space: str = "lp") -> WReport:
    """Finite-horizon report on (W1)-(W4), or (W3')/(W4') when ``space == 'c0'``.

    (W3) partial sums of rho^p alpha^p beta(1, r_n)^(-p); (W4) partial sums of
    theta_k^(-1/(p-1)) with theta_k = max_{m<=k} xi_m.  Unit weights use an
    O(horizon) evaluation; other weights evaluate xi in O(horizon^2) and are
    capped at GENERIC_HORIZON_CAP terms.
    """
    if not cert.p > 1:
        raise ValueError("p must exceed 1")
    lp = space == "lp"
    if space not in ("lp", "c0"):
        raise ValueError("space is 'lp' or 'c0'")
    unit = _is_unit(w)
    if not unit and horizon > GENERIC_HORIZON_CAP:
        raise ValueError(f"non-unit weights are evaluated up to {GENERIC_HORIZON_CAP} terms")
    p = cert.p
    conds = {}

    # (W1)
    ns = np.arange(horizon + 1)
    al = cert.alpha(ns)
    mono = bool(np.all(np.diff(al) >= 0))
    grow = bool(al[-1] > al[horizon // 2])
    conds["W1"] = ConditionResult("W1", "pass" if (mono and grow) else "fail", mono and grow,
                                  {"alpha_0": float(al[0]), "alpha_horizon": float(al[-1]),
                                   "declared_unbounded": cert.alpha_unbounded})

    # (W2): raw gaps and the offset used by the construction
    cnt = min(horizon, W2_SAMPLE_CAP)
    r = [cert.r(n) for n in range(cnt + 2)]
    gaps = [r[n + 2] - r[n + 1] - r[n] for n in range(cnt)]
    tail_min = min(gaps[cnt // 2:]) if cnt > 1 else gaps[0]
    head_max = max(gaps[: max(cnt // 10, 1)])
    increasing = all(a > 0 for a in gaps[cnt // 2:]) and tail_min > head_max
    try:
        offset = reindex_offset(cert)
    except ValueError:
        offset = -1
    conds["W2"] = ConditionResult("W2", "pass" if increasing and offset >= 0 else "fail",
                                  increasing and offset >= 0,
                                  {"sampled": cnt, "min_gap_late": _small(tail_min), "max_gap_early": _small(head_max),
                                   "reindex_offset": offset})

    # (W3) / (W3')
    lt = _log2_terms_w3(w, cert, horizon, lp)
    with np.errstate(under="ignore"):
        terms = np.exp2(lt)
    if lp:
        tail = None
        note = ""
        if unit and cert.unit_series is not None:
            s, t = cert.unit_series
            tail = power_log_tail(s, t, horizon - 1)
            note = f"terms are (n+1)^-{s} ln(n+2)^-{t}"
        elif cert.w3_tail is not None and cert.w3_tail[0] == w.name and w.params.get("p") == p:
            tail = cert.w3_tail[1](horizon - 1)
            note = "closed-form tail by integral comparison"
        v3 = series_verdict(terms, p, tail=tail, note=note)
        inc_abs, inc_rel = last_decade_increase(v3)
        ok3 = v3.trend == "converging_at_horizon"
        conds["W3"] = ConditionResult("W3", v3.trend, ok3,
                                      {"verdict": v3, "last_decade_abs": inc_abs, "last_decade_rel": inc_rel})
    else:
        last = terms[horizon // 10:]
        ok3 = bool(last.max() < terms[: max(horizon // 10, 1)].max() or last.max() == 0)
        conds["W3'"] = ConditionResult("W3'", "converging_at_horizon" if ok3 else "inconclusive", ok3,
                                       {"max_last_decade": float(last.max()), "first": float(terms[0])})

    # (W4) / (W4')
    if unit:
        xi = _xi_unit(cert, horizon, lp, terms, conds)
    else:
        xi = _xi_generic(w, cert, horizon, lp)
    theta = np.fmax.accumulate(xi[1:])  # theta_k for k = 1..horizon-1
    e = 1.0 / (p - 1) if lp else 1.0
    with np.errstate(divide="ignore", over="ignore"):
        w4 = np.where(np.isinf(theta), 0.0, theta ** (-e))
    div = None
    note = ""
    if unit and lp and cert.rho_power is not None and ok3:
        s, t = cert.rho_power
        div = power_log_diverges(s, t)
        note = (f"terms are within constant factors of rho_k^(p/(p-1)) = (k+1)^-{s:.4g} ln(k+2)^-{t:.4g}, "
                f"whose sum {'diverges' if div else 'converges'}")
    v4 = series_verdict(w4, e, diverges=div if div else None,
                        tail=power_log_tail(*cert.rho_power, horizon) if (div is False) else None, note=note)
    name4 = "W4" if lp else "W4'"
    ratio10 = v4.ratio(10) if horizon >= 10 else math.nan
    ratio100 = v4.ratio(100) if horizon >= 100 else math.nan
    ok4 = v4.trend == "diverging_at_horizon"
    conds[name4] = ConditionResult(name4, v4.trend, ok4, {"verdict": v4, "ratio_10": ratio10, "ratio_100": ratio100})

    overall = all(c.ok for c in conds.values())
    return WReport(cert.name, w.name or "custom", p, horizon, space, conds, max(offset, 0), overall,
                   xi, theta, terms)


def _small(x: int):
    return x if abs(x) < 2**53 else f"~2^{x.bit_length()}"


def _xi_unit(cert: WCertificate, horizon: int, lp: bool, terms: np.ndarray, conds: dict) -> np.ndarray:
    """xi_m for beta == 1: (sum_{n != m} alpha_n^p rho_n^p) / rho_m^p, remainder included when declared."""
    ns = np.arange(horizon)
    rho = cert.rho(ns)
    p = cert.p
    xi = np.full(horizon, np.nan)
    if lp:
        total = math.fsum(terms.tolist())
        v3 = conds["W3"].detail["verdict"]
        if v3.tail_bound is not None:
            total += v3.tail_bound
        xi[1:] = (total - terms[1:]) / rho[1:] ** p
    else:
        ar = cert.alpha(ns) * rho
        pre = np.fmax.accumulate(ar)
        suf = np.fmax.accumulate(ar[::-1])[::-1]
        for m in range(1, horizon):
            below = pre[m - 1]
            above = suf[m + 1] if m + 1 < horizon else 0.0
            xi[m] = (below + above) / rho[m]
    return xi


# kappa: the progression map


def dense_targets(limit: int | None = None) -> Iterator[ZVector]:
    """Deterministic enumeration of pairwise distinct nonzero finite vectors.

    Height h runs over 1, 2, ...; at height h the supports lie in [-h, h]
    and the coefficients in {j/h : |j| <= h}.  Every rational vector appears,
    so the enumeration is dense in l_p and c_0 over the reals.
    """
    seen = set()
    count = 0
    h = 1
    while True:
        idx = list(range(-h, h + 1))
        grid = [Fraction(j, h) for j in range(-h, h + 1)]
        # sparse vectors first: supports of size 1, then 2, ...
        for size in range(1, len(idx) + 1):
            for supp in _combinations(idx, size):
                for coeffs in _product_nonzero(grid, size):
                    key = tuple(zip(supp, coeffs))
                    if key in seen:
                        continue
                    seen.add(key)
                    yield ZVector.from_values({i: float(c) for i, c in key})
                    count += 1
                    if limit is not None and count >= limit:
                        return
        h += 1


def _combinations(items, k):
    from itertools import combinations

    return combinations(items, k)


def _product_nonzero(grid, k):
    from itertools import product

    nz = [g for g in grid if g != 0]
    return product(nz, repeat=k)


@dataclass
class KappaMap:
    """kappa(m) = target_n on A_n, zero elsewhere.

    A_0 = {j p_0 + 1 : j >= 1}, A_n = {p_0 ... p_{n-1} (j p_n + 1) : j >= 1}.
    """

    targets: list
    m: list  # m_n, None when the target is never assigned
    primes: list
    unassigned: list

    def progression(self, n: int):
        """(multiplier P_n, prime p_n) of A_n."""
        mult = 1
        for q in self.primes[:n]:
            mult *= q
        return mult, self.primes[n]

    def members(self, n: int, upto: int) -> list[int]:
        mult, q = self.progression(n)
        out = []
        j = 1
        while mult * (j * q + 1) <= upto:
            out.append(mult * (j * q + 1))
            j += 1
        return out

    def index_of(self, m: int) -> int | None:
        mult = 1
        for n, q in enumerate(self.primes):
            if m % mult:
                return None
            k = m // mult
            if k > q and (k - 1) % q == 0:
                return n
            mult *= q
            if mult > m:
                return None
        return None

    def __call__(self, m: int) -> ZVector:
        n = self.index_of(m)
        return self.targets[n] if n is not None else ZVector()

    def density(self, n: int) -> float:
        mult, q = self.progression(n)
        return 1.0 / (mult * q)


def build_kappa(targets: Sequence[ZVector], a: Callable[[int], float] | Sequence[float], p: float = 2.0,
                primes: Sequence[int] | None = None) -> KappaMap:
    """The progression map of the density lemma for a non-decreasing unbounded a.

    m_n is the smallest index (at least 1 and above m_{n-1}) from which a
    dominates both gamma(x_n) and ||x_n||_p; p_n is the smallest prime above
    max(m_n, p_{n-1}) unless ``primes`` fixes it.  When ``a`` is a finite
    table, targets that a never dominates are reported and left out.
    """
    targets = list(targets)
    if len(set(targets)) != len(targets) or any(not t for t in targets):
        raise ValueError("targets must be nonzero and pairwise distinct")
    table = None if callable(a) else list(a)

    def a_at(k):
        return a(k) if table is None else table[k]

    limit = len(table) if table is not None else 10**6
    ms, ps, used, unassigned = [], [], [], []
    prev_m, prev_p = 0, 1
    for n, x in enumerate(targets):
        need = max(x.gamma(), pnorm(x, p).linear())
        k = prev_m + 1
        while k < limit and a_at(k) < need:
            k += 1
        if k >= limit:
            unassigned.append(n)
            continue
        if primes is not None:
            q = primes[len(ps)]
            if q <= max(k, prev_p) or not sympy.isprime(q):
                raise ValueError(f"prime {q} must exceed m_n = {k} and the previous prime")
        else:
            q = int(sympy.nextprime(max(k, prev_p)))
        ms.append(k)
        ps.append(q)
        used.append(x)
        prev_m, prev_p = k, q
    return KappaMap(used, ms, ps, unassigned)


# the a-sequence and the vector u


@dataclass
class ASequence:
    values: list
    offset: int
    m_k: dict  # k -> m_k, or None when beyond the horizon
    caps: dict


def tail1_m(w: WeightSequence, cert: WCertificate, k: int, horizon: int, w3_tail: float | None) -> int | None:
    """Smallest M > k with sum_{n >= M} rho^p alpha^p beta(1, r_n - r_k)^(-p) < rho_k^p 2^(-pk).

    Summed explicitly up to the horizon; the remainder beyond it uses the (W3)
    tail bound for unit weights.  None when no M within the horizon works.
    """
    p = cert.p
    ns = np.arange(k + 1, horizon)
    if ns.size == 0:
        return None
    lr = p * (np.log2(cert.rho(ns)) + np.log2(cert.alpha(ns)))
    if _is_unit(w):
        lb = np.zeros(ns.size)
    else:
        rk = cert.r(k)
        lb = np.array([_lb(w, 1, cert.r(int(n)) - rk) for n in ns])
    with np.errstate(under="ignore"):
        t = np.exp2(lr - p * lb)
    rem = np.cumsum(t[::-1])[::-1]  # rem[i] = sum_{j >= i}
    extra = w3_tail if (w3_tail is not None and _is_unit(w)) else (0.0 if not _is_unit(w) else math.inf)
    budget = float(cert.rho(np.array([k]))[0]) ** p * 2.0 ** (-p * k)
    ok = np.nonzero(rem + extra < budget)[0]
    return int(ns[ok[0]]) if ok.size else None


def choose_a_sequence(w: WeightSequence, cert: WCertificate, count: int, horizon: int = 10**5,
                      offset: int | None = None, min_first: int = 1, max_offset: int = 64) -> ASequence:
    """Largest non-decreasing integers a_0..a_{count-1} meeting (an1)-(an3).

    (an1) 2 a_{m_k} < r_k - r_{k-1}; (an2) a_n c^(2 a_n) <= alpha_n;
    (an3) a_n + a_{n-1} < r_n - r_{n-1} - r_{n-2}.  Caps at later indices bind
    earlier ones through monotonicity; an (an1) cap whose m_k lies beyond the
    horizon binds every computed index.  With ``offset=None`` the re-indexing
    offset is the smallest one giving r_n > r_{n-1} + r_{n-2}, raised until
    a_0 >= ``min_first`` (up to ``max_offset``).
    """
    base = reindex_offset(cert) if offset is None else offset
    for off in range(base, (base if offset is not None else max_offset) + 1):
        seq = _a_for_offset(w, cert.shifted(off), count, horizon, off)
        if offset is not None or (seq.values and seq.values[0] >= min_first):
            return seq
    return _a_for_offset(w, cert.shifted(base), count, horizon, base)


def _a_for_offset(w, cert, count, horizon, off) -> ASequence:
    c = w.c
    ns = np.arange(count + 1)
    al = cert.alpha(ns)
    r = [cert.r(n) for n in range(count + 2)]
    cap2 = []
    for n in range(count + 1):
        a = 0
        while (a + 1) * c ** (2 * (a + 1)) <= al[n]:
            a += 1
        cap2.append(a)
    # (an3) lookahead: a_n <= a_{n+1} and a_{n+1} + a_n < D_{n+1} force 2 a_n < D_{n+1}
    cap3 = []
    for n in range(count + 1):
        d_next = r[n + 1] - r[n] - r[n - 1] if n >= 1 else None
        cap3.append((d_next - 1) // 2 if d_next is not None else math.inf)
    # (an1)
    w3_tail = None
    if cert.unit_series is not None and _is_unit(w):
        w3_tail = power_log_tail(*cert.unit_series, horizon - 1)
    m_k = {}
    cap1 = [math.inf] * (count + 1)
    for k in range(1, count + 2):
        mk = tail1_m(w, cert, k, horizon, w3_tail)
        m_k[k] = mk
        e = (r[k] - r[k - 1] - 1) // 2
        reach = count if mk is None else min(mk, count)
        for n in range(reach + 1):
            cap1[n] = min(cap1[n], e)
        if mk is not None and mk > count:
            break
        if mk is None:
            break
    caps = [min(cap1[n], cap2[n], cap3[n]) for n in range(count + 1)]
    suffix = caps[:]
    for n in range(count - 1, -1, -1):
        suffix[n] = min(suffix[n], suffix[n + 1])
    vals = []
    for n in range(count):
        v = suffix[n]
        if n >= 2:
            v = min(v, r[n] - r[n - 1] - r[n - 2] - 1 - vals[n - 1])
        vals.append(max(int(v), 0))
    return ASequence(vals, off, m_k, {"an1": cap1[:count], "an2": cap2[:count], "an3": cap3[:count]})


@dataclass
class SupercyclicVector:
    u: ZVector
    summands: list  # (n, rho_n T^(-r_n) kappa(n)) as ZVectors
    disjoint: bool
    norm_consistency: float  # | ||u||_p^p - sum rho^p ||kappa||^p | relative
    tail_bound: float | None
    a: ASequence
    kappa: KappaMap
    orbit_checks: dict
    decomposition: dict


def build_prop34_vector(w: WeightSequence, cert: WCertificate, kappa: KappaMap | None = None, stages: int = 6,
                        horizon: int = 10**5, targets: Sequence[ZVector] | None = None,
                        offset: int | None = None) -> SupercyclicVector:
    """Truncation u = sum_{n < stages} rho_n T^(-r_n) kappa(n) with all support bookkeeping.

    The certificate is used re-indexed by the offset of ``choose_a_sequence``.
    Checks: the summands have pairwise disjoint supports; ||u||_p^p equals
    the sum of the summand norms; for each k the decomposition
    T^(r_k) u = rho_k kappa(k) + v_k + z_k + y_k holds and the y_k + z_k have
    pairwise disjoint supports, together with the window separation that
    implies it.
    """
    p = cert.p
    aseq = choose_a_sequence(w, cert, stages, horizon, offset)
    c = cert.shifted(aseq.offset)
    if kappa is None:
        tg = list(targets) if targets is not None else list(dense_targets(64))
        kappa = build_kappa(tg, aseq.values, p)
    ns = np.arange(stages)
    rho = c.rho(ns)
    r = [c.r(n) for n in range(stages)]
    parts = []
    for n in range(stages):
        x = kappa(n)
        if x.gamma() > aseq.values[n] or (x and pnorm(x, p).linear() > aseq.values[n] + 1e-12):
            raise ValueError(f"kappa({n}) violates gamma, norm <= a_n")
        parts.append(apply_shift(w, x, -r[n]).scale(float(rho[n])))
    supports = [set(s.support) for s in parts]
    disjoint = all(not (supports[i] & supports[j]) for i in range(stages) for j in range(i))
    if not disjoint:
        raise ValueError("summands of u overlap; the (an3) gaps are violated")
    u = ZVector()
    for s in parts:
        u = ZVector({**u.entries, **s.entries})
    lhs = 2 ** (p * pnorm(u, p).value) if u else 0.0
    rhs = sum(float(rho[n]) ** p * (2 ** (p * pnorm(kappa(n), p).value) if kappa(n) else 0.0) for n in range(stages))
    consistency = abs(lhs - rhs) / max(rhs, 1e-300) if rhs else abs(lhs)
    # omitted tail: sum_{n >= stages} rho^p ||T^-r kappa||^p <= sum rho^p alpha^p beta(1, r_n)^-p
    tail = None
    if c.unit_series is None and _is_unit(w) and cert.unit_series is not None:
        s, t = cert.unit_series
        # shifted index: terms n >= stages of the shifted series are terms >= stages + offset of the original
        tail = power_log_tail(s, t, stages + aseq.offset - 1)
    elif cert.unit_series is not None and _is_unit(w):
        tail = power_log_tail(*cert.unit_series, stages - 1)

    orbit_checks = _orbit_decomposition(w, c, kappa, aseq.values, r, rho, stages)
    decomposition = orbit_checks.pop("decomposition")
    return SupercyclicVector(u, list(enumerate(parts)), disjoint, consistency, tail, aseq, kappa, orbit_checks, decomposition)


def _orbit_decomposition(w, c, kappa, a, r, rho, stages) -> dict:
    p = c.p
    windows_ok = True
    # gap hypothesis and the window separation condition
    hyp = all(r[n] - r[n - 1] - r[n - 2] > a[n] + a[n - 1] for n in range(2, stages))
    for k in range(1, stages):
        for l in range(1, k):
            for n in range(stages):
                if n == k or not a[n] < (r[k] - r[k - 1]) / 2:
                    continue
                for m in range(stages):
                    if m == l or not a[m] < (r[l] - r[l - 1]) / 2:
                        continue
                    if not abs((r[n] - r[k]) - (r[m] - r[l])) > a[n] + a[m]:
                        windows_ok = False
    yz = {}
    decomp_err = 0.0
    v_bounds = {}
    u_parts = {n: apply_shift(w, kappa(n), -r[n]).scale(float(rho[n])) for n in range(stages)}
    u = ZVector()
    for s in u_parts.values():
        u = ZVector({**u.entries, **s.entries})
    for k in range(1, stages):
        y, z, v = {}, {}, {}
        half = (r[k] - r[k - 1]) / 2
        for n in range(stages):
            if n == k:
                continue
            piece = apply_shift(w, kappa(n), r[k] - r[n]).scale(float(rho[n]))
            if n < k:
                y.update(piece.entries)
            elif a[n] < half:
                z.update(piece.entries)
            else:
                v.update(piece.entries)
        yz[k] = set(y) | set(z)
        lhs = apply_shift(w, u, r[k])
        rhs = ZVector({**y, **z, **v, **kappa(k).scale(float(rho[k])).entries})
        if not lhs.close_to(rhs, 1e-9):
            decomp_err = math.inf
        vz = ZVector(v)
        v_bounds[k] = (2 ** pnorm(vz, p).value if vz else 0.0, float(rho[k]) * 2.0 ** (-k))
    disjoint = all(not (yz[i] & yz[j]) for i in yz for j in yz if j < i)
    return {"hypothesis": hyp, "window_separation": windows_ok, "yz_disjoint": disjoint,
            "v_bounds": v_bounds, "decomposition": {"exact": decomp_err == 0.0}}


def vector_pseq_evidence(report: WReport, vec: SupercyclicVector) -> PSeqEvidence:
    """(C1) evidence for {rho_k^-1 theta_k^-1/p T^(r_k) u - theta_k^-1/p kappa(k)}.

    The normalized y_k + z_k have disjoint supports and norm at most 1; the
    v_k perturbation adds ||theta_k^-1/p 2^-k||_q by the perturbation lemma.
    """
    p = report.p
    q = p / (p - 1)
    theta = report.theta
    base = 1.0 if vec.orbit_checks["yz_disjoint"] else math.inf
    th0 = float(np.nanmin(theta)) if theta is not None and theta.size else 1.0
    deltas = [th0 ** (-1 / p) * 2.0**-k for k in range(1, 60)]
    const = pseq_perturbation_bound(base, deltas, q, tail=(th0 ** (-1 / p) * 2.0**-59) ** q)
    return PSeqEvidence("disjoint", const, "disjoint y_k + z_k, perturbed by v_k with ||v_k|| <= rho_k 2^-k")
