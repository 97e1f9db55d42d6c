"""Named weight families and the exact identities their products satisfy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lattice import Floor, WeightSequence, direct_log2_beta

FAMILY_NAMES = ("unweighted", "chan_sanders", "prop18", "prop18_inverse", "prop19", "custom")


class _Rule:
    """Vectorized log2-weight rule with a scalar fallback for huge indices."""

    def __init__(self, vec: Callable[[np.ndarray], np.ndarray], big: Callable[[int], float]):
        self.vec = vec
        self.big = big

    def __call__(self, n: np.ndarray) -> np.ndarray:
        return self.vec(n)


def unweighted() -> WeightSequence:
    rule = _Rule(lambda n: np.zeros(np.shape(n), dtype=np.int64), lambda n: 0)
    floors = (
        Floor("hyper", 0, "all weights equal 1"),
        Floor("super", 0, "all weights equal 1"),
        Floor("simplified_hyper", 0, "all weights equal 1"),
        Floor("simplified_super", 0, "all weights equal 1"),
    )
    return WeightSequence(rule, 1.0, 1.0, "unweighted", log2_prefix=lambda n: 0,
                          symmetric=True, exact=True, floors=floors)


def chan_sanders() -> WeightSequence:
    """w_n = 2 for n >= 0 and w_n = 1 for n < 0."""
    rule = _Rule(lambda n: (np.asarray(n) >= 0).astype(np.int64), lambda n: int(n >= 0))

    def prefix(n: int) -> int:
        return n if n >= 0 else -1

    floors = (
        Floor("hyper", 0, "w_j >= 1 for j <= 0, so beta(-n, 0) >= 1"),
        Floor("simplified_hyper", 0, "w_j >= 1 for j <= 0, so beta(1-n, 0) >= 1", k=0),
    )
    return WeightSequence(rule, 1.0, 2.0, "chan_sanders", log2_prefix=prefix, exact=True, floors=floors)


# Band weights.  On the positive side, for even k: +1 on (7*9^k, 9^(k+1)] and
# -1 on (9^(k+1), 11*9^k].  The negative side mirrors this for odd k:
# +1 on [-11*9^k, -9^(k+1)) and -1 on [-9^(k+1), -7*9^k).


def _bands(limit: int, parity: int):
    k = parity
    while 7 * 9**k < limit:
        yield k
        k += 2


def _prop18_vec(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    out = np.zeros(n.shape, dtype=np.int64)
    m = np.abs(n)
    top = int(m.max()) if m.size else 0
    for k in _bands(top + 1, 0):
        lo, mid, hi = 7 * 9**k, 9 ** (k + 1), 11 * 9**k
        out[(n > lo) & (n <= mid)] = 1
        out[(n > mid) & (n <= hi)] = -1
    for k in _bands(top + 1, 1):
        lo, mid, hi = 7 * 9**k, 9 ** (k + 1), 11 * 9**k
        out[(-n > mid) & (-n <= hi)] = 1
        out[(-n > lo) & (-n <= mid)] = -1
    return out


def _band_below(m: int) -> int | None:
    """Largest k >= 0 with 7 * 9^k < m, or None."""
    if m <= 7:
        return None
    q = (m - 1) // 7  # 9^k <= q
    k = max(int((q.bit_length() - 1) * 0.31546487678572877) - 1, 0)  # log(2)/log(9)
    while 9 ** (k + 1) <= q:
        k += 1
    while k and 9**k > q:
        k -= 1
    return k


def _prop18_big(n: int) -> int:
    m = abs(n)
    k = _band_below(m)
    if k is None or k % 2 != (0 if n > 0 else 1):
        return 0  # the band of the other parity, or a gap
    mid, hi = 9 ** (k + 1), 11 * 9**k
    if m <= mid:
        return 1 if n > 0 else -1
    if m <= hi:
        return -1 if n > 0 else 1
    return 0


def _overlap(lo: int, hi: int, n: int) -> int:
    """Size of (lo, hi] intersected with (0, n]."""
    return max(0, min(hi, n) - lo)


def _band_partial(n: int, parity: int) -> int:
    """sum over bands of parity ``parity`` of |(lo, mid] & (0, n]| - |(mid, hi] & (0, n]|.

    A complete band adds 2 * 9^k - 2 * 9^k = 0, and the bands are disjoint,
    so only the band containing n contributes.
    """
    k = _band_below(n)
    if k is None or k % 2 != parity:
        return 0
    lo, mid, hi = 7 * 9**k, 9 ** (k + 1), 11 * 9**k
    return _overlap(lo, mid, n) - _overlap(mid, hi, n)


def _prop18_prefix(n: int) -> int:
    if n >= 0:
        return _band_partial(n, 0)
    # L(n) = -sum_{j=1}^{N} l_{-j} with N = -n - 1; on the negative side the signs flip
    return _band_partial(-n - 1, 1)


def prop18() -> WeightSequence:
    floors = (Floor("hyper", 0, "band structure gives max{beta(-n,0), 1/beta(0,n)} >= 1"),)
    return WeightSequence(_Rule(_prop18_vec, _prop18_big), 0.5, 2.0, "prop18",
                          log2_prefix=_prop18_prefix, exact=True, floors=floors)


def prop18_inverse() -> WeightSequence:
    """w~_n = 1 / w_{-n}; the shift similar to the inverse of the prop18 shift."""
    rule = _Rule(lambda n: -_prop18_vec(-np.asarray(n, dtype=np.int64)), lambda n: -_prop18_big(-n))

    def prefix(n: int) -> int:
        # the prefix of w~ at n is the prefix of w at -n-1, on both sides (w_0 = 1)
        return _prop18_prefix(-n - 1)

    floors = (Floor("hyper", 0, "band structure gives max{beta(-n,0), 1/beta(0,n)} >= 1"),)
    return WeightSequence(rule, 0.5, 2.0, "prop18_inverse", log2_prefix=prefix, exact=True, floors=floors)


def log2_phi(t, p: float):
    """log2 of (t+1)^(1/p) (log2(t+2))^(2/p)."""
    t = np.asarray(t, dtype=float)
    return np.log2(t + 1) / p + 2.0 / p * np.log2(np.log2(t + 2))


def _ilog3(m: np.ndarray) -> np.ndarray:
    """floor(log3 m) for positive int64 m, exactly."""
    out = np.zeros(m.shape, dtype=np.int64)
    pw = 3
    top = int(m.max()) if m.size else 0
    while pw <= top:
        out += m >= pw
        pw *= 3
    return out


def _prop19_vec(n: np.ndarray, p: float) -> np.ndarray:
    j = np.abs(np.asarray(n, dtype=np.int64))
    out = np.zeros(j.shape, dtype=float)
    pos = j >= 1
    jj = j[pos]
    e = _ilog3(jj)
    base = 3 ** e
    res = np.zeros(jj.shape, dtype=float)
    second = (jj > base) & (jj <= 2 * base)
    es = e[second].astype(float)
    res[second] = 3.0 ** -es * (log2_phi(es + 1, p) - 2 * log2_phi(es, p))
    first = jj > 2 * base
    d = 3 * base[first] - jj[first]
    kk = _ilog3(d).astype(float)
    res[first] = 3.0 ** -kk / 2 * (log2_phi(kk + 1, p) - log2_phi(kk, p))
    out[pos] = res
    return out


def _prop19_big(n: int, p: float) -> float:
    j = abs(n)
    if j == 0:
        return 0.0
    e = _floor_log3(j)
    base = 3**e
    if j == base:
        return 0.0
    if j <= 2 * base:
        return 3.0**-e * float(log2_phi(e + 1, p) - 2 * log2_phi(e, p))
    d = 3 * base - j
    k = _floor_log3(d)
    return 3.0**-k / 2 * float(log2_phi(k + 1, p) - log2_phi(k, p))


def _floor_log3(n: int) -> int:
    """Largest e with 3^e <= n, for a positive Python int of any size."""
    e = max(int((n.bit_length() - 1) * 0.6309297535714574) - 1, 0)  # log(2)/log(3)
    while 3 ** (e + 1) <= n:
        e += 1
    while e and 3**e > n:
        e -= 1
    return e


def _lphi(t: int, p: float) -> float:
    return math.log2(t + 1) / p + 2.0 / p * math.log2(math.log2(t + 2))


def _prop19_pos_prefix(big_n: int, p: float) -> float:
    """sum_{j=1}^{N} log2 w_j in O(log N) integer steps.

    Whole blocks telescope: the sum up to 3^e is log2 phi(e), and the full
    blocks (3^(e+1) - 3^(k+1), 3^(e+1) - 3^k] for k >= k' add up to
    log2 phi(e) - log2 phi(k').
    """
    if big_n <= 1:
        return 0.0
    e = _floor_log3(big_n - 1)  # largest e with 3^e < N
    base = 3**e
    total = _lphi(e, p)  # sum up to 3^e
    second_val = 3.0**-e * (_lphi(e + 1, p) - 2 * _lphi(e, p))
    total += (min(big_n, 2 * base) - base) * second_val
    top = 3 * base
    hi = min(big_n, top - 1)
    if hi > 2 * base:
        d = top - hi  # block k is complete when 3^k >= d
        k_full = 0 if d <= 1 else _floor_log3(d - 1) + 1  # smallest k with 3^k >= d
        total += _lphi(e, p) - _lphi(k_full, p)
        if k_full > 0:
            k = k_full - 1
            cnt = hi - (top - 3 ** (k + 1))
            total += cnt * 3.0**-k / 2 * (_lphi(k + 1, p) - _lphi(k, p))
    return total


def prop19(p: float) -> WeightSequence:
    """Symmetric weights built from phi(t) = (t+1)^(1/p) (log2(t+2))^(2/p), p > 2."""
    if not p > 2:
        raise ValueError("prop19 weights need p > 2")
    vals = _prop19_vec(np.arange(1, 3**12, dtype=np.int64), p)
    lo, hi = min(vals.min(), 0.0), max(vals.max(), 0.0)

    def prefix(n: int) -> float:
        if n >= 0:
            return _prop19_pos_prefix(n, p)
        return -_prop19_pos_prefix(-n - 1, p)

    rule = _Rule(lambda n: _prop19_vec(n, p), lambda n: _prop19_big(n, p))
    return WeightSequence(rule, 2.0**lo, 2.0**hi, "prop19", log2_prefix=prefix, symmetric=True,
                          params={"p": p})


def custom(magnitude: Callable[[int], float], lower_bound: float, upper_bound: float,
           *, symmetric: bool = False, name: str = "custom") -> WeightSequence:
    """Weights from a scalar rule n -> |w_n|; bounds are the caller's declaration."""

    def scalar(n: int) -> float:
        v = float(magnitude(int(n)))
        if not lower_bound <= v <= upper_bound:
            raise ValueError(f"|w_{n}| = {v} outside the declared bounds")
        return math.log2(v)

    vec = np.vectorize(scalar, otypes=[float])
    return WeightSequence(_Rule(lambda n: vec(np.asarray(n)), scalar), lower_bound, upper_bound,
                          name, symmetric=symmetric)


def from_log2_table(log2_weights: dict[int, float], default: float = 0.0, name: str = "table") -> WeightSequence:
    """Weights given by a finite table of log2 values, ``default`` elsewhere."""
    items = sorted(log2_weights.items())
    keys = np.array([k for k, _ in items], dtype=np.int64)
    vals = np.array([v for _, v in items], dtype=float)

    def vec(n):
        n = np.asarray(n, dtype=np.int64)
        out = np.full(n.shape, default, dtype=float)
        if keys.size:
            pos = np.clip(np.searchsorted(keys, n), 0, keys.size - 1)
            hit = keys[pos] == n
            out[hit] = vals[pos[hit]]
        return out

    allv = np.concatenate([vals, [default]])
    return WeightSequence(_Rule(vec, lambda n: float(vec(np.array([n]))[0]) if abs(n) < 2**62 else default),
                          2.0 ** allv.min(), 2.0 ** allv.max(), name)


def make_family(name: str, p: float | None = None) -> WeightSequence:
    name = name.replace("-", "_")
    if name == "unweighted":
        return unweighted()
    if name == "chan_sanders":
        return chan_sanders()
    if name == "prop18":
        return prop18()
    if name == "prop18_inverse":
        return prop18_inverse()
    if name == "prop19":
        if p is None:
            raise ValueError("prop19 needs p")
        return prop19(p)
    raise ValueError(f"unknown weight family {name!r}; custom weights are built with custom()")


@dataclass
class IdentityReport:
    family: str
    checks: list = field(default_factory=list)  # (label, computed, expected)
    max_abs_error: float = 0.0
    max_rel_error: float = 0.0

    def add(self, label: str, computed: float, expected: float) -> None:
        err = abs(computed - expected)
        self.checks.append((label, computed, expected))
        self.max_abs_error = max(self.max_abs_error, err)
        if expected != 0:
            self.max_rel_error = max(self.max_rel_error, err / abs(expected))
        elif err:
            self.max_rel_error = math.inf

    @property
    def ok(self) -> bool:
        return self.max_abs_error == 0 if self.family.startswith("prop18") else self.max_rel_error <= 1e-9


def _running_sums(w: WeightSequence, lo: int, hi: int) -> np.ndarray:
    """Cumulative sums of log2 w_j for j = lo..hi, from the rule alone."""
    vals = w.log2(np.arange(lo, hi + 1, dtype=np.int64))
    return np.cumsum(vals)


def verify_weight_identities(w: WeightSequence, ks=None, n_max: int = 7) -> IdentityReport:
    """Exhaustively check the product identity of a family by direct summation.

    prop18: log2 beta(1, a) = a - 7*9^k and beta(-a+1, 0) = 1 for even k in
    ``ks`` and every a in (7*9^k, 9^(k+1)].  prop18_inverse: the same for odd k.
    prop19: beta(1, 3^n - 3^k) = phi(n)/phi(k) and beta(1, 3^n) = phi(n) for
    0 <= k < n <= n_max.
    """
    rep = IdentityReport(w.name or "custom")
    if w.name in ("prop18", "prop18_inverse"):
        parity = 0 if w.name == "prop18" else 1
        if ks is None:
            ks = (parity, parity + 2)
        for k in ks:
            if k % 2 != parity:
                raise ValueError(f"{w.name} identity holds for k of parity {parity}, got {k}")
            lo, hi = 7 * 9**k, 9 ** (k + 1)
            fwd = _running_sums(w, 1, hi)  # fwd[a-1] = log2 beta(1, a)
            back = np.cumsum(w.log2(np.arange(0, -hi, -1, dtype=np.int64)))  # back[a-1] = log2 beta(-a+1, 0)
            for a in range(lo + 1, hi + 1):
                rep.add(f"k={k} log2 beta(1,{a})", int(fwd[a - 1]), a - lo)
                rep.add(f"k={k} log2 beta({-a + 1},0)", int(back[a - 1]), 0)
        return rep
    if w.name == "prop19":
        p = w.params["p"]
        fwd = _running_sums(w, 1, 3**n_max)
        for n in range(1, n_max + 1):
            rep.add(f"log2 beta(1,3^{n})", float(fwd[3**n - 1]), float(log2_phi(n, p)))
            for k in range(n):
                got = float(fwd[3**n - 3**k - 1])
                rep.add(f"log2 beta(1,3^{n}-3^{k})", got, float(log2_phi(n, p) - log2_phi(k, p)))
        return rep
    raise ValueError(f"no product identity is known for family {w.name!r}")


def check_prefix_against_direct(w: WeightSequence, pairs) -> float:
    """Largest |L-based beta - direct beta| over (a, b) pairs; a self-test helper."""
    worst = 0.0
    for a, b in pairs:
        worst = max(worst, abs((w.prefix(b) - w.prefix(a - 1)) - direct_log2_beta(w, a, b)))
    return worst
