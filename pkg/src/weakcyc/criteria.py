"""Salas-type statistics for bilateral weighted shifts and liminf-at-horizon verdicts.

All statistics are returned as log2 values.  A criterion asks whether the
liminf over n of the statistic is zero for every k; a finite horizon can only
show the running minimum dipping below a tolerance, or exhibit a proven floor.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lattice import Floor, LogMag, WeightSequence, beta_array

STATS = ("hyper", "super", "simplified_hyper", "simplified_super")
DEFAULT_TOL = LogMag(-20)


def _window_logs(w: WeightSequence, k: int, ns: np.ndarray):
    """Per-n max over |j|<=k of log2 beta(j-n, j) and min of log2 beta(j, j+n)."""
    back = None
    fwd = None
    for j in range(-k, k + 1):
        b = beta_array(w, j - ns, np.full_like(ns, j))
        f = beta_array(w, np.full_like(ns, j), j + ns)
        back = b if back is None else np.maximum(back, b)
        fwd = f if fwd is None else np.minimum(fwd, f)
    return back, fwd


def stat_series(w: WeightSequence, stat: str, k: int, ns) -> np.ndarray:
    """log2 of the named statistic for each n in ``ns`` (all n >= 1)."""
    ns = np.asarray(ns, dtype=np.int64)
    if k < 0 or np.any(ns < 1):
        raise ValueError("need k >= 0 and n >= 1")
    if stat in ("hyper", "super"):
        back, fwd = _window_logs(w, k, ns)
        return np.maximum(back, -fwd) if stat == "hyper" else back - fwd
    if stat in ("simplified_hyper", "simplified_super"):
        left = beta_array(w, k - ns + 1, np.full_like(ns, k))
        right = beta_array(w, np.full_like(ns, k + 1), k + ns)
        return np.maximum(left, -right) if stat == "simplified_hyper" else left - right
    raise ValueError(f"unknown statistic {stat!r}; choose from {STATS}")


def salas_hyper_stat(w: WeightSequence, k: int, n: int) -> LogMag:
    """max{ max_{|j|<=k} beta(j-n, j), 1 / min_{|j|<=k} beta(j, j+n) }."""
    return LogMag(stat_series(w, "hyper", k, [n])[0].item())


def salas_super_stat(w: WeightSequence, k: int, n: int) -> LogMag:
    """max_{|j|<=k} beta(j-n, j) / min_{|j|<=k} beta(j, j+n)."""
    return LogMag(stat_series(w, "super", k, [n])[0].item())


def salas_simplified_stats(w: WeightSequence, k: int, n: int) -> tuple[LogMag, LogMag]:
    """(max{beta(k-n+1,k), 1/beta(k+1,k+n)}, beta(k-n+1,k)/beta(k+1,k+n))."""
    h = stat_series(w, "simplified_hyper", k, [n])[0].item()
    s = stat_series(w, "simplified_super", k, [n])[0].item()
    return LogMag(h), LogMag(s)


def floors_for(w: WeightSequence, stat: str) -> list[Floor]:
    """Declared floors of the family plus those implied by symmetry."""
    out = [f for f in w.floors if f.stat == stat]
    if w.symmetric and stat == "super":
        out.append(Floor("super", 0, "symmetric weights: beta(-n,0) = beta(0,n) at j = 0"))
    if w.symmetric and stat == "simplified_super":
        bound = w.log2(0) - math.log2(w.upper_bound)
        out.append(Floor("simplified_super", bound,
                         "symmetric weights: the k=0 statistic equals w_0/w_n >= w_0/sup|w|", k=0))
    return out


@dataclass
class CriterionVerdict:
    stat: str
    statistic_series: dict  # k -> array of log2 values for n = 1..horizon
    per_k_min: dict  # k -> (log2 min, argmin n)
    running_min: LogMag
    horizon: int
    verdict: str  # consistent_at_horizon | violated | inconclusive
    params: dict
    evidence: list = field(default_factory=list)

    def series_pairs(self, k: int):
        vals = self.statistic_series[k]
        return [(n, LogMag(v.item())) for n, v in zip(range(1, len(vals) + 1), vals)]


def evaluate_criterion(w: WeightSequence, stat: str, k_max: int, horizon: int,
                       tol: LogMag = DEFAULT_TOL, threads: int = 1) -> CriterionVerdict:
    """Liminf-at-horizon verdict for one criterion over k = 0..k_max.

    consistent_at_horizon: every per-k running minimum is below ``tol``.
    violated: a proven floor bounds the statistic away from zero at some
    k <= k_max (the floor is checked against the computed series as well).
    inconclusive: neither.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    ns = np.arange(1, horizon + 1, dtype=np.int64)
    ks = list(range(k_max + 1))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            series = dict(zip(ks, ex.map(lambda k: stat_series(w, stat, k, ns), ks)))
    else:
        series = {k: stat_series(w, stat, k, ns) for k in ks}
    per_k = {k: (series[k].min().item(), int(series[k].argmin()) + 1) for k in ks}
    evidence = []
    floor_hit = None
    for f in floors_for(w, stat):
        applies = [k for k in ks if f.k is None or f.k == k]
        if not applies:
            continue
        for k in applies:
            if per_k[k][0] < f.log2_bound - 1e-9:
                raise AssertionError(f"computed {stat} statistic at k={k} undercuts the proven floor: {f.reason}")
        evidence.append(f"floor 2^{f.log2_bound} for k in {applies if f.k is not None else 'all'}: {f.reason}")
        floor_hit = floor_hit or f
    tol_v = tol.value if isinstance(tol, LogMag) else math.log2(tol)
    if floor_hit is not None:
        verdict = "violated"
    elif all(v < tol_v for v, _ in per_k.values()):
        verdict = "consistent_at_horizon"
        evidence.append(f"every per-k minimum is below 2^{tol_v}")
    else:
        verdict = "inconclusive"
        bad = [k for k, (v, _) in per_k.items() if v >= tol_v]
        evidence.append(f"per-k minimum at or above 2^{tol_v} for k in {bad}; no proven floor")
    running = min(v for v, _ in per_k.values())
    return CriterionVerdict(stat, series, per_k, LogMag(running), horizon, verdict,
                            {"k_max": k_max, "horizon": horizon, "tol_log2": tol_v, "family": w.name},
                            evidence)


def d_m(w: WeightSequence, m: int) -> float:
    """log2 of max{1, sup|w|}^(-2m) * min_{-m<=a<=b<=m} beta(a, b)."""
    idx = np.arange(-m - 1, m + 1, dtype=np.int64)
    pre = w.prefix_array(idx)  # L(-m-1), ..., L(m)
    # min over a<=b of L(b) - L(a-1): running max of L(a-1) before b
    best = math.inf
    run_max = -math.inf
    for i in range(1, len(idx)):
        run_max = max(run_max, pre[i - 1])
        best = min(best, pre[i] - run_max)
    return -2 * m * max(0.0, math.log2(w.upper_bound)) + best


def window_transfer_slack(w: WeightSequence, m: int, horizon: int) -> float:
    """Smallest slack (log2) of the two inequalities relating windows at |j| < m to index m.

    Checks beta(m-n+1, m) >= d_m beta(j-n, j) and beta(m+1, m+n) <= beta(j, j+n)/d_m
    for all |j| < m and n <= horizon.  A negative return value is a violation.
    """
    dm = d_m(w, m)
    ns = np.arange(1, horizon + 1, dtype=np.int64)
    left = beta_array(w, m - ns + 1, np.full_like(ns, m))
    right = beta_array(w, np.full_like(ns, m + 1), m + ns)
    slack = math.inf
    for j in range(-m + 1, m):
        bj = beta_array(w, j - ns, np.full_like(ns, j))
        fj = beta_array(w, np.full_like(ns, j), j + ns)
        slack = min(slack, float(np.min(left - dm - bj)), float(np.min(fj - dm - right)))
    return slack
