"""Smallest k whose rotation orbit (k t_1, ..., k t_N) lands near a target in the torus."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .discretize import IndependentPoint

BATCH = 1 << 16


class SearchExhausted(Exception):
    def __init__(self, best_k: int, best_defect: float, kmax: int):
        super().__init__(f"no k <= {kmax} within tolerance; best k = {best_k} with defect {best_defect:.3g}")
        self.best_k = best_k
        self.best_defect = best_defect


@dataclass
class KroneckerResult:
    k: int
    defect: float  # max_s circular distance of k t_s from the target angle, in turns
    chordal: float  # max_s |e^(2 pi i k t_s) - theta_s|


def _angle(theta: complex) -> float:
    if abs(abs(theta) - 1) > 1e-9:
        raise ValueError("targets must be unit complex numbers")
    return (cmath.phase(theta) / (2 * math.pi)) % 1.0


def _exact_frac(k: int, t, digits: int = 60) -> float:
    """frac(k t) computed with ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        if isinstance(t, IndependentPoint):
            x = (Decimal(t.anchor.numerator) / Decimal(t.anchor.denominator)
                 + Decimal(t.eps.numerator) / Decimal(t.eps.denominator) * Decimal(t.prime).sqrt())
        else:
            f = Fraction(t)
            x = Decimal(f.numerator) / Decimal(f.denominator)
        y = Decimal(k) * x
        return float(y - y.to_integral_value(rounding="ROUND_FLOOR"))


def circular_defect(k: int, points: Sequence, angles: Sequence[float]) -> float:
    worst = 0.0
    for t, a in zip(points, angles):
        d = (_exact_frac(k, t) - a) % 1.0
        worst = max(worst, min(d, 1.0 - d))
    return worst


def kronecker_search(points: Sequence, targets: Sequence[complex], k0: int, tol: float, kmax: int) -> KroneckerResult:
    """Smallest k in (k0, kmax] with every ||k t_s - arg(theta_s)/2pi|| < tol (circular, in turns).

    The scan runs in double precision in batches; every candidate is
    re-verified with 60-digit arithmetic before it is accepted.
    """
    if not points:
        raise ValueError("empty point list")
    if len(points) != len(targets):
        raise ValueError("one target per point")
    if tol <= 0:
        raise ValueError("tol must be positive")
    angles = [_angle(th) for th in targets]
    tf = np.array([float(p) for p in points])
    af = np.array(angles)
    best_k, best_d = -1, math.inf
    k = k0 + 1
    while k <= kmax:
        hi = min(k + BATCH, kmax + 1)
        ks = np.arange(k, hi, dtype=np.float64)
        d = np.mod(np.outer(ks, tf) - af, 1.0)
        d = np.minimum(d, 1.0 - d).max(axis=1)
        # a little slack so that double rounding never skips a true hit
        for idx in np.nonzero(d < tol + 1e-9)[0]:
            cand = k + int(idx)
            exact = circular_defect(cand, points, angles)
            if exact < tol:
                chord = 2 * math.sin(math.pi * exact)
                return KroneckerResult(cand, exact, chord)
        i = int(np.argmin(d))
        if d[i] < best_d:
            best_k, best_d = k + i, float(d[i])
        k = hi
    raise SearchExhausted(best_k, best_d, kmax)
