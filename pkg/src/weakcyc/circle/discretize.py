"""Partitions of the circle, independent points and the two discretizations
(absolutely continuous steps and finitely supported atoms) that keep the
mass of every partition arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .measure import CircleMeasure


def uniform_partition(n: int) -> list[tuple[float, float]]:
    """Arcs [(k-1)/n, k/n), k = 1..n."""
    if n < 1:
        raise ValueError("n must be positive")
    return [((k - 1) / n, k / n) for k in range(1, n + 1)]


def refine(arcs: Sequence[tuple[float, float]], r: int) -> list[tuple[float, float]]:
    """Split every arc into r equal pieces (nested by construction)."""
    out = []
    for a, b in arcs:
        out += [(a + (b - a) * i / r, a + (b - a) * (i + 1) / r) for i in range(r)]
    return out


@dataclass(frozen=True)
class IndependentPoint:
    """t = anchor + eps sqrt(prime) (mod 1) with rational anchor and eps."""

    anchor: Fraction
    eps: Fraction
    prime: int

    @property
    def t(self) -> float:
        return float(self.anchor) + float(self.eps) * math.sqrt(self.prime)

    def __float__(self):
        return self.t


def independent_points(arcs: Sequence[tuple[float, float]]) -> list[IndependentPoint]:
    """One point strictly inside each arc; the points are independent.

    A nonzero integer combination sum n_j t_j equals a rational plus
    eps * sum n_j sqrt(p_j) with distinct primes p_j, which is irrational,
    so it is never an integer.
    """
    if not arcs:
        raise ValueError("need at least one arc")
    lens = [b - a for a, b in arcs]
    if min(lens) <= 0:
        raise ValueError("degenerate arc")
    primes = [int(sympy.prime(i + 1)) for i in range(len(arcs))]
    e = 0
    while 2.0**-e * math.sqrt(primes[-1]) >= min(lens) / 4:
        e += 1
    eps = Fraction(1, 2**e)
    pts = []
    for (a, b), p in zip(arcs, primes):
        anchor = (Fraction(a) + Fraction(b)) / 2
        pts.append(IndependentPoint(anchor, eps, p))
    return pts


def independence_certificate(points: Sequence[IndependentPoint]) -> bool:
    """The decision rule: rational anchors, one positive rational eps, distinct primes."""
    if not points:
        return False
    eps = {p.eps for p in points}
    primes = [p.prime for p in points]
    return (len(eps) == 1 and next(iter(eps)) > 0 and len(set(primes)) == len(primes)
            and all(sympy.isprime(q) for q in primes)
            and all(isinstance(p.anchor, Fraction) for p in points))


def combination_is_irrational(points: Sequence[IndependentPoint], ns: Sequence[int]) -> bool:
    """Exact check that sum n_j t_j is irrational: its minimal polynomial over Q has degree > 1."""
    expr = sum(n * (sympy.Rational(p.anchor.numerator, p.anchor.denominator)
                    + sympy.Rational(p.eps.numerator, p.eps.denominator) * sympy.sqrt(p.prime))
               for n, p in zip(ns, points))
    x = sympy.Symbol("x")
    return sympy.degree(sympy.minimal_polynomial(expr, x), x) > 1


def discretize_ac(mu: CircleMeasure, partition: Sequence[tuple[float, float]]) -> CircleMeasure:
    """Step density with mu^n(I) = mu(I) on every arc of the partition."""
    segs = []
    for a, b in partition:
        m = mu.mass((a, b))
        if m:
            segs.append((a, b, m / (b - a)))
    return CircleMeasure((), tuple(segs))


def discretize_atomic(mu: CircleMeasure, partition: Sequence[tuple[float, float]],
                      points: Sequence[IndependentPoint] | None = None) -> tuple[CircleMeasure, list]:
    """sum_j mu(I_j) delta_{z_j} at independent points z_j in I_j; returns (measure, points used)."""
    pts = list(points) if points is not None else independent_points(partition)
    atoms = []
    used = []
    for (a, b), p in zip(partition, pts):
        if not a < p.t < b:
            raise ValueError("independent point outside its arc")
        m = mu.mass((a, b))
        if m:
            atoms.append((p.t, m))
            used.append(p)
    return CircleMeasure(tuple(atoms), ()), used
