"""Trigonometric polynomials sum a_k z^k on the circle, z = e^(2 pi i t)."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

SMALL_FREQ = 1 << 20


def frac_turn(k: int, t) -> float:
    """frac(k t) in [0, 1), exact for float (dyadic) or Fraction t and any integer k."""
    if abs(k) < SMALL_FREQ and isinstance(t, float):
        return (k * t) % 1.0
    return float((k * Fraction(t)) % 1)


def turn(num: int, den: int) -> complex:
    """e^(2 pi i num / den) for integers, reduced exactly before leaving integer arithmetic."""
    r = num % den
    return cmath.exp(2j * math.pi * (r / den))


@dataclass(frozen=True)
class TrigPoly:
    """Finite map frequency -> coefficient with a stored upper bound on the sup norm."""

    coeffs: Mapping[int, complex]
    sup_bound: float

    def __init__(self, coeffs: Mapping[int, complex] | None = None, sup_bound: float | None = None):
        c = {int(k): complex(v) for k, v in (coeffs or {}).items() if v != 0}
        l1 = math.fsum(abs(v) for v in c.values())
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "sup_bound", l1 if sup_bound is None else min(float(sup_bound), l1))

    @classmethod
    def monomial(cls, k: int, a: complex = 1.0) -> "TrigPoly":
        return cls({k: a})

    @classmethod
    def const(cls, a: complex) -> "TrigPoly":
        return cls({0: a})

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.const(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0j) + v
        return TrigPoly(c, self.sup_bound + other.sup_bound)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({k: -v for k, v in self.coeffs.items()}, self.sup_bound)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TrigPoly) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            c: dict[int, complex] = {}
            for k1, v1 in self.coeffs.items():
                for k2, v2 in other.coeffs.items():
                    c[k1 + k2] = c.get(k1 + k2, 0j) + v1 * v2
            return TrigPoly(c, self.sup_bound * other.sup_bound)
        a = complex(other)
        return TrigPoly({k: a * v for k, v in self.coeffs.items()}, abs(a) * self.sup_bound)

    __rmul__ = __mul__

    def conj(self) -> "TrigPoly":
        """Pointwise complex conjugate: sum conj(a_k) z^(-k)."""
        return TrigPoly({-k: v.conjugate() for k, v in self.coeffs.items()}, self.sup_bound)

    def shift(self, n: int) -> "TrigPoly":
        """Multiplication by z^n."""
        return TrigPoly({k + n: v for k, v in self.coeffs.items()}, self.sup_bound)

    def __call__(self, t) -> complex:
        """Value at z = e^(2 pi i t); phases are reduced exactly."""
        return sum((v * cmath.exp(2j * math.pi * frac_turn(k, t)) for k, v in self.coeffs.items()), 0j)

    def grid_values(self, n: int) -> np.ndarray:
        """Values at t = j/n, j = 0..n-1 (small degrees only)."""
        t = np.arange(n) / n
        out = np.zeros(n, dtype=complex)
        for k, v in self.coeffs.items():
            out += v * np.exp(2j * np.pi * ((k % n) * t))
        return out

    def sup_grid(self, n: int | None = None) -> tuple[float, float]:
        """(max on a grid, certified upper bound on the sup norm).

        Bernstein's inequality |p'| <= 2 pi deg ||p|| on [0, 1) gives
        ||p|| <= grid max / (1 - pi deg / n) for a grid of n points.
        """
        d = self.degree
        n = n or max(64, 32 * d)
        if d and n <= math.pi * d:
            raise ValueError("grid too coarse for the Bernstein margin")
        g = float(np.abs(self.grid_values(n)).max()) if self.coeffs else 0.0
        return g, (g / (1 - math.pi * d / n) if d else g)

    def derivative_bound(self) -> float:
        """Upper bound on sup |d/dt p| from Bernstein's inequality."""
        return 2 * math.pi * self.degree * self.sup_bound

    def normalized(self, n: int | None = None) -> "TrigPoly":
        """Scaled so that the certified sup bound equals 1."""
        if len(self.coeffs) == 1:
            ub = abs(next(iter(self.coeffs.values())))  # a monomial has constant modulus
        else:
            _, ub = self.sup_grid(n)
        if ub == 0:
            raise ValueError("cannot normalize the zero polynomial")
        return TrigPoly({k: v / ub for k, v in self.coeffs.items()}, 1.0)

    def __repr__(self):
        terms = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self.coeffs.items()))
        return f"TrigPoly({{{terms}}}, sup<={self.sup_bound:.6g})"
