"""Finite non-negative measures on the circle: atoms plus piecewise-constant densities.

Points of the circle are normalized coordinates t in [0, 1), z = e^(2 pi i t);
Fourier coefficients follow mu^(k) = integral of z^k d mu.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .trigpoly import SMALL_FREQ, TrigPoly, frac_turn

FORMAT_HEADER = "# circle-measure v1"


def _seg_coeff(k: int, t0: float, t1: float) -> complex:
    """integral over [t0, t1) of e^(2 pi i k t) dt, phases reduced exactly."""
    w = t1 - t0
    if k == 0:
        return complex(w)
    if abs(k) < SMALL_FREQ:
        mid = (k * (t0 + t1) / 2) % 1.0
        return cmath.exp(2j * math.pi * mid) * math.sin(math.pi * k * w) / (math.pi * k)
    mid = float((k * (Fraction(t0) + Fraction(t1)) / 2) % 1)
    half = float((k * Fraction(w)) % 2)
    return cmath.exp(2j * math.pi * mid) * math.sin(math.pi * half) / (math.pi * k)


@dataclass(frozen=True)
class CircleMeasure:
    """Atoms (t, mass) and segments (t0, t1, height) with pairwise disjoint arcs in [0, 1)."""

    atoms: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        atoms = tuple(sorted((float(t) % 1.0, float(m)) for t, m in self.atoms if m != 0))
        segs = tuple(sorted((float(a), float(b), float(h)) for a, b, h in self.segments if h != 0 and b > a))
        for t, m in atoms:
            if m < 0:
                raise ValueError("atom masses must be non-negative")
        for a, b, h in segs:
            if not (0.0 <= a < b <= 1.0) or h < 0:
                raise ValueError(f"bad segment ({a}, {b}, {h})")
        for (a0, b0, _), (a1, _, _) in zip(segs, segs[1:]):
            if a1 < b0:
                raise ValueError("segments overlap")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "segments", segs)

    # construction

    @classmethod
    def lebesgue(cls) -> "CircleMeasure":
        return cls((), ((0.0, 1.0, 1.0),))

    @classmethod
    def step(cls, heights: Sequence[float]) -> "CircleMeasure":
        """Density heights[j] on [j/n, (j+1)/n)."""
        n = len(heights)
        return cls((), tuple((j / n, (j + 1) / n, h) for j, h in enumerate(heights)))

    # basic quantities

    @property
    def total_mass(self) -> float:
        return math.fsum([m for _, m in self.atoms] + [h * (b - a) for a, b, h in self.segments])

    def is_probability(self, tol: float = 1e-12) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def mass(self, arc) -> float:
        lo, hi = arc
        parts = [m for t, m in self.atoms if lo <= t < hi]
        parts += [h * (min(b, hi) - max(a, lo)) for a, b, h in self.segments if b > lo and a < hi]
        return math.fsum(parts)

    def density_at(self, t: float) -> float:
        for a, b, h in self.segments:
            if a <= t < b:
                return h
        return 0.0

    def jump_variation(self) -> float:
        """Total variation of the density as a periodic step function (atoms excluded)."""
        # walk the circle; consecutive segments that touch contribute |h1 - h0|
        v = 0.0
        segs = self.segments
        if not segs:
            return 0.0
        prev_end, prev_h = segs[-1][1] - 1.0, segs[-1][2]
        for a, b, h in segs:
            if a > prev_end:
                v += prev_h + h
            else:
                v += abs(h - prev_h)
            prev_end, prev_h = b, h
        return v

    def max_density(self) -> float:
        return max((h for _, _, h in self.segments), default=0.0)

    # Fourier

    def fourier(self, k: int) -> complex:
        k = int(k)
        acc = 0j
        for t, m in self.atoms:
            acc += m * cmath.exp(2j * math.pi * frac_turn(k, t))
        for a, b, h in self.segments:
            acc += h * _seg_coeff(k, a, b)
        return acc

    def fourier_many(self, ks: Iterable[int]) -> np.ndarray:
        ks = [int(k) for k in ks]
        if ks and max(abs(k) for k in ks) < SMALL_FREQ:
            kk = np.asarray(ks, dtype=float)[:, None]
            out = np.zeros(len(ks), dtype=complex)
            if self.atoms:
                t = np.array([a for a, _ in self.atoms])
                m = np.array([b for _, b in self.atoms])
                out += (m * np.exp(2j * np.pi * np.mod(kk * t, 1.0))).sum(axis=1)
            if self.segments:
                s = np.array(self.segments)
                a, b, h = s[:, 0], s[:, 1], s[:, 2]
                w = b - a
                mid = np.mod(kk * (a + b) / 2, 1.0)
                with np.errstate(invalid="ignore", divide="ignore"):
                    amp = np.where(kk == 0, w, np.sin(np.pi * kk * w) / (np.pi * np.where(kk == 0, 1, kk)))
                out += (h * amp * np.exp(2j * np.pi * mid)).sum(axis=1)
            return out
        return np.array([self.fourier(k) for k in ks])

    # algebra

    def restrict(self, arc) -> "CircleMeasure":
        lo, hi = arc
        atoms = [(t, m) for t, m in self.atoms if lo <= t < hi]
        segs = [(max(a, lo), min(b, hi), h) for a, b, h in self.segments if b > lo and a < hi]
        return CircleMeasure(tuple(atoms), tuple(segs))

    def scale(self, c: float) -> "CircleMeasure":
        if c < 0:
            raise ValueError("scale must be non-negative")
        return CircleMeasure(tuple((t, c * m) for t, m in self.atoms), tuple((a, b, c * h) for a, b, h in self.segments))

    def __add__(self, other: "CircleMeasure") -> "CircleMeasure":
        atoms: dict[float, float] = {}
        for t, m in self.atoms + other.atoms:
            atoms[t] = atoms.get(t, 0.0) + m
        cuts = np.array(sorted({x for a, b, _ in self.segments + other.segments for x in (a, b)}))
        if cuts.size < 2:
            return CircleMeasure(tuple(atoms.items()), ())
        mids = (cuts[:-1] + cuts[1:]) / 2
        h = self.densities(mids) + other.densities(mids)
        segs = [(lo, hi, v) for lo, hi, v in zip(cuts[:-1].tolist(), cuts[1:].tolist(), h.tolist()) if v]
        return CircleMeasure(tuple(atoms.items()), _merge(segs))

    def densities(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized density_at."""
        if not self.segments:
            return np.zeros(len(ts))
        s = np.array(self.segments)
        i = np.searchsorted(s[:, 0], ts, side="right") - 1
        ok = (i >= 0) & (ts < s[np.maximum(i, 0), 1])
        return np.where(ok, s[np.maximum(i, 0), 2], 0.0)

    # text format

    def dumps(self) -> str:
        lines = [FORMAT_HEADER]
        lines += [f"atom {t!r} {m!r}" for t, m in self.atoms]
        lines += [f"segment {a!r} {b!r} {h!r}" for a, b, h in self.segments]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CircleMeasure":
        atoms, segs = [], []
        for no, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "atom" and len(parts) == 3:
                    atoms.append((float(parts[1]), float(parts[2])))
                elif parts[0] == "segment" and len(parts) == 4:
                    segs.append((float(parts[1]), float(parts[2]), float(parts[3])))
                else:
                    raise ValueError
            except ValueError:
                raise ValueError(f"line {no}: cannot parse {line!r}") from None
        return cls(tuple(atoms), tuple(segs))


def _merge(segs):
    out = []
    for a, b, h in segs:
        if out and out[-1][1] == a and out[-1][2] == h:
            out[-1] = (out[-1][0], b, h)
        else:
            out.append((a, b, h))
    return tuple(out)


def fourier(mu, k: int) -> complex:
    return mu.fourier(k)


def pair(mu, f: TrigPoly) -> complex:
    """[mu, f] = integral f d mu = sum_k f^(k) mu^(k)."""
    ks = list(f.coeffs)
    vals = mu.fourier_many(ks)
    return complex(sum(f.coeffs[k] * v for k, v in zip(ks, vals)))


def restrict(mu: CircleMeasure, arc) -> CircleMeasure:
    return mu.restrict(arc)
