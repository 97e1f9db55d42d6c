"""Nested resonant combs: step densities d(t) prod_i F_i(t) with exact Fourier coefficients.

Level i is a 1/k_i-periodic factor F_i = 1 - s + (s/w) 1_box, the box being
w Q_i consecutive cells out of Q_i per period.  Over one period F_i has mean
1 and first harmonic s sinc(w) e^(2 pi i center/Q_i), so multiplying a
density by F_i keeps the mass of every union of whole periods and writes a
prescribed complex value into the coefficient at k_i.

The amplitude s and the box position may change from one base arc
[j/G, (j+1)/G) to the next.  Every level has whole periods inside each base
arc and inside every cell of the previous level, so on each base arc the
Fourier integral factors into geometric sums.  All phases are reduced
with integer arithmetic before they reach floating point, so frequencies
and periods may be arbitrarily large integers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .measure import CircleMeasure

FORMAT_HEADER = "# comb-measure v1"


def sinc(w: float) -> float:
    """sin(pi w) / (pi w): modulus of the first harmonic of (1/w) 1_[0, w) on a unit period."""
    return math.sin(math.pi * w) / (math.pi * w)


def _signed_ratio(l: int, m: int) -> float:
    """(l mod m) / m represented in (-1/2, 1/2] with full relative precision."""
    r = l % m
    if 2 * r > m:
        r -= m
    return r / m


def _sinpi_mod(num: int, den: int) -> float:
    """sin(pi num / den) with num reduced exactly modulo 2 den."""
    t = num % (2 * den)
    sign = 1.0
    if t >= den:
        t -= den
        sign = -1.0
    t = min(t, den - t)
    return sign * math.sin(math.pi * (t / den))


def geo_exact(l: int, n: int, k: int) -> complex:
    """sum_{p < n} e^(2 pi i l p / k) for integers of any size."""
    r = l % k
    if r == 0:
        return complex(n)
    phase = cmath.exp(1j * math.pi * _phase_mod(r * (n - 1), k))
    return phase * _sinpi_mod(r * n, k) / _sinpi_mod(r, k)


def _phase_mod(num: int, den: int) -> float:
    """(num mod 2 den) / den in [-1, 1)."""
    t = num % (2 * den)
    if t >= den:
        t -= 2 * den
    return t / den


def geo_vec(x: float, n: np.ndarray) -> np.ndarray:
    """sum_{c < n} e^(2 pi i x c) for a float x in (-1/2, 1/2] and an integer array n."""
    n = np.asarray(n, dtype=float)
    if x == 0.0:
        return n.astype(complex)
    return np.exp(1j * np.pi * x * (n - 1)) * np.sin(np.pi * x * n) / math.sin(math.pi * x)


def cell_integral(l: int, m: int) -> complex:
    """integral over [0, 1/m) of e^(2 pi i l t) dt."""
    if l == 0:
        return complex(1.0 / m)
    return cmath.exp(1j * math.pi * _phase_mod(l, m)) * _sinpi_mod(l, m) / (math.pi * l)


@dataclass(frozen=True)
class CombLevel:
    """One resonant comb factor; ``s`` and ``start`` are arrays over the G base arcs."""

    k: int
    Q: int
    box: int
    s: np.ndarray = field(compare=False)
    start: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.k < 1 or self.Q < 2 or not 1 <= self.box < self.Q:
            raise ValueError("need k >= 1 and 1 <= box < Q")
        s = np.asarray(self.s, dtype=float)
        st = np.asarray(self.start, dtype=np.int64)
        if np.any(s < 0) or np.any(s > 1):
            raise ValueError("amplitudes must lie in [0, 1] to keep the density non-negative")
        if np.any(st < 0) or np.any(st >= self.Q):
            raise ValueError("box start outside the period")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "start", st)

    @property
    def w(self) -> float:
        return self.box / self.Q

    @property
    def high(self) -> np.ndarray:
        return 1 - self.s + self.s / self.w

    @property
    def low(self) -> np.ndarray:
        return 1 - self.s

    def harmonic(self) -> np.ndarray:
        """First harmonic per arc: integral over a period of F(t) e^(2 pi i k t) k dt."""
        center = self.start + self.box / 2
        return self.s * sinc(self.w) * np.exp(2j * np.pi * center / self.Q)

    def value_at(self, j: int, t: Fraction) -> float:
        cell = math.floor((self.k * t) % 1 * self.Q)
        inside = (cell - int(self.start[j])) % self.Q < self.box
        return float(self.high[j] if inside else self.low[j])


def comb_parameters(b: np.ndarray, Q: int, w: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(s, start, phase defect) realizing harmonic ~ b with box width w Q cells.

    s = |b| / sinc(w); the box center is the multiple of 1/Q nearest to
    arg(b) / 2 pi.  The defect is |harmonic - b| per arc.
    """
    b = np.asarray(b, dtype=complex)
    box = round(w * Q)
    if box % 2 or abs(box - w * Q) > 1e-12:
        raise ValueError("w Q must be an even integer")
    s = np.abs(b) / sinc(w)
    if np.any(s > 1 + 1e-15):
        raise ValueError("|b| exceeds sinc(w); use a narrower box")
    s = np.minimum(s, 1.0)
    center = np.round((np.angle(b) / (2 * np.pi)) % 1.0 * Q).astype(np.int64) % Q
    start = (center - box // 2) % Q
    got = s * sinc(w) * np.exp(2j * np.pi * center / Q)
    return s, start, np.abs(got - b)


def box_width_for(amplitude: float) -> float:
    """Largest w = 2^-e (e >= 1) with sinc(w) >= amplitude."""
    if amplitude >= 1:
        raise ValueError("amplitude must be below 1")
    w = 0.5
    while sinc(w) < amplitude:
        w /= 2
    return w


class CombMeasure:
    """Density base[j] on [j/G, (j+1)/G) times the nested comb factors."""

    def __init__(self, G: int, base: Sequence[float], levels: Sequence[CombLevel] = ()):
        self.G = int(G)
        self.base = np.asarray(base, dtype=float)
        if self.base.shape != (self.G,) or np.any(self.base < 0):
            raise ValueError("base must be G non-negative heights")
        self.levels = tuple(levels)
        prev = self.G
        for lev in self.levels:
            if lev.s.shape != (self.G,) or lev.start.shape != (self.G,):
                raise ValueError("level arrays must have one entry per base arc")
            if lev.k % prev:
                raise ValueError(f"period count {lev.k} is not a multiple of the previous cell count {prev}")
            prev = lev.Q * lev.k
        self._cache = {}

    @classmethod
    def lebesgue(cls, G: int = 1) -> "CombMeasure":
        return cls(G, np.ones(G))

    @classmethod
    def from_step(cls, mu: CircleMeasure, G: int) -> "CombMeasure":
        """Exact conversion of a step measure whose breakpoints lie on the 1/G grid."""
        if mu.atoms:
            raise ValueError("atoms are not representable")
        base = np.zeros(G)
        for a, b, h in mu.segments:
            lo, hi = a * G, b * G
            if lo != round(lo) or hi != round(hi):
                raise ValueError("segment endpoints are not on the grid")
            base[round(lo):round(hi)] = h
        return cls(G, base)

    def with_level(self, level: CombLevel) -> "CombMeasure":
        return CombMeasure(self.G, self.base, self.levels + (level,))

    def prefix(self, n_levels: int) -> "CombMeasure":
        return CombMeasure(self.G, self.base, self.levels[:n_levels])

    def restrict_arcs(self, mask) -> "CombMeasure":
        m = np.zeros(self.G, dtype=bool)
        m[np.asarray(mask)] = True
        return CombMeasure(self.G, np.where(m, self.base, 0.0), self.levels)

    def restrict(self, arc) -> "CombMeasure":
        lo, hi = arc
        a, b = lo * self.G, hi * self.G
        if a != round(a) or b != round(b):
            raise ValueError("restriction arcs must lie on the base grid")
        return self.restrict_arcs(np.arange(round(a), round(b)))

    # masses and densities

    @property
    def total_mass(self) -> float:
        return math.fsum(self.base.tolist()) / self.G

    def is_probability(self, tol: float = 1e-12) -> bool:
        return abs(self.total_mass - 1) <= tol

    def mass(self, arc) -> float:
        return self.restrict(arc).total_mass

    def density_at(self, t) -> float:
        t = Fraction(t) % 1
        j = math.floor(t * self.G)
        v = float(self.base[j])
        for lev in self.levels:
            v *= lev.value_at(j, t)
        return v

    def arc_max_density(self) -> np.ndarray:
        d = self.base.copy()
        for lev in self.levels:
            d = d * np.maximum(lev.high, lev.low)
        return d

    def max_density(self) -> float:
        return float(self.arc_max_density().max())

    def jump_variation_bound(self) -> float:
        """Upper bound on the total jump variation of the density (periodic)."""
        d = self.base
        v = float(np.abs(d - np.roll(d, 1)).sum())
        dmax = d.copy()
        for lev in self.levels:
            fmax = np.maximum(lev.high, lev.low)
            inner = float(np.sum((lev.k // self.G) * 2 * lev.s / lev.w))
            edges = float(np.sum(fmax + np.roll(fmax, 1)))
            v = float(fmax.max()) * v + float(dmax.max()) * (inner + edges)
            dmax = dmax * fmax
        return v

    # Fourier

    def _arc_integrals(self, l: int) -> np.ndarray:
        """integral over base arc j of prod_i F_i e^(2 pi i l t) dt, per arc (arc phase excluded)."""
        if not self.levels:
            return np.full(self.G, cell_integral(l, self.G))
        last = self.levels[-1]
        t = np.full(self.G, cell_integral(l, last.Q * last.k), dtype=complex)
        for i in range(len(self.levels) - 1, -1, -1):
            lev = self.levels[i]
            qk = lev.Q * lev.k
            x = _signed_ratio(l, qk)
            full = geo_vec(x, np.array([lev.Q]))[0]
            first = np.minimum(lev.box, lev.Q - lev.start)
            rest = lev.box - first
            boxsum = np.exp(2j * np.pi * x * lev.start) * geo_vec(x, first) + geo_vec(x, rest)
            period = (lev.low * full + (lev.s / lev.w) * boxsum) * t
            outer = self.G if i == 0 else self.levels[i - 1].Q * self.levels[i - 1].k
            t = geo_exact(l, lev.k // outer, lev.k) * period
        return t

    def fourier(self, l: int) -> complex:
        l = int(l)
        if l in self._cache:
            return self._cache[l]
        arcs = self._arc_integrals(l)
        r = l % self.G
        phase = np.exp(2j * np.pi * ((r * np.arange(self.G)) % self.G) / self.G)
        val = complex(np.sum(self.base * phase * arcs))
        if len(self._cache) < 4096:
            self._cache[l] = val
        return val

    def fourier_many(self, ls: Iterable[int]) -> np.ndarray:
        return np.array([self.fourier(l) for l in ls], dtype=complex)

    # explicit expansion (small pieces only)

    def explicit_segments(self, lo: Fraction, hi: Fraction, cap: int = 200_000) -> CircleMeasure:
        """The density on [lo, hi) as an explicit step measure (breakpoints are exact)."""
        lo, hi = Fraction(lo), Fraction(hi)
        cuts = {lo, hi}
        g0, g1 = math.floor(lo * self.G), math.ceil(hi * self.G)
        for j in range(g0, g1 + 1):
            x = Fraction(j, self.G)
            if lo < x < hi:
                cuts.add(x)
        for lev in self.levels:
            p0, p1 = math.floor(lo * lev.k), math.ceil(hi * lev.k)
            if 2 * (p1 - p0) + len(cuts) > cap:
                raise ValueError("too many pieces for an explicit expansion")
            for p in range(p0, p1 + 1):
                j = math.floor(Fraction(p, lev.k) * self.G) % self.G
                st = int(lev.start[j])
                for c in (st, (st + lev.box) % lev.Q):
                    x = (p + Fraction(c, lev.Q)) / lev.k
                    if lo < x < hi:
                        cuts.add(x)
        pts = sorted(cuts)
        segs = []
        for a, b in zip(pts, pts[1:]):
            h = self.density_at((a + b) / 2)
            if h:
                segs.append((float(a), float(b), h))
        return CircleMeasure((), tuple(segs))

    def to_explicit(self, cap: int = 200_000) -> CircleMeasure:
        return self.explicit_segments(Fraction(0), Fraction(1), cap)

    # text format

    def dumps(self) -> str:
        out = [FORMAT_HEADER, f"grid {self.G}", "base " + " ".join(repr(float(x)) for x in self.base)]
        for lev in self.levels:
            out.append(f"level {lev.k} {lev.Q} {lev.box}")
            out.append("s " + " ".join(repr(float(x)) for x in lev.s))
            out.append("start " + " ".join(str(int(x)) for x in lev.start))
        return "\n".join(out) + "\n"

    @classmethod
    def loads(cls, text: str) -> "CombMeasure":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        try:
            if not lines[0].startswith("grid "):
                raise ValueError("expected 'grid'")
            G = int(lines[0].split()[1])
            base = [float(x) for x in lines[1].split()[1:]]
            levels = []
            i = 2
            while i < len(lines):
                _, k, Q, box = lines[i].split()
                s = [float(x) for x in lines[i + 1].split()[1:]]
                st = [int(x) for x in lines[i + 2].split()[1:]]
                levels.append(CombLevel(int(k), int(Q), int(box), np.array(s), np.array(st)))
                i += 3
        except (IndexError, ValueError) as e:
            raise ValueError(f"malformed comb measure: {e}") from None
        return cls(G, base, levels)


def load_measure(text: str):
    """Parse either measure format by its header line."""
    head = text.lstrip().splitlines()[0] if text.strip() else ""
    if head.startswith(FORMAT_HEADER):
        return CombMeasure.loads(text)
    return CircleMeasure.loads(text)
