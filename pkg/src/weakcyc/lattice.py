"""Z-indexed sparse vectors, weight sequences and log-domain weight products.

Every magnitude is carried as a base-2 logarithm.  Products of weights such
as 2**(9**8) never exist in linear scale; only their logarithms do.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

LINEAR_LIMIT = 512

# Window sizes for the cached dense prefix tables of non-closed-form rules.
DENSE_LIMIT = 1 << 23


@dataclass(frozen=True, order=True)
class LogMag:
    """A positive magnitude stored as its base-2 logarithm.

    ``a + b`` is the product of magnitudes, ``a - b`` the quotient and ``-a``
    the reciprocal.  The value ``-inf`` is the zero-vector marker returned by
    norms of empty vectors.
    """

    value: float

    def __add__(self, other: "LogMag") -> "LogMag":
        return LogMag(self.value + _val(other))

    def __sub__(self, other: "LogMag") -> "LogMag":
        return LogMag(self.value - _val(other))

    def __neg__(self) -> "LogMag":
        return LogMag(-self.value)

    def power(self, p: float) -> "LogMag":
        return LogMag(self.value * p)

    @property
    def is_zero(self) -> bool:
        return self.value == -math.inf

    def linear(self) -> float:
        """Linear-scale value; refuses when it would leave the safe range."""
        if self.is_zero:
            return 0.0
        if abs(self.value) > LINEAR_LIMIT:
            raise OverflowError(f"2**{self.value} is outside the linear range")
        return 2.0 ** float(self.value)

    @classmethod
    def of(cls, x: float) -> "LogMag":
        if x < 0:
            raise ValueError("magnitudes are non-negative")
        return cls(-math.inf if x == 0 else math.log2(x))

    def __repr__(self) -> str:
        return f"LogMag({self.value!r})"


ZERO = LogMag(-math.inf)
ONE = LogMag(0)


def _val(x) -> float:
    return x.value if isinstance(x, LogMag) else x


@dataclass(frozen=True)
class Floor:
    """A proven lower bound ``log2_bound`` for a statistic, valid for every n.

    ``k = None`` means the bound holds for every k; otherwise only at that k.
    """

    stat: str
    log2_bound: float
    reason: str
    k: int | None = None


def _as_index_array(n) -> np.ndarray:
    return np.asarray(n, dtype=np.int64)


class WeightSequence:
    """Weight magnitudes |w_n| given as a vectorized rule for log2 |w_n|.

    ``log2_rule`` maps an int64 array of indices to an array of log2 weights.
    ``log2_prefix`` (optional) is a closed form of L(n), where
    L(0) = 0, L(n) = sum_{1..n} log2 w_j for n > 0 and
    L(n) = -sum_{n+1..0} log2 w_j for n < 0, so that
    log2 beta(a, b) = L(b) - L(a - 1).  It must accept arbitrary Python ints.
    """

    def __init__(
        self,
        log2_rule: Callable[[np.ndarray], np.ndarray],
        lower_bound: float,
        upper_bound: float,
        name: str | None = None,
        *,
        log2_prefix: Callable[[int], float] | None = None,
        symmetric: bool = False,
        exact: bool = False,
        floors: Sequence[Floor] = (),
        params: Mapping | None = None,
    ):
        if not 0 < lower_bound <= upper_bound:
            raise ValueError("need 0 < lower_bound <= upper_bound")
        self._rule = log2_rule
        self.lower_bound = float(lower_bound)
        self.upper_bound = float(upper_bound)
        self.name = name
        self._prefix = log2_prefix
        self.symmetric = symmetric
        self.exact = exact
        self.floors = tuple(floors)
        self.params = dict(params or {})
        self._lock = threading.Lock()
        # published tables are never mutated; growth swaps in a new array
        self._pos = np.zeros(1, dtype=np.int64 if exact else np.float64)
        self._neg = np.zeros(1, dtype=self._pos.dtype)

    def __repr__(self) -> str:
        return f"WeightSequence({self.name or 'custom'})"

    @property
    def c(self) -> float:
        """Smallest c >= 1 with 1/c <= |w_n| <= c."""
        return max(1.0, self.upper_bound, 1.0 / self.lower_bound)

    def log2(self, n):
        """log2 |w_n| for an int or an array of ints."""
        if isinstance(n, (int, np.integer)):
            if abs(int(n)) >= 2**62:
                return self._rule_big(int(n))
            return self._rule(np.array([n], dtype=np.int64))[0].item()
        return self._rule(_as_index_array(n))

    def _rule_big(self, n: int):
        big = getattr(self._rule, "big", None)
        if big is None:
            raise OverflowError(f"index {n} is outside the int64 range of this rule")
        return big(n)

    def eval(self, n) -> float:
        v = self.log2(n)
        return 2.0 ** np.asarray(v, dtype=float) if not np.isscalar(v) else 2.0 ** v

    # prefix sums

    def _table(self, side: str, upto: int) -> np.ndarray:
        tab = self._pos if side == "pos" else self._neg
        if upto < len(tab):
            return tab
        with self._lock:
            tab = self._pos if side == "pos" else self._neg
            if upto < len(tab):
                return tab
            size = max(upto + 1, 2 * len(tab), 4096)
            if size > DENSE_LIMIT + 1:
                raise OverflowError("index beyond the dense prefix window; supply a closed-form prefix")
            if side == "pos":
                idx = np.arange(1, size, dtype=np.int64)
            else:
                idx = -np.arange(0, size - 1, dtype=np.int64)
            vals = self._rule(idx)
            vals = vals.astype(tab.dtype) if self.exact else np.asarray(vals, dtype=float)
            new = np.concatenate([[0], np.cumsum(vals)]).astype(tab.dtype)
            if side == "pos":
                self._pos = new
            else:
                self._neg = new
            return new

    def prefix(self, n: int):
        """L(n) for a single Python int."""
        n = int(n)
        if self._prefix is not None:
            return self._prefix(n)
        if n >= 0:
            return self._table("pos", n)[n].item()
        return -self._table("neg", -n)[-n].item()

    def prefix_array(self, ns) -> np.ndarray:
        ns = _as_index_array(ns)
        if ns.size == 0:
            return np.zeros(0)
        lo, hi = int(ns.min()), int(ns.max())
        if max(-lo, hi) <= DENSE_LIMIT and (self._prefix is None or self.exact or max(-lo, hi) <= 1 << 20):
            out = np.empty(ns.shape, dtype=self._pos.dtype)
            pos = ns >= 0
            if hi >= 0:
                out[pos] = self._table("pos", max(hi, 0))[ns[pos]]
            if lo < 0:
                out[~pos] = -self._table("neg", -lo)[-ns[~pos]]
            return out
        return np.array([self.prefix(int(v)) for v in ns.ravel()]).reshape(ns.shape)

    def beta(self, a: int, b: int) -> LogMag:
        return beta(self, a, b)


def beta(w: WeightSequence, a: int, b: int) -> LogMag:
    """log2 of prod_{j=a}^{b} |w_j|."""
    if a > b:
        raise ValueError(f"beta needs a <= b, got ({a}, {b})")
    return LogMag(w.prefix(b) - w.prefix(a - 1))


def beta_array(w: WeightSequence, a, b) -> np.ndarray:
    """Vectorized log2 beta(a, b); callers guarantee a <= b elementwise."""
    a = _as_index_array(a)
    b = _as_index_array(b)
    if np.any(a > b):
        raise ValueError("beta needs a <= b")
    return w.prefix_array(b) - w.prefix_array(a - 1)


def direct_log2_beta(w: WeightSequence, a: int, b: int) -> float:
    """log2 beta(a, b) by summing every factor; the slow reference path."""
    if a > b:
        raise ValueError(f"beta needs a <= b, got ({a}, {b})")
    vals = w.log2(np.arange(a, b + 1, dtype=np.int64))
    if w.exact:
        return int(np.sum(vals, dtype=np.int64))
    return math.fsum(vals.tolist())


def transport_log2(w: WeightSequence, m: int, n: int):
    """log2 of the factor f with T^n e_m = f e_{m-n}."""
    if n >= 0:
        return 0 if n == 0 else w.prefix(m) - w.prefix(m - n)
    return -(w.prefix(m - n) - w.prefix(m))


@dataclass(frozen=True)
class ZVector:
    """Finitely supported vector on Z.

    Entries are stored as ``index -> (log2 |x_n|, x_n / |x_n|)`` so that
    entries far outside the float range remain representable.
    """

    entries: Mapping[int, tuple[float, complex]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): (v[0], complex(v[1])) for k, v in self.entries.items() if v[0] != -math.inf}
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_values(cls, values: Mapping[int, complex]) -> "ZVector":
        ent = {}
        for k, v in values.items():
            v = complex(v)
            if v != 0:
                ent[int(k)] = (math.log2(abs(v)), v / abs(v))
        return cls(ent)

    @classmethod
    def basis(cls, n: int, value: complex = 1.0) -> "ZVector":
        return cls.from_values({n: value})

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __getitem__(self, n: int) -> complex:
        if n not in self.entries:
            return 0j
        lm, ph = self.entries[n]
        return LogMag(lm).linear() * ph

    def logmag(self, n: int) -> LogMag:
        return LogMag(self.entries[n][0]) if n in self.entries else ZERO

    def values(self) -> dict[int, complex]:
        return {n: self[n] for n in self.entries}

    def scale(self, c: complex) -> "ZVector":
        if c == 0:
            return ZVector()
        lc, ph = math.log2(abs(c)), c / abs(c)
        return ZVector({n: (lm + lc, p * ph) for n, (lm, p) in self.entries.items()})

    def scale_log(self, log2_factor: float) -> "ZVector":
        return ZVector({n: (lm + log2_factor, p) for n, (lm, p) in self.entries.items()})

    def add(self, other: "ZVector") -> "ZVector":
        """Sum; overlapping entries must be in the linear range."""
        vals = self.values()
        for n, v in other.values().items():
            vals[n] = vals.get(n, 0) + v
        return ZVector.from_values(vals)

    def gamma(self) -> int:
        """max |n| over the support, 0 for the zero vector."""
        return max((abs(n) for n in self.entries), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(tuple(self.entries.items()))

    def close_to(self, other: "ZVector", rel: float = 1e-10) -> bool:
        if set(self.entries) != set(other.entries):
            return False
        for n, (lm, ph) in self.entries.items():
            lo, po = other.entries[n]
            # relative error of the complex entry, in terms of log and phase
            if abs(lm - lo) * math.log(2) > rel or abs(ph - po) > rel:
                return False
        return True


def apply_shift(w: WeightSequence, x: ZVector, n: int) -> ZVector:
    """T^n x for the weighted shift T e_m = w_m e_{m-1}; negative n inverts."""
    out = {}
    for m, (lm, ph) in x.entries.items():
        out[m - n] = (lm + transport_log2(w, m, n), ph)
    return ZVector(out)


def pnorm(x: ZVector, p: float) -> LogMag:
    """(sum |x_n|^p)^(1/p) or max |x_n| in log2; ZERO for the zero vector."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if not x:
        return ZERO
    logs = np.array([lm for lm, _ in x.entries.values()], dtype=float)
    if math.isinf(p):
        return LogMag(float(logs.max()))
    return LogMag(log2_sum_pow(logs, p) / p)


def log2_sum_pow(logs: np.ndarray, p: float) -> float:
    """log2 sum 2^(p*l) without leaving the float range."""
    s = p * np.asarray(logs, dtype=float)
    top = s.max()
    return float(top + np.log2(np.sum(np.exp2(s - top))))


def vector_from_logs(indices: Iterable[int], logs: Iterable[float], phases: Iterable[complex] | None = None) -> ZVector:
    ph = phases if phases is not None else itertools.repeat(1 + 0j)
    return ZVector({int(i): (l, complex(p)) for i, l, p in zip(indices, logs, ph)})
