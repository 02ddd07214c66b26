"""Conservative interval arithmetic.

Endpoints are computed with round-to-nearest floats and then pushed outward
by one relative epsilon plus one denormal step, which is enough to keep the
enclosure property for the elementary operations used by Hessian
expressions.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Interval",
    "IntervalVector",
    "IntervalMatrix",
    "IntervalError",
    "DivisionByIntervalContainingZero",
    "DomainViolation",
    "interval_binary",
    "interval_unary",
    "interval_hull_width",
]

_REL_EPS = 2.0**-52
_TINY = 5e-324
_MAX = sys.float_info.max
_TWO_PI = 2.0 * math.pi
_HALF_PI = 0.5 * math.pi


class IntervalError(ArithmeticError):
    pass


class DivisionByIntervalContainingZero(IntervalError):
    pass


class DomainViolation(IntervalError):
    pass


def _down(x: float) -> float:
    # an overflowed +inf may stand for a finite value, so back off to the largest float
    if x == math.inf:
        return _MAX
    if math.isinf(x) or math.isnan(x):
        return x
    return x - abs(x) * _REL_EPS - _TINY


def _up(x: float) -> float:
    if x == -math.inf:
        return -_MAX
    if math.isinf(x) or math.isnan(x):
        return x
    return x + abs(x) * _REL_EPS + _TINY


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def _outward(cls, lo: float, hi: float) -> "Interval":
        return cls(_down(lo), _up(hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def __contains__(self, x) -> bool:
        return self.contains(x)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return Interval._outward(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Interval._outward(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        # 0 * inf yields nan; an endpoint of 0 bounds that product by 0
        products = [0.0 if math.isnan(p) else p for p in products]
        return Interval._outward(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.lo <= 0.0 <= other.hi:
            raise DivisionByIntervalContainingZero(f"{self} / {other}")
        quotients = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return Interval._outward(min(quotients), max(quotients))

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __pow__(self, k):
        return self.powi(k)

    # elementary functions -------------------------------------------------

    def powi(self, k: int) -> "Interval":
        """Integer power with the dedicated even-power range rule."""
        if k != int(k) or k < 0:
            raise ValueError("powi needs a non-negative integer exponent")
        k = int(k)
        if k == 0:
            return Interval(1.0, 1.0)
        if k == 1:
            return self
        lo_k = _safe_pow(self.lo, k)
        hi_k = _safe_pow(self.hi, k)
        if k % 2 == 1:
            return Interval._outward(lo_k, hi_k)
        if self.lo >= 0.0:
            return Interval._outward(lo_k, hi_k)
        if self.hi <= 0.0:
            return Interval._outward(hi_k, lo_k)
        return Interval(0.0, _up(max(lo_k, hi_k)))

    def exp(self) -> "Interval":
        return Interval(max(0.0, _down(_safe_exp(self.lo))), _up(_safe_exp(self.hi)))

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise DomainViolation(f"log of {self}")
        return Interval._outward(math.log(self.lo), _safe_log(self.hi))

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise DomainViolation(f"sqrt of {self}")
        return Interval(max(0.0, _down(math.sqrt(self.lo))), _up(math.sqrt(self.hi)))

    def sin(self) -> "Interval":
        return self._periodic(math.sin, _HALF_PI, -_HALF_PI)

    def cos(self) -> "Interval":
        return self._periodic(math.cos, 0.0, math.pi)

    def _periodic(self, fn, max_at: float, min_at: float) -> "Interval":
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            return Interval(-1.0, 1.0)
        if self.width >= _TWO_PI:
            return Interval(-1.0, 1.0)
        a, b = fn(self.lo), fn(self.hi)
        lo, hi = _down(min(a, b)), _up(max(a, b))
        if _hits(self.lo, self.hi, max_at):
            hi = 1.0
        if _hits(self.lo, self.hi, min_at):
            lo = -1.0
        return Interval(max(lo, -1.0), min(hi, 1.0))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


def _hits(lo: float, hi: float, phase: float) -> bool:
    # is there an integer k with lo <= phase + 2*pi*k <= hi
    k = math.ceil((lo - phase) / _TWO_PI)
    return phase + _TWO_PI * k <= hi


def _safe_pow(x: float, k: int) -> float:
    try:
        return x**k
    except OverflowError:
        return math.copysign(math.inf, x) if k % 2 else math.inf


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _safe_log(x: float) -> float:
    return math.inf if math.isinf(x) else math.log(x)


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval(float(x), float(x))


def interval_binary(op: str, a: Interval, b: Interval) -> Interval:
    """Apply ``op`` in {"add", "sub", "mul", "div"} to two intervals."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown binary op {op!r}")


def interval_unary(op: str, a: Interval, k: int | None = None) -> Interval:
    """Apply ``op`` in {"neg", "exp", "log", "sin", "cos", "sqrt", "powi"}."""
    if op == "neg":
        return -a
    if op == "powi":
        if k is None:
            raise ValueError("powi needs an exponent")
        return a.powi(k)
    if op in ("exp", "log", "sin", "cos", "sqrt"):
        return getattr(a, op)()
    raise ValueError(f"unknown unary op {op!r}")


class IntervalVector:
    """Box in R^n stored as two endpoint arrays."""

    def __init__(self, lo, hi):
        self.lo = np.array(lo, dtype=float)
        self.hi = np.array(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("endpoint arrays must be 1-D and of equal length")
        if np.any(self.lo > self.hi):
            raise ValueError("lower endpoint exceeds upper endpoint")
        self.lo.flags.writeable = False
        self.hi.flags.writeable = False

    @classmethod
    def from_intervals(cls, entries: Iterable[Interval]) -> "IntervalVector":
        entries = list(entries)
        return cls([e.lo for e in entries], [e.hi for e in entries])

    def __len__(self) -> int:
        return self.lo.size

    def __getitem__(self, i: int) -> Interval:
        return Interval(self.lo[i], self.hi[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def width(self) -> float:
        return interval_hull_width(self)

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(self.lo <= x) and np.all(x <= self.hi))

    def __repr__(self) -> str:
        return f"IntervalVector({self.lo.tolist()}, {self.hi.tolist()})"


def interval_hull_width(v: IntervalVector | Sequence[Interval]) -> float:
    """Largest coordinate width of a box."""
    if isinstance(v, IntervalVector):
        return float(np.max(v.hi - v.lo)) if len(v) else 0.0
    return max((e.hi - e.lo for e in v), default=0.0)


class IntervalMatrix:
    """Square interval matrix stored as lower/upper endpoint arrays."""

    def __init__(self, lo, hi):
        self.lo = np.array(lo, dtype=float)
        self.hi = np.array(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 2:
            raise ValueError("endpoint arrays must be 2-D and of equal shape")
        if self.lo.shape[0] != self.lo.shape[1]:
            raise ValueError("interval matrix must be square")
        if np.any(self.lo > self.hi):
            raise ValueError("lower endpoint exceeds upper endpoint")
        self.lo.flags.writeable = False
        self.hi.flags.writeable = False

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "IntervalMatrix":
        """Build from nested ``(lo, hi)`` pairs or :class:`Interval` objects."""
        lo = [[_coerce_pair(e)[0] for e in row] for row in rows]
        hi = [[_coerce_pair(e)[1] for e in row] for row in rows]
        return cls(lo, hi)

    @classmethod
    def point(cls, a) -> "IntervalMatrix":
        a = np.asarray(a, dtype=float)
        return cls(a, a)

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    def __getitem__(self, ij) -> Interval:
        i, j = ij
        return Interval(self.lo[i, j], self.hi[i, j])

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.lo, self.lo.T) and np.array_equal(self.hi, self.hi.T))

    def contains(self, a) -> bool:
        a = np.asarray(a, dtype=float)
        return bool(np.all(self.lo <= a) and np.all(a <= self.hi))

    def encloses(self, other: "IntervalMatrix") -> bool:
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def scaled(self, s: float) -> "IntervalMatrix":
        if s < 0:
            return IntervalMatrix(s * self.hi, s * self.lo)
        return IntervalMatrix(s * self.lo, s * self.hi)

    def __repr__(self) -> str:
        return f"IntervalMatrix(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


def _coerce_pair(e):
    if isinstance(e, Interval):
        return e.lo, e.hi
    lo, hi = e
    return float(lo), float(hi)
