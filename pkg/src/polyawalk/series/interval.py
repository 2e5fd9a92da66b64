"""Closed real intervals with outward rounding on binary64 endpoints.

Addition and subtraction round exactly in the required direction using
an error-free transformation (TwoSum), so an exact floating-point sum is
never widened.  Products, quotients and square roots are correctly
rounded by IEEE 754, so one ulp of outward widening keeps them sound.
``exp``, ``log`` and ``pow`` come from the platform libm, which is not
guaranteed to round correctly; those widen by two ulps on each side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

_INF = math.inf
_LIBM_ULPS = 2


def _down(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, _INF)
    return x


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    if not math.isfinite(s):
        return s, 0.0
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def add_down(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return _down(s) if err < 0 else s


def add_up(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return _up(s) if err > 0 else s


def _mul_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    p = a * b
    return _down(p), _up(p)


def _div_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    q = a / b
    return _down(q), _up(q)


def _fraction_bounds(q: Fraction) -> tuple[float, float]:
    # float(Fraction) is correctly rounded, so the true value is at most one ulp away.
    f = float(q)
    exact = Fraction(f)
    if exact == q:
        return f, f
    if exact < q:
        return f, _up(f)
    return _down(f), f


@dataclass(frozen=True, slots=True)
class Interval:
    """A closed interval ``[lo, hi]`` of reals."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoint is NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # construction -------------------------------------------------------
    @classmethod
    def point(cls, x) -> "Interval":
        """Smallest float interval containing the number ``x``."""
        if isinstance(x, Interval):
            return x
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, float):
            return cls(x, x)
        if isinstance(x, int):
            return cls(*_fraction_bounds(Fraction(x)))
        if isinstance(x, Rational):
            return cls(*_fraction_bounds(Fraction(x.numerator, x.denominator)))
        if isinstance(x, Real):
            f = float(x)
            return cls(f, f)
        raise TypeError(f"cannot enclose {type(x).__name__} in a real interval")

    @classmethod
    def hull(cls, *items) -> "Interval":
        parts = [cls.point(t) for t in items]
        return cls(min(p.lo for p in parts), max(p.hi for p in parts))

    # inspection ---------------------------------------------------------
    @property
    def width(self) -> float:
        """Width rounded upward."""
        return add_up(self.hi, -self.lo)

    @property
    def mid(self) -> float:
        return self.lo + (self.hi - self.lo) / 2

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        q = Fraction(x)  # exact comparison for ints and rationals
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def contains(self, x) -> bool:
        return x in self

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("intervals are disjoint")
        return Interval(lo, hi)

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def __bool__(self) -> bool:
        return not (self.lo == 0.0 and self.hi == 0.0)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(add_down(self.lo, o.lo), add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(add_down(self.lo, -o.hi), add_up(self.hi, -o.lo))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (o.lo, o.hi):
                lo, hi = _mul_bounds(a, b)
                los.append(lo)
                his.append(hi)
        return Interval(min(los), max(his))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError(f"divisor interval {o} contains zero")
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (o.lo, o.hi):
                lo, hi = _div_bounds(a, b)
                los.append(lo)
                his.append(hi)
        return Interval(min(los), max(his))

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            return self.power(k)
        result = Interval(1.0, 1.0)
        base = self
        if k % 2 == 0 and self.lo < 0 < self.hi:
            base = Interval(0.0, self.mag)
        for _ in range(k):
            result = result * base
        return result

    def reciprocal(self) -> "Interval":
        return Interval(1.0, 1.0) / self

    # elementary functions -------------------------------------------------
    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise ValueError(f"sqrt of interval with negative part {self}")
        lo = 0.0 if self.lo == 0 else max(0.0, _down(math.sqrt(self.lo)))
        return Interval(lo, _up(math.sqrt(self.hi)))

    def exp(self) -> "Interval":
        lo = max(0.0, _down(math.exp(self.lo), _LIBM_ULPS))
        try:
            hi = _up(math.exp(self.hi), _LIBM_ULPS)
        except OverflowError:
            hi = _INF
        return Interval(lo, hi)

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise ValueError(f"log of non-positive interval {self}")
        return Interval(_down(math.log(self.lo), _LIBM_ULPS), _up(math.log(self.hi), _LIBM_ULPS))

    def power(self, p: float) -> "Interval":
        """``self ** p`` for a real exponent and a positive interval."""
        if self.lo <= 0:
            raise ValueError(f"real power needs a positive interval, got {self}")
        a, b = self.lo ** p, self.hi ** p
        lo, hi = min(a, b), max(a, b)
        return Interval(max(0.0, _down(lo, _LIBM_ULPS)), _up(hi, _LIBM_ULPS))

    def clamp_lower(self, floor: float) -> "Interval":
        """Intersect with ``[floor, +inf)`` when the caller knows the value is above ``floor``."""
        return Interval(max(self.lo, floor), max(self.hi, floor))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def to_json(self) -> list[float]:
        return [self.lo, self.hi]


def pi_interval() -> Interval:
    # math.pi is the double nearest pi; pi lies between it and the next double up.
    return Interval(math.pi, _up(math.pi))


def e_interval() -> Interval:
    return Interval(_down(math.e), _up(math.e))
