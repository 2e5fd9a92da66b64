"""Truncated power series over a fixed coefficient semantics.

A :class:`TruncatedSeries` knows the first ``order + 1`` coefficients of a
formal power series and nothing beyond.  Binary operations therefore
return results of the smaller order, and that order travels with the
value.

Four coefficient semantics are supported and never mixed:

``rational``
    :class:`fractions.Fraction`, or :class:`GaussianRational` for exact
    complex values.  Ring identities hold with ``==``.
``float`` / ``complex``
    binary64 values; products go through numpy and reciprocals switch to
    Newton iteration with FFT products for long series.
``interval``
    :class:`Interval` coefficients; each computed coefficient encloses the
    exact result of the same computation on any point inputs inside.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from ..errors import InputError
from .gaussian import GaussianRational
from .interval import Interval


class Semantics(str, Enum):
    RATIONAL = "rational"
    FLOAT = "float"
    COMPLEX = "complex"
    INTERVAL = "interval"


_NUMPY_SEMANTICS = (Semantics.FLOAT, Semantics.COMPLEX)
_FFT_THRESHOLD = 512
_FLOAT_TOL = 1e-9


def _as_semantics(sem) -> Semantics:
    try:
        return Semantics(sem)
    except ValueError:
        raise InputError(f"unknown coefficient semantics {sem!r}") from None


def coerce(sem: Semantics, x) -> Any:
    """Convert ``x`` into a coefficient of the given semantics."""
    if sem is Semantics.RATIONAL:
        if isinstance(x, (GaussianRational, Fraction)):
            return x
        if isinstance(x, bool):
            return Fraction(int(x))
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, (complex, np.complexfloating)):
            g = GaussianRational.coerce(complex(x))
            return g.re if g.im == 0 else g
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, (float, np.floating)):
            return Fraction(float(x))
        if isinstance(x, Interval):
            raise InputError("an interval is not an exact rational coefficient")
        return Fraction(x)
    if sem is Semantics.FLOAT:
        if isinstance(x, (complex, GaussianRational, np.complexfloating)):
            if complex(x).imag != 0:
                raise InputError(f"complex value {x!r} under float semantics")
            return float(complex(x).real)
        if isinstance(x, Interval):
            raise InputError("an interval is not a float coefficient")
        return float(x)
    if sem is Semantics.COMPLEX:
        if isinstance(x, Interval):
            raise InputError("an interval is not a complex coefficient")
        return complex(x)
    if isinstance(x, GaussianRational):
        if x.im != 0:
            raise InputError(f"complex value {x} under interval semantics")
        x = x.re
    return Interval.point(x)


def zero(sem: Semantics):
    return coerce(sem, 0)


def one(sem: Semantics):
    return coerce(sem, 1)


def is_zero(sem: Semantics, x) -> bool:
    if sem is Semantics.INTERVAL:
        return x.lo == 0.0 and x.hi == 0.0
    return x == 0


def _invertible(sem: Semantics, x) -> bool:
    if sem is Semantics.INTERVAL:
        return not (x.lo <= 0.0 <= x.hi)
    return x != 0


def _is_one(sem: Semantics, x) -> bool:
    if sem is Semantics.INTERVAL:
        return x.lo == 1.0 and x.hi == 1.0
    return x == 1


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients ``c_0 .. c_order`` of a power series."""

    order: int
    semantics: Semantics
    coeffs: tuple

    def __post_init__(self) -> None:
        if self.order < 0:
            raise InputError("series order must be nonnegative")
        if len(self.coeffs) != self.order + 1:
            raise InputError(
                f"series of order {self.order} needs {self.order + 1} coefficients, got {len(self.coeffs)}"
            )

    # construction ---------------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs: Iterable, semantics="rational", order: int | None = None) -> "TruncatedSeries":
        sem = _as_semantics(semantics)
        values = [coerce(sem, c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise InputError("a series needs at least one coefficient")
        if len(values) > order + 1:
            values = values[: order + 1]
        values += [zero(sem)] * (order + 1 - len(values))
        return cls(order, sem, tuple(values))

    @classmethod
    def unit(cls, order: int, semantics="rational") -> "TruncatedSeries":
        return cls.from_coeffs([1], semantics, order)

    @classmethod
    def zeros(cls, order: int, semantics="rational") -> "TruncatedSeries":
        return cls.from_coeffs([], semantics, order)

    @classmethod
    def geometric(cls, order: int, semantics="rational") -> "TruncatedSeries":
        """``1/(1-x)`` truncated at ``order``."""
        return cls.from_coeffs([1] * (order + 1), semantics, order)

    # container protocol ---------------------------------------------------
    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise InputError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(order, self.semantics, self.coeffs[: order + 1])

    def convert(self, semantics) -> "TruncatedSeries":
        """Re-express the coefficients under another semantics."""
        sem = _as_semantics(semantics)
        if sem is self.semantics:
            return self
        if self.semantics is Semantics.INTERVAL:
            raise InputError("interval coefficients cannot be converted to point semantics")
        return TruncatedSeries.from_coeffs(self.coeffs, sem, self.order)

    # operator sugar -------------------------------------------------------
    def _scalar_series(self, c) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs([c], self.semantics, self.order)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._scalar_series(other)
        return linear_combine(1, self, 1, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._scalar_series(other)
        return linear_combine(1, self, -1, other)

    def __rsub__(self, other):
        return linear_combine(1, self._scalar_series(other), -1, self)

    def __neg__(self):
        return linear_combine(-1, self, 0, self)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return multiply(self, other)
        c = coerce(self.semantics, other)
        return TruncatedSeries(self.order, self.semantics, tuple(c * s for s in self.coeffs))

    def __rmul__(self, other):
        return self.__mul__(other)

    def to_json(self) -> dict:
        return series_to_json(self)


def _check_same(S: TruncatedSeries, T: TruncatedSeries) -> None:
    if S.semantics is not T.semantics:
        raise InputError(f"mixed coefficient semantics: {S.semantics.value} and {T.semantics.value}")


def linear_combine(alpha, S: TruncatedSeries, beta, T: TruncatedSeries) -> TruncatedSeries:
    """``alpha*S + beta*T`` up to the smaller order."""
    _check_same(S, T)
    sem = S.semantics
    a, b = coerce(sem, alpha), coerce(sem, beta)
    n = min(S.order, T.order)
    return TruncatedSeries(n, sem, tuple(a * S.coeffs[k] + b * T.coeffs[k] for k in range(n + 1)))


def _np(S: TruncatedSeries, n: int) -> np.ndarray:
    dtype = np.float64 if S.semantics is Semantics.FLOAT else np.complex128
    return np.asarray(S.coeffs[: n + 1], dtype=dtype)


def _fft_mul(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """First ``n + 1`` coefficients of the product of two numpy coefficient arrays."""
    a, b = a[: n + 1], b[: n + 1]
    size = len(a) + len(b) - 1
    if min(len(a), len(b)) <= _FFT_THRESHOLD:
        return np.convolve(a, b)[: n + 1]
    nfft = 1 << (size - 1).bit_length()
    if np.iscomplexobj(a) or np.iscomplexobj(b):
        out = np.fft.ifft(np.fft.fft(a, nfft) * np.fft.fft(b, nfft))
    else:
        out = np.fft.irfft(np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft), nfft)
    return out[: n + 1]


def _from_np(arr: np.ndarray, sem: Semantics, n: int) -> TruncatedSeries:
    cast = float if sem is Semantics.FLOAT else complex
    return TruncatedSeries(n, sem, tuple(cast(x) for x in arr[: n + 1]))


def multiply(S: TruncatedSeries, T: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product up to the smaller order."""
    _check_same(S, T)
    sem = S.semantics
    n = min(S.order, T.order)
    if sem in _NUMPY_SEMANTICS:
        return _from_np(_fft_mul(_np(S, n), _np(T, n), n), sem, n)
    s, t = S.coeffs, T.coeffs
    z = zero(sem)
    s_nz = [j for j in range(n + 1) if not is_zero(sem, s[j])]
    t_nz = [j for j in range(n + 1) if not is_zero(sem, t[j])]
    out = [z] * (n + 1)
    if len(t_nz) < len(s_nz):
        s, t, s_nz, t_nz = t, s, t_nz, s_nz
    for j in s_nz:
        sj = s[j]
        for k in t_nz:
            if j + k > n:
                break
            out[j + k] = out[j + k] + sj * t[k]
    return TruncatedSeries(n, sem, tuple(out))


def _reciprocal_direct(coeffs: Sequence, n: int, sem: Semantics) -> list:
    s0 = coeffs[0]
    inv0 = one(sem) / s0
    nz = [j for j in range(1, n + 1) if not is_zero(sem, coeffs[j])]
    r = [inv0]
    for m in range(1, n + 1):
        acc = zero(sem)
        for j in nz:
            if j > m:
                break
            acc = acc + coeffs[j] * r[m - j]
        r.append(-(acc * inv0) if not is_zero(sem, acc) else zero(sem))
    return r


def _newton_reciprocal(a: np.ndarray, n: int) -> np.ndarray:
    """Reciprocal of a numpy coefficient array by Newton iteration r <- r(2 - a r)."""
    r = np.array([1.0 / a[0]], dtype=a.dtype)
    prec = 1
    while prec < n + 1:
        prec = min(2 * prec, n + 1)
        ar = _fft_mul(a[:prec], r, prec - 1)
        ar = -ar
        ar[0] += 2.0
        r = _fft_mul(r, ar, prec - 1)
    return r[: n + 1]


def reciprocal(S: TruncatedSeries, method: str = "auto") -> TruncatedSeries:
    """``1/S`` up to ``S.order``.

    ``method`` selects the algorithm for float and complex semantics:
    ``"direct"`` is the quadratic recurrence, ``"newton"`` the FFT-based
    iteration, ``"auto"`` picks by length.  Exact and interval semantics
    always use the recurrence.
    """
    sem, n = S.semantics, S.order
    s0 = S.coeffs[0]
    if not _invertible(sem, s0):
        raise InputError(f"constant coefficient s_0 = {s0!r} is not invertible")
    if sem in _NUMPY_SEMANTICS:
        use_newton = method == "newton" or (method == "auto" and n > _FFT_THRESHOLD)
        if use_newton:
            return _from_np(_newton_reciprocal(_np(S, n), n), sem, n)
        a = _np(S, n)
        r = np.zeros(n + 1, dtype=a.dtype)
        r[0] = 1.0 / a[0]
        for m in range(1, n + 1):
            r[m] = -np.dot(a[1 : m + 1], r[m - 1 :: -1][:m]) * r[0]
        return _from_np(r, sem, n)
    return TruncatedSeries(n, sem, tuple(_reciprocal_direct(S.coeffs, n, sem)))


def prefix_sums(S: TruncatedSeries) -> TruncatedSeries:
    """Running sums ``s_0 + ... + s_n``; the series ``S/(1-x)``."""
    sem = S.semantics
    if sem in _NUMPY_SEMANTICS:
        return _from_np(np.cumsum(_np(S, S.order)), sem, S.order)
    out, acc = [], zero(sem)
    for c in S.coeffs:
        acc = acc + c
        out.append(acc)
    return TruncatedSeries(S.order, sem, tuple(out))


def solve_first_return(B: TruncatedSeries) -> TruncatedSeries:
    """First-return series ``C = 1 - 1/B`` of a return series with ``b_0 = 1``."""
    if not _is_one(B.semantics, B.coeffs[0]):
        raise InputError(f"return series must start with b_0 = 1, got {B.coeffs[0]!r}")
    C = 1 - reciprocal(B)
    return TruncatedSeries(C.order, C.semantics, (zero(C.semantics),) + C.coeffs[1:])


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    p, r = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if p * p == q.numerator and r * r == q.denominator:
        return Fraction(p, r)
    return None


def _default_branch(sem: Semantics, q):
    if sem is Semantics.RATIONAL:
        if isinstance(q, GaussianRational):
            if q.im != 0:
                return None
            q = q.re
        return _exact_sqrt(q)
    if sem is Semantics.FLOAT:
        return math.sqrt(q) if q >= 0 else None
    if sem is Semantics.INTERVAL:
        return q.sqrt() if q.lo >= 0 else None
    return None


def _branch_matches(sem: Semantics, root, q) -> bool:
    sq = root * root
    if sem is Semantics.RATIONAL:
        return sq == q
    if sem is Semantics.INTERVAL:
        return not (sq.hi < q.lo or q.hi < sq.lo)
    return abs(sq - q) <= _FLOAT_TOL * max(1.0, abs(q))


def solve_squared_factor(B: TruncatedSeries, B0: TruncatedSeries, lowest=None) -> TruncatedSeries:
    """Series square root ``C0`` of ``1 - B0/B``.

    The lowest nonzero coefficient of ``1 - B0/B`` must sit at an even
    index ``2h``; the result then starts at index ``h`` and is known only
    up to order ``N - h`` where ``N`` is the common order of the inputs.
    Under real semantics the lowest coefficient of the root is taken
    nonnegative; otherwise ``lowest`` must name it.
    """
    _check_same(B, B0)
    sem = B.semantics
    if not _is_one(sem, B.coeffs[0]) or not _is_one(sem, B0.coeffs[0]):
        raise InputError("both series must have constant coefficient 1")
    Q = 1 - multiply(B0, reciprocal(B))
    n = Q.order
    k = next((j for j in range(n + 1) if not is_zero(sem, Q.coeffs[j])), None)
    if k is None:
        # a root coefficient at index j only shows up at order 2j of the square
        return TruncatedSeries(n // 2, sem, Q.coeffs[: n // 2 + 1])
    if sem is Semantics.INTERVAL and Q.coeffs[k].lo <= 0.0 <= Q.coeffs[k].hi:
        raise InputError(f"cannot decide whether coefficient {k} of 1 - B0/B vanishes")
    if k % 2:
        raise InputError(f"1 - B0/B has lowest nonzero term at odd order {k}; no series square root")
    qk = Q.coeffs[k]
    if lowest is None:
        root = _default_branch(sem, qk)
        if root is None:
            raise InputError(f"branch ambiguous for lowest coefficient {qk!r}; supply its square root")
    else:
        root = coerce(sem, lowest)
        if not _branch_matches(sem, root, qk):
            raise InputError(f"supplied branch {lowest!r} does not square to {qk!r}")
    h = k // 2
    t = Q.coeffs[k:]
    two_root = root + root
    s = [root]
    for j in range(1, n - k + 1):
        acc = t[j]
        for i in range(1, j):
            acc = acc - s[i] * s[j - i]
        s.append(acc / two_root)
    coeffs = (zero(sem),) * h + tuple(s)
    return TruncatedSeries(n - h, sem, coeffs)


def eval_partial(S: TruncatedSeries, x):
    """Horner evaluation of the finite sum ``sum_n s_n x^n`` (no tail)."""
    xv = coerce(S.semantics, x)
    acc = zero(S.semantics)
    for c in reversed(S.coeffs):
        acc = acc * xv + c
    return acc


def sqrt_set(z) -> tuple:
    """Both complex square roots of ``z``, principal root first; ``(0,)`` for zero."""
    w = complex(z)
    if w == 0:
        return (0j,)
    y = cmath.sqrt(w)
    return (y, -y)


# serialization -------------------------------------------------------------

def _coeff_to_json(sem: Semantics, c):
    if sem is Semantics.RATIONAL:
        if isinstance(c, GaussianRational):
            return [str(c.re), str(c.im)]
        return str(c)
    if sem is Semantics.FLOAT:
        return float(c)
    if sem is Semantics.COMPLEX:
        return [c.real, c.imag]
    return [c.lo, c.hi]


def _coeff_from_json(sem: Semantics, raw):
    if sem is Semantics.RATIONAL:
        if isinstance(raw, list):
            g = GaussianRational(Fraction(raw[0]), Fraction(raw[1]))
            return g.re if g.im == 0 else g
        return Fraction(raw)
    if sem is Semantics.FLOAT:
        return float(raw)
    if sem is Semantics.COMPLEX:
        return complex(raw[0], raw[1])
    return Interval(float(raw[0]), float(raw[1]))


def series_to_json(S: TruncatedSeries) -> dict:
    return {
        "order": S.order,
        "semantics": S.semantics.value,
        "coeffs": [_coeff_to_json(S.semantics, c) for c in S.coeffs],
    }


def series_from_json(data: dict) -> TruncatedSeries:
    sem = _as_semantics(data["semantics"])
    coeffs = tuple(_coeff_from_json(sem, c) for c in data["coeffs"])
    return TruncatedSeries(int(data["order"]), sem, coeffs)
