"""Explicit bounds for the planar walk's non-return probability.

In two dimensions the probability of not having returned to the origin
within N steps decays only logarithmically.  This module evaluates the
explicit upper and lower bounds for that gap, the Stirling-type factorial
bracket the bounds rest on, and the exact gap itself (rational arithmetic
up to a few thousand steps, floating point with residual bookkeeping
beyond).  All logarithms are natural.

The return series has a closed form in the squared variable:
``u_{2m} = (C(2m, m) / 4^m)^2``, so only the reciprocal is expensive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .config import Limits, resolve
from .errors import InputError
from .lattice import first_return_counts
from .series import Interval, TruncatedSeries, e_interval, multiply, pi_interval, reciprocal
from .series.interval import _down, _up

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int

UPPER_VALID_FROM = 3
LOWER_VALID_FROM = 140_000
U2N_LOWER = Fraction(228, 1000)
U2N_UPPER = Fraction(346, 1000)


def _log(n: int) -> Interval:
    return Interval.point(n).log()


def _rational_power(n: int, p: Fraction) -> Interval:
    """``n ** p`` for an integer n >= 1, bracketing the inexact float exponent as well."""
    lo_exp, hi_exp = _down(float(p)), _up(float(p))
    base = Interval.point(n)
    return Interval(base.power(lo_exp).lo, base.power(hi_exp).hi)


def robbins_factorial_bounds(n: int) -> tuple[float, float]:
    """Outward-rounded ``lo <= n! <= hi`` from Robbins' refinement of Stirling's formula."""
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    base = (Interval.point(2 * n) * pi_interval()).sqrt() * (Interval.point(n) / e_interval()) ** n
    lo = base * (Interval.point(1) / Interval.point(12 * n + 1)).exp()
    hi = base * (Interval.point(1) / Interval.point(12 * n)).exp()
    return lo.lo, hi.hi


@dataclass
class U2nReport:
    ok: bool
    checked: int
    first_violation: int | None
    min_scaled: float
    max_scaled: float

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked": self.checked,
            "first_violation": self.first_violation,
            "min_n_times_u2n": self.min_scaled,
            "max_n_times_u2n": self.max_scaled,
        }


def u2n_bounds_check(M: int) -> U2nReport:
    """Check ``0.228/n <= u_{2n} <= 0.346/n`` for n = 1..M.

    ``u_{2n} = (C(2n, n)/4^n)^2`` comes from the recurrence
    ``u_{2n} = u_{2n-2} ((2n-1)/(2n))^2`` run as a float cumulative
    product.  Each step commits at most four roundings, so the relative
    error of ``n u_{2n}`` is below ``(4n + 1)`` units of eps; a bound counts
    as verified only if it survives that widening.
    """
    if M < 1:
        raise InputError("M must be at least 1")
    n = np.arange(1, M + 1, dtype=float)
    scaled = n * np.cumprod(((2 * n - 1) / (2 * n)) ** 2)
    rel = (4 * n + 1) * np.finfo(float).eps * 1.01
    lo, hi = scaled * (1 - rel), scaled * (1 + rel)
    low, high = Interval.point(U2N_LOWER).hi, Interval.point(U2N_UPPER).lo
    bad = np.flatnonzero((lo < low) | (hi > high))
    first = int(bad[0]) + 1 if len(bad) else None
    stop = first or M
    return U2nReport(first is None, stop, first, float(lo[:stop].min()), float(hi[:stop].max()))


def upper_gap_bound(N: int) -> float:
    """``(0.2 log N - 0.16)^-1 + N^(8/9) exp(-N^(1/9))``, rounded up.

    The second term peaks near ``N = 8^9`` and the value exceeds one until
    N is around ``10^13``, so at desk scale the bound is valid but vacuous.
    """
    if N < UPPER_VALID_FROM:
        raise InputError(f"the upper gap bound needs N >= {UPPER_VALID_FROM}, got {N}")
    main = Interval.point(Fraction(1, 5)) * _log(N) - Interval.point(Fraction(4, 25))
    correction = _rational_power(N, Fraction(8, 9)) * (-_rational_power(N, Fraction(1, 9))).exp()
    return (Interval(1.0, 1.0) / main + correction).hi


def lower_gap_bound(N: int) -> float:
    """``(0.84 log N)^-1 - 3/N``, rounded down; valid from N = 140000."""
    if N < LOWER_VALID_FROM:
        raise InputError(f"the lower gap bound needs N >= {LOWER_VALID_FROM}, got {N}")
    value = Interval(1.0, 1.0) / (Interval.point(Fraction(84, 100)) * _log(N)) - Interval.point(Fraction(3, N))
    return value.lo


def corollary_bounds(N: int) -> tuple[float, float] | None:
    """``((0.9 log N)^-1, (0.1 log N)^-1)`` rounded outward, or None when log N = 0."""
    if N < 2:
        return None
    log_n = _log(N)
    lo = Interval(1.0, 1.0) / (Interval.point(Fraction(9, 10)) * log_n)
    hi = Interval(1.0, 1.0) / (Interval.point(Fraction(1, 10)) * log_n)
    return lo.lo, hi.hi


# ---------------------------------------------------------------------------
# exact and float gaps

def planar_return_counts(N: int) -> list[int]:
    """Closed walks of length n on Z^2: ``C(2m, m)^2`` at n = 2m, zero at odd n."""
    out = [0] * (N + 1)
    c = 1
    for m in range(N // 2 + 1):
        if m:
            c = c * (2 * m) * (2 * m - 1) // (m * m)
        out[2 * m] = c * c
    return out


def exact_gaps(N: int) -> list[Fraction]:
    """``1 - a_n/4^n`` for n = 0..N from first returns of the closed form."""
    c = first_return_counts(planar_return_counts(N))
    gaps, acc, scale = [], _big(0), _big(1)
    for n in range(N + 1):
        if n:
            acc *= 4
            scale *= 4
        acc += c[n]
        gaps.append(Fraction(int(scale - acc), int(scale)))
    return gaps


@dataclass
class FloatGaps:
    """Gap prefix in floats with an uncertified error estimate.

    ``error_estimate`` is ``2 * ||B R - 1||_1`` plus summation rounding:
    the true reciprocal has l1 norm at most two (its tail coefficients are
    minus the first-return probabilities).
    """

    gaps: np.ndarray
    residual_l1: float
    error_estimate: float


def float_gaps(N: int) -> FloatGaps:
    M = N // 2
    m = np.arange(1, M + 1, dtype=float)
    u = np.concatenate([[1.0], np.cumprod(((2 * m - 1) / (2 * m)) ** 2)])
    B = TruncatedSeries.from_coeffs(u, "float")
    R = reciprocal(B, "newton")
    r = np.array(R.coeffs)
    check = np.array(multiply(B, R).coeffs)
    check[0] -= 1.0
    residual = float(np.abs(check).sum())
    # gap after 2k and 2k+1 steps is the prefix sum of 1/B in the squared variable
    prefix = np.cumsum(r)
    gaps = np.repeat(prefix, 2)[: N + 1]
    rounding = float(np.abs(r).sum()) * M * float(np.finfo(float).eps)
    return FloatGaps(gaps, residual, 2 * residual + rounding)


@dataclass
class GapBoundRecord:
    N: int
    exact_gap: Fraction | float | None
    upper: float | None
    lower: float | None
    corollary_lo: float | None
    corollary_hi: float | None
    mode: str
    status: str = "ok"
    error_estimate: float | None = None
    checks: dict = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        return self.status == "ok" and all(self.checks.values())

    def gap_float(self) -> float | None:
        return None if self.exact_gap is None else float(self.exact_gap)

    def to_json(self) -> dict:
        gap = self.exact_gap
        return {
            "N": self.N,
            "mode": self.mode,
            "status": self.status,
            "exact_gap": str(gap) if isinstance(gap, Fraction) else gap,
            "gap_approx": self.gap_float(),
            "upper": self.upper,
            "lower": self.lower,
            "cor_lo": self.corollary_lo,
            "cor_hi": self.corollary_hi,
            "error_estimate": self.error_estimate,
            "checks": self.checks,
            "all_ok": self.all_ok,
        }

    def csv_row(self) -> str:
        cells = [self.N, self.gap_float(), self.upper, self.lower, self.corollary_lo, self.corollary_hi, self.all_ok]
        return ",".join("" if x is None else repr(x) if isinstance(x, float) else str(x) for x in cells)


CSV_HEADER = "N,exact_gap,upper,lower,cor_lo,cor_hi,all_ok"


def _leq(a, b, slack: float = 0.0) -> bool:
    """``a <= b`` with exact comparison for rationals and a slack for float gaps."""
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return Fraction(a) <= Fraction(b)
    return bool(a - slack <= b)


def _record(N: int, gap, mode: str, err: float | None) -> GapBoundRecord:
    upper = upper_gap_bound(N) if N >= UPPER_VALID_FROM else None
    lower = lower_gap_bound(N) if N >= LOWER_VALID_FROM else None
    cor = corollary_bounds(N)
    slack = err or 0.0
    checks = {}
    if upper is not None:
        checks["gap_le_upper"] = _leq(gap, upper, slack)
    if lower is not None:
        checks["lower_le_gap"] = _leq(lower, gap, slack)
    if cor is not None:
        checks["cor_lo_le_gap"] = _leq(cor[0], gap, slack)
        checks["gap_le_cor_hi"] = _leq(gap, cor[1], slack)
    return GapBoundRecord(
        N, gap, upper, lower, cor and cor[0], cor and cor[1], mode, "ok", err, checks
    )


def verify_gap(N_list: Iterable[int], mode: str = "exact", limits: Limits | None = None) -> list[GapBoundRecord]:
    """Exact gaps against the explicit bounds, one record per requested N.

    The first-return series is computed once for the largest admissible N
    and read off for the rest.  Requests beyond the mode's cap come back
    with ``status`` explaining why instead of raising.
    """
    lim = resolve(limits)
    Ns = [int(n) for n in N_list]
    if any(n < 0 for n in Ns):
        raise InputError("lengths must be nonnegative")
    if mode == "exact":
        cap = lim.exact_gap_max
    elif mode == "float":
        cap = lim.float_gap_max
    else:
        raise InputError(f"mode must be 'exact' or 'float', got {mode!r}")
    admissible = [n for n in Ns if n <= cap]
    top = max(admissible, default=0)
    if mode == "exact":
        table, err = exact_gaps(top), None
    else:
        fg = float_gaps(top)
        table, err = [float(x) for x in fg.gaps], fg.error_estimate
    records = []
    for n in Ns:
        if n > cap:
            records.append(
                GapBoundRecord(n, None, None, None, None, None, mode, f"partial: N exceeds the {mode} cap {cap}")
            )
        else:
            records.append(_record(n, table[n], mode, err))
    return records


def empirical_threshold(records: Sequence[GapBoundRecord]) -> dict:
    """Smallest N among the records from which both corollary inequalities hold for every later record.

    This is an observation over the sampled range, not a proof of the
    effective threshold.
    """
    rows = sorted((r for r in records if r.status == "ok" and r.corollary_lo is not None), key=lambda r: r.N)
    holds = [r.checks["cor_lo_le_gap"] and r.checks["gap_le_cor_hi"] for r in rows]
    first = next((r.N for r, h in zip(rows, holds) if h), None)
    from_n = None
    for r, h in zip(reversed(rows), reversed(holds)):
        if not h:
            break
        from_n = r.N
    return {
        "sampled": len(rows),
        "range": [rows[0].N, rows[-1].N] if rows else None,
        "first_holding": first,
        "holds_from": from_n,
    }
