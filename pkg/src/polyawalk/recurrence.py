"""Return and hitting probabilities of the simple random walk on Z^d.

For d <= 2 both limits equal one and we report exact finite-length
profiles together with the remaining gap.  For d >= 3 the limits are
``1 - 1/B(1)`` (return) and ``sqrt(1 - B0(1)/B(1))`` (hitting a point v),
where ``B(1) = sum_n b_n/(2d)^n`` is the expected number of visits to the
origin and ``B0`` counts closed walks avoiding v.  Both are enclosed by
an exact partial sum plus a rigorous tail bound.

Tail bound
----------
Write ``u(2m) = b_{2m}/(2d)^{2m}``.  Distribute the 2m steps over the d
axes (multinomial with equal cell probabilities).  A closed walk needs an
even number of steps on every axis, and an axis that receives ``2i``
steps closes with probability at most ``1/sqrt(pi*i)`` (a consequence of
Robbins' factorial bounds).  Fix ``0 < delta < 1/d``.  If every axis
count lies within ``2m*delta`` of its mean, the product of the axis
factors is at most ``(pi*m*(1/d - delta))**(-d/2)``; the probability that
all counts are even is at most ``2**(1-d) + (1 - 2**(1-d))*((d-2)/d)**(2m)``;
and Hoeffding's inequality bounds the chance of leaving the window by
``2d*exp(-4*m*delta**2)``.  Summing the resulting bound over ``m > M``
gives a closed-form tail, and ``delta`` is tuned per ``M`` numerically
before the bound is evaluated in interval arithmetic.
"""
from __future__ import annotations

import datetime as _dt
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .config import Limits
from .errors import InputError, InvariantViolation
from .lattice import (
    LatticePoint,
    _as_point,
    check_dimension,
    closed_walk_counts,
    endpoint_sequence,
    first_passage_counts,
    first_return_counts,
    walk_table,
)
from .series import Interval, pi_interval
from .series.interval import _down, _up

try:
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover
    _big = int


class _One:
    """The exact limit value one, reported for d <= 2."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ONE"

    def to_json(self) -> str:
        return "ONE"


ONE = _One()

_DP_ROUTE_MAX = 40  # above this length the avoid-v counts come from the identity route


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RecurrenceReport:
    d: int
    v: LatticePoint
    N: int
    profile: list
    limit: object
    tail_constant: float | None = None
    details: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def gap(self) -> Fraction:
        return 1 - self.profile[-1]

    def to_json(self, profile_stride: int = 1) -> dict:
        rows = [
            {"n": n, "value": str(q), "approx": float(q)}
            for n, q in enumerate(self.profile)
            if n % profile_stride == 0 or n == self.N
        ]
        limit = self.limit.to_json() if hasattr(self.limit, "to_json") else self.limit
        out = {
            "d": self.d,
            "v": list(self.v),
            "N": self.N,
            "profile": rows,
            "limit": limit,
            "tail_constant": self.tail_constant,
            "details": self.details,
            "metadata": self.metadata,
        }
        if isinstance(self.limit, Interval):
            out["limit_width"] = self.limit.width
        return out


# ---------------------------------------------------------------------------
# shared sequence cache

@functools.lru_cache(maxsize=16)
def _return_counts(d: int, N: int) -> tuple:
    return tuple(closed_walk_counts(d, N))


def _even_prefix_bounds(seq: Sequence[int], d: int, M: int) -> tuple[list[float], list[float]]:
    """Lower and upper float bounds of ``sum_{n<=2k} seq_n/(2d)^n`` for k = 0..M."""
    base2 = (2 * d) ** 2
    num, den = _big(0), _big(1)
    lo, hi = [], []
    for k in range(M + 1):
        if k:
            num *= base2
            den *= base2
            if 2 * k - 1 < len(seq) and seq[2 * k - 1]:
                raise InvariantViolation("tail bound applies to sequences supported on even lengths")
        num += seq[2 * k]
        q = int(num) / int(den)
        lo.append(_down(q))
        hi.append(_up(q))
    return lo, hi


# ---------------------------------------------------------------------------
# explicit tail bound

def _tail_float(d: int, M: np.ndarray, delta: np.ndarray) -> np.ndarray:
    s = d / 2
    core = (math.pi * (1 / d - delta)) ** (-s)
    mp1 = M + 1.0
    zeta = mp1 ** (-s) + mp1 ** (1 - s) / (s - 1)
    q2 = ((d - 2) / d) ** 2
    term1 = 2.0 ** (1 - d) * core * zeta
    term2 = (1 - 2.0 ** (1 - d)) * core * mp1 ** (-s) * q2 ** mp1 / (1 - q2)
    h = 4 * delta**2
    term3 = 2 * d * np.exp(-h * mp1) / (-np.expm1(-h))
    return term1 + term2 + term3


def _tail_interval(d: int, M: int, delta: float) -> Interval:
    """Rigorous enclosure of the bound on ``sum_{m>M} u(2m)`` for a given window half-width."""
    s = Fraction(d, 2)
    pi = pi_interval()
    width = Interval.point(Fraction(1, d)) - Interval.point(delta)
    core = (pi * width).power(-float(s))
    mp1 = Interval.point(M + 1)
    zeta = mp1.power(-float(s)) + mp1.power(float(1 - s)) / Interval.point(s - 1)
    two = Fraction(2) ** (1 - d)
    term1 = Interval.point(two) * core * zeta
    q2 = Fraction(d - 2, d) ** 2
    if q2:
        qpow = Interval.point(q2 ** (M + 1))
        term2 = Interval.point(1 - two) * core * mp1.power(-float(s)) * qpow / Interval.point(1 - q2)
    else:
        term2 = Interval(0.0, 0.0)
    h = Interval.point(4) * Interval.point(delta) * Interval.point(delta)
    term3 = Interval.point(2 * d) * (-(h * mp1)).exp() / (1 - (-h).exp())
    return term1 + term2 + term3


def _even_closing_probability(d: int, m: int) -> float:
    """Probability that every axis gets an even share of 2m uniformly allocated steps."""
    total = sum(math.comb(d, k) * ((d - 2 * k) / d) ** (2 * m) for k in range(d + 1))
    return total / 2**d


def term_bound(d: int, m: int, delta: float) -> float:
    """Per-length bound ``u(2m) <= g(m)`` used for the tail (float, for reporting and checks)."""
    core = (math.pi * m * (1 / d - delta)) ** (-d / 2)
    return _even_closing_probability(d, m) * core + 2 * d * math.exp(-4 * m * delta**2)


@dataclass(frozen=True)
class TailTable:
    """Rigorous tail bounds ``T(k)`` for k = 0..M with the window half-width used at each k."""

    d: int
    M: int
    upper: tuple
    delta: tuple

    @classmethod
    def build(cls, d: int, M: int) -> "TailTable":
        return _tail_table(d, M)

    def tail_constant(self, k: int) -> float:
        """Coefficient of m^(-d/2) in the bound at checkpoint k."""
        return 2.0 ** (1 - self.d) * (math.pi * (1 / self.d - self.delta[k])) ** (-self.d / 2)


@functools.lru_cache(maxsize=16)
def _tail_table(d: int, M: int) -> TailTable:
    grid = np.linspace(1e-3, 1 / d - 1e-3, 600)
    ks = np.arange(M + 1, dtype=float)
    values = _tail_float(d, ks[:, None], grid[None, :])
    best = grid[np.argmin(values, axis=1)]
    uppers = tuple(_tail_interval(d, k, float(best[k])).hi for k in range(M + 1))
    return TailTable(d, M, uppers, tuple(float(x) for x in best))


@dataclass(frozen=True)
class SumEnclosure:
    """``lower <= sum_n seq_n/(2d)^n <= upper`` from partial sums and the tail table."""

    lower: float
    upper: float
    best_checkpoint: int
    partial_sum: float

    @property
    def interval(self) -> Interval:
        return Interval(self.lower, self.upper)


def _enclose_even_sum(seq: Sequence[int], d: int, M: int, tails: TailTable) -> SumEnclosure:
    lo, hi = _even_prefix_bounds(seq, d, M)
    candidates = [Interval(hi[k], hi[k]) + Interval(tails.upper[k], tails.upper[k]) for k in range(M + 1)]
    uppers = [c.hi for c in candidates]
    best = int(np.argmin(uppers))
    return SumEnclosure(lo[M], uppers[best], best, (lo[M] + hi[M]) / 2)


# ---------------------------------------------------------------------------
# public operations

def zero_recurrence_profile(d: int, N: int, limits: Limits | None = None) -> RecurrenceReport:
    """Exact probabilities ``a_n/(2d)^n`` of returning to the origin within n steps, n <= N."""
    check_dimension(d, limits)
    if N < 0:
        raise InputError("N must be nonnegative")
    b = _return_counts(d, N)
    c = first_return_counts(b)
    base = 2 * d
    profile, running = [], Fraction(0)
    for n, cn in enumerate(c):
        running += Fraction(cn, base**n)
        profile.append(running)
    meta = {"version": __version__, "timestamp": _timestamp(), "route": "binomial-convolution + deconvolution"}
    origin = LatticePoint.origin(d)
    if d <= 2:
        gap = 1 - profile[-1]
        details = {"gap": str(gap), "gap_approx": float(gap)}
        return RecurrenceReport(d, origin, N, profile, ONE, None, details, meta)
    enc = polya_enclosure(d, N, limits)
    return RecurrenceReport(d, origin, N, profile, enc.interval, enc.tail_constant, enc.details(), meta)


@dataclass(frozen=True)
class PolyaEnclosure:
    d: int
    N: int
    interval: Interval
    visits: SumEnclosure
    tail_constant: float
    delta: float
    checked_terms: int

    def details(self) -> dict:
        return {
            "expected_visits_lower": self.visits.lower,
            "expected_visits_upper": self.visits.upper,
            "tail_checkpoint": 2 * self.visits.best_checkpoint,
            "window_halfwidth": self.delta,
            "tail_constant": self.tail_constant,
            "term_bound_checked_up_to": 2 * self.checked_terms,
            "width": self.interval.width,
        }


def _check_term_bound(d: int, b: Sequence[int], M: int, delta: float) -> int:
    base2 = (2 * d) ** 2
    for m in range(1, M + 1):
        exact = b[2 * m] / base2**m
        if exact > term_bound(d, m, delta) * (1 + 1e-12):
            raise InvariantViolation(f"tail term bound fails at length {2 * m}")
    return M


def polya_enclosure(d: int, N: int, limits: Limits | None = None) -> PolyaEnclosure:
    """Enclosure of the return probability ``1 - 1/B(1)`` with the data used to build it."""
    check_dimension(d, limits)
    if d <= 2:
        raise InputError("the return probability is 1 for d <= 2; use zero_recurrence_profile")
    if N < 0:
        raise InputError("N must be nonnegative")
    M = N // 2
    b = _return_counts(d, 2 * M)
    tails = _tail_table(d, M)
    visits = _enclose_even_sum(b, d, M, tails)
    B = visits.interval
    value = (Interval(1.0, 1.0) - Interval(1.0, 1.0) / B).clamp_lower(0.0)  # B(1) >= 1
    k = visits.best_checkpoint
    checked = _check_term_bound(d, b, M, tails.delta[k])
    return PolyaEnclosure(d, N, value, visits, tails.tail_constant(k), tails.delta[k], checked)


def polya_constant(d: int, N: int, limits: Limits | None = None) -> Interval:
    """Interval containing ``1 - 1/B(1)``; enclosures are nested in N."""
    return polya_enclosure(d, N, limits).interval


def _int_convolve(f: Sequence[int], g: Sequence[int]) -> list[int]:
    n_max = min(len(f), len(g)) - 1
    F = np.array([_big(x) for x in f[: n_max + 1]], dtype=object)
    G = np.array([_big(x) for x in g[: n_max + 1]], dtype=object)
    f_support = np.array([k for k in range(n_max + 1) if f[k]], dtype=np.int64)
    g_nonzero = np.array([bool(x) for x in g[: n_max + 1]])
    out = []
    for n in range(n_max + 1):
        ks = f_support[f_support <= n]
        ks = ks[g_nonzero[n - ks]]
        out.append(int((F[ks] * G[n - ks]).sum()) if len(ks) else 0)
    return out


def avoiding_return_counts(
    d: int, v: Sequence[int], N: int, limits: Limits | None = None, endpoint: Sequence[int] | None = None
) -> tuple[list[int], list[int], str]:
    """Closed walks avoiding ``v`` and first arrivals at ``v`` for lengths up to N.

    Short lengths use the lattice dynamic program.  Longer ones use
    first arrivals from deconvolution and the identity
    ``b' = b - (c' * c') * b`` (convolutions of counts), which follows from
    splitting a closed walk through v at its first and last visit.
    """
    target = _as_point(v, d)
    if N <= _DP_ROUTE_MAX:
        t = walk_table(d, target, N, limits)
        return list(t.b_prime), list(t.c_prime), "dynamic-program"
    b = _return_counts(d, N)
    if endpoint is None:
        endpoint = endpoint_sequence(d, target, N, limits)
    c_prime = first_passage_counts(endpoint, b)
    through = _int_convolve(_int_convolve(c_prime, c_prime), b)
    b_prime = [x - y for x, y in zip(b, through)]
    if any(x < 0 for x in b_prime):
        raise InvariantViolation("negative count of closed walks avoiding v")
    return b_prime, c_prime, "deconvolution + identity"


@dataclass(frozen=True)
class HittingEnclosure:
    d: int
    v: LatticePoint
    N: int
    interval: Interval
    visits: SumEnclosure
    avoiding_visits: SumEnclosure
    through_visits: SumEnclosure
    first_arrival_partial: float
    point_estimate: float
    route: str

    def details(self) -> dict:
        return {
            "route": self.route,
            "B_lower": self.visits.lower,
            "B_upper": self.visits.upper,
            "B0_lower": self.avoiding_visits.lower,
            "B0_upper": self.avoiding_visits.upper,
            "first_arrival_partial_sum": self.first_arrival_partial,
            "point_estimate": self.point_estimate,
            "width": self.interval.width,
        }


def _tail_estimate(seq: Sequence[int], d: int, M: int) -> float:
    """Heuristic tail ``sum_{m>M}`` assuming terms decay like K m^(-d/2) from the last even term on."""
    if M < 1:
        return 0.0
    last = seq[2 * M] / (2 * d) ** (2 * M)
    K = last * M ** (d / 2)
    s = d / 2
    # midpoint-rule approximation of sum_{m>M} m^-s
    return K * ((M + 0.5) ** (1 - s)) / (s - 1)


def _visits_estimate(b: Sequence[int], d: int, M: int) -> float:
    """Expected visits to the origin: exact partial sum plus the modelled tail."""
    q = sum(b[2 * k] / (2 * d) ** (2 * k) for k in range(M + 1))
    return q + _tail_estimate(b, d, M)


def _potential_kernel_estimate(d: int, b: Sequence[int], e_v: Sequence[int], n_even: int) -> float:
    """Point estimate of the hitting probability, not an enclosure.

    The hitting probability is ``G(v)/G(0)`` with ``G`` the expected
    number of visits.  ``G(0) - G(v) = sum_n (u_n - p_n(v))`` converges much
    faster than either sum, so truncating it at ``n_even`` and using the
    modelled tail for ``G(0)`` alone gives an accurate estimate.
    """
    base = 2 * d
    kernel = sum((bb - ee) / base**n for n, (bb, ee) in enumerate(zip(b, e_v)))
    return 1.0 - kernel / _visits_estimate(b, d, n_even // 2)


def hitting_enclosure(d: int, v: Sequence[int], N: int, limits: Limits | None = None) -> HittingEnclosure:
    check_dimension(d, limits)
    target = _as_point(v, d)
    if d <= 2:
        raise InputError("the hitting probability is 1 for d <= 2")
    if target.is_origin():
        raise InputError("v must differ from the origin; the return probability has its own formula")
    M = N // 2
    n_even = 2 * M
    b = _return_counts(d, n_even)
    e_v = endpoint_sequence(d, target, n_even, limits)
    b_prime, c_prime, route = avoiding_return_counts(d, target, n_even, limits, e_v)
    if any(bp > bb for bp, bb in zip(b_prime, b)):
        raise InvariantViolation("closed walks avoiding v outnumber closed walks")
    through = [bb - bp for bb, bp in zip(b, b_prime)]
    tails = _tail_table(d, M)
    B = _enclose_even_sum(b, d, M, tails)
    B0 = _enclose_even_sum(b_prime, d, M, tails)
    D = _enclose_even_sum(through, d, M, tails)
    if not (B0.lower > 0 and B0.lower < B.upper):
        raise InvariantViolation("expected 0 < B0(1) < B(1)")
    one = Interval(1.0, 1.0)
    from_ratio = one - B0.interval / B.interval
    from_difference = D.interval / B.interval
    try:
        square = from_ratio.intersect(from_difference)
    except ValueError as exc:
        raise InvariantViolation("the two enclosures of 1 - B0/B are disjoint") from exc
    square = square.clamp_lower(0.0)
    root = square.sqrt()
    root = Interval(root.lo, min(root.hi, 1.0))
    base = 2 * d
    arrival = 0.0
    for n, x in enumerate(c_prime):
        arrival += x / base**n
    if arrival > root.hi + 1e-12:
        raise InvariantViolation("partial first-arrival sum exceeds the upper enclosure")
    estimate = _potential_kernel_estimate(d, b, e_v, n_even)
    return HittingEnclosure(d, target, N, root, B, B0, D, arrival, estimate, route)


def v_recurrence_limit(d: int, v: Sequence[int], N: int, limits: Limits | None = None) -> Interval:
    """Interval containing ``sqrt(1 - B0(1)/B(1))``, the probability of ever visiting v."""
    return hitting_enclosure(d, v, N, limits).interval


def gamma_half_integer(x: Fraction) -> Interval:
    """Gamma at a positive integer or half-integer, from Gamma(1)=1, Gamma(1/2)=sqrt(pi) and x*Gamma(x)."""
    x = Fraction(x)
    if x <= 0 or (2 * x).denominator != 1:
        raise InputError(f"only positive integers and half-integers are supported, got {x}")
    if x.denominator == 1:
        return Interval.point(math.factorial(int(x) - 1))
    value = pi_interval().sqrt()
    k = Fraction(1, 2)
    while k < x:
        value = value * Interval.point(k)
        k += 1
    return value


def green_asymptotic(d: int, v: Sequence[int]) -> Interval:
    """``(d/2) Gamma(d/2 - 1) pi^(-d/2) / |v|_2^(d-2)`` with Euclidean |v|."""
    if d < 3:
        raise InputError("the formula needs d >= 3")
    point = _as_point(v, d)
    if point.is_origin():
        raise InputError("v must be nonzero")
    pi = pi_interval()
    half = Fraction(d, 2)
    pi_power = pi.sqrt() ** d  # pi^(d/2)
    norm_sq = Interval.point(point.l2_squared)
    norm_power = norm_sq.sqrt() ** (d - 2)
    return Interval.point(half) * gamma_half_integer(half - 1) / pi_power / norm_power


def asymptotic_compare(d: int, targets: Sequence[Sequence[int]], N: int = 1000, limits: Limits | None = None) -> list[dict]:
    """Hitting-probability enclosures against the Green-function asymptotic, one row per target.

    ``ratio`` divides the enclosure midpoint by the formula.  Because the
    formula describes the expected number of visits to v, and the hitting
    probability equals that divided by ``B(1)``, ratios approach
    ``1/B(1)`` rather than 1; ``ratio_times_B`` rescales accordingly.
    """
    check_dimension(d, limits)
    if d <= 2:
        raise InputError("the asymptotic comparison needs d >= 3")
    rows = []
    for v in targets:
        enc = hitting_enclosure(d, v, N, limits)
        formula = green_asymptotic(d, v)
        B_mid = (enc.visits.lower + enc.visits.upper) / 2
        est_B = _visits_estimate(_return_counts(d, 2 * (N // 2)), d, N // 2)
        rows.append(
            {
                "v": list(enc.v),
                "norm2": enc.v.l2,
                "limit_lo": enc.interval.lo,
                "limit_hi": enc.interval.hi,
                "limit_mid": enc.interval.mid,
                "estimate": enc.point_estimate,
                "formula": formula.mid,
                "ratio": enc.interval.mid / formula.mid,
                "ratio_estimate": enc.point_estimate / formula.mid,
                "ratio_times_B": enc.point_estimate * est_B / formula.mid,
                "B_mid": B_mid,
            }
        )
    return rows


def origin_formula_gap(d: int, N: int, limits: Limits | None = None) -> dict:
    """Compare ``sqrt(1 - C(1)/B(1))`` with ``1 - 1/B(1)``: plugging v = 0 into the hitting formula overshoots."""
    enc = polya_enclosure(d, N, limits)
    B = enc.visits.interval
    y = Interval(1.0, 1.0) / B
    lhs = (Interval(1.0, 1.0) - y + y * y).sqrt()
    rhs = Interval(1.0, 1.0) - y
    return {
        "hitting_formula_at_origin": lhs.to_json(),
        "return_probability": rhs.to_json(),
        "separated": lhs.lo > rhs.hi,
    }
