"""Exact walk counts on the nearest-neighbour lattice Z^d.

Everything here is integer arithmetic.  The workhorse is a dynamic
program over a cube of lattice points held in a numpy object array (so
entries are Python big integers).  The cube only needs to cover the
"light cone" of the counts we read off: a walk that leaves the cube of
radius ``R = (N + |v|_1)//2 + 1`` can no longer return to the origin or
reach ``v`` within ``N`` steps, so dropping it changes nothing we report.

Besides the dynamic program the module offers

* an exhaustive enumerator used as the small-n oracle,
* binomial-convolution routes that build d-dimensional return and
  endpoint counts from one-dimensional ones (cheap for long walks),
* integer deconvolution for first-return and first-passage counts.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import Limits, resolve
from .errors import InputError, InvariantViolation, ResourceLimitError
from .series import TruncatedSeries, solve_first_return

try:  # GMP integers make the long convolutions several times faster
    from gmpy2 import mpz as _big
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _big = int


class LatticePoint(tuple):
    """A point of Z^d stored as a tuple of ints."""

    def __new__(cls, coords: Iterable[int]):
        coords = tuple(int(c) for c in coords)
        if not coords:
            raise InputError("a lattice point needs at least one coordinate")
        return super().__new__(cls, coords)

    @classmethod
    def parse(cls, text: str, d: int | None = None) -> "LatticePoint":
        """Parse ``"1,0,0"``; a bare ``"0"`` expands to the origin of dimension ``d``."""
        parts = [p for p in text.replace(" ", "").split(",") if p != ""]
        try:
            coords = [int(p) for p in parts]
        except ValueError:
            raise InputError(f"bad lattice point {text!r}") from None
        if d is not None and len(coords) == 1 and coords[0] == 0 and d > 1:
            coords = [0] * d
        point = cls(coords)
        if d is not None and point.dim != d:
            raise InputError(f"point {text!r} has dimension {point.dim}, expected {d}")
        return point

    @classmethod
    def origin(cls, d: int) -> "LatticePoint":
        return cls([0] * d)

    @classmethod
    def axis(cls, d: int, i: int = 0, length: int = 1) -> "LatticePoint":
        coords = [0] * d
        coords[i] = length
        return cls(coords)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def l1(self) -> int:
        return sum(abs(c) for c in self)

    @property
    def l2(self) -> float:
        return math.sqrt(sum(c * c for c in self))

    @property
    def l2_squared(self) -> int:
        return sum(c * c for c in self)

    def is_origin(self) -> bool:
        return all(c == 0 for c in self)

    def __repr__(self) -> str:
        return f"LatticePoint({tuple(self)})"

    def __str__(self) -> str:
        return ",".join(str(c) for c in self)


def _as_point(p, d: int) -> LatticePoint:
    point = p if isinstance(p, LatticePoint) else LatticePoint(p)
    if point.dim != d:
        raise InputError(f"point {tuple(point)} does not live in dimension {d}")
    return point


def check_dimension(d: int, limits: Limits | None = None) -> None:
    lim = resolve(limits)
    if not isinstance(d, int) or d < 1:
        raise InputError(f"dimension must be a positive integer, got {d!r}")
    if d > lim.max_dim:
        raise ResourceLimitError(f"dimension {d} exceeds the cap {lim.max_dim}")


def _check_length(N: int) -> None:
    if not isinstance(N, int) or N < 0:
        raise InputError(f"walk length must be a nonnegative integer, got {N!r}")


def dp_memory_estimate(d: int, radius: int, N: int) -> int:
    """Rough byte count of the double-buffered object array for a DP run."""
    cells = (2 * radius + 1) ** d
    bits = max(1, N) * math.log2(2 * d) + 1
    per_cell = 8 + 28 + bits / 8  # pointer + int header + digits
    return int(2 * cells * per_cell)


class _CubeWalker:
    """Walk counts on the cube ``[-R, R]^d``; mass stepping outside is tallied, not tracked."""

    def __init__(self, d: int, radius: int, N: int, limits: Limits | None):
        need = dp_memory_estimate(d, radius, N)
        budget = resolve(limits).memory_budget
        if need > budget:
            raise ResourceLimitError(
                f"lattice DP needs about {need / 2**20:.0f} MiB, budget is {budget / 2**20:.0f} MiB"
            )
        self.d, self.radius = d, radius
        shape = (2 * radius + 1,) * d
        self.cur = np.zeros(shape, dtype=object)
        self.nxt = np.zeros(shape, dtype=object)
        self.cur[self.index(LatticePoint.origin(d))] = 1
        self.escaped = 0

    def index(self, p: Sequence[int]) -> tuple:
        return tuple(c + self.radius for c in p)

    def inside(self, p: Sequence[int]) -> bool:
        return all(abs(c) <= self.radius for c in p)

    def step(self) -> None:
        before = int(self.cur.sum())
        new = self.nxt
        new[...] = 0
        cur = self.cur
        for axis in range(self.d):
            hi = [slice(None)] * self.d
            lo = [slice(None)] * self.d
            hi[axis], lo[axis] = slice(1, None), slice(None, -1)
            new[tuple(hi)] += cur[tuple(lo)]
            new[tuple(lo)] += cur[tuple(hi)]
        self.nxt, self.cur = cur, new
        outflow = 2 * self.d * before - int(new.sum())
        self.escaped = 2 * self.d * self.escaped + outflow

    def get(self, p: Sequence[int]) -> int:
        return int(self.cur[self.index(p)]) if self.inside(p) else 0

    def clear(self, p: Sequence[int]) -> None:
        if self.inside(p):
            self.cur[self.index(p)] = 0

    def total(self) -> int:
        """All walks of the current length that were not cleared, inside or not."""
        return int(self.cur.sum()) + self.escaped


# ---------------------------------------------------------------------------
# dynamic programs

def endpoint_counts(d: int, N: int, limits: Limits | None = None) -> dict[LatticePoint, tuple[int, ...]]:
    """For every point p with |p|_1 <= N, the number of walks of each length n <= N from 0 ending at p."""
    return avoid_counts(d, (), N, limits)


def avoid_counts(
    d: int, forbidden: Iterable[Sequence[int]], N: int, limits: Limits | None = None
) -> dict[LatticePoint, tuple[int, ...]]:
    """Like :func:`endpoint_counts`, but walks may never step onto a forbidden point.

    The start is not re-checked: a forbidden origin only bars later visits.
    """
    check_dimension(d, limits)
    _check_length(N)
    banned = [_as_point(p, d) for p in forbidden]
    walker = _CubeWalker(d, N, N, limits)
    ball = [
        LatticePoint(p)
        for p in itertools.product(range(-N, N + 1), repeat=d)
        if sum(abs(c) for c in p) <= N
    ]
    history = {p: [0] * (N + 1) for p in ball}
    history[LatticePoint.origin(d)][0] = 1
    for n in range(1, N + 1):
        walker.step()
        for p in banned:
            walker.clear(p)
        for p in ball:
            history[p][n] = walker.get(p)
    return {p: tuple(seq) for p, seq in history.items()}


@dataclass(frozen=True)
class WalkCountTable:
    """Exact counting sequences for walks of length 0..N on Z^d.

    ``a``: walks revisiting the origin; ``b``: walks ending at the origin;
    ``c``: first returns; ``d_seq``: all walks.  With a target ``v != 0``
    also ``a_prime`` (walks that visit v), ``b_prime`` (closed walks
    avoiding v), ``c_prime`` (first arrivals at v) and ``c_dprime``
    (first arrivals at v whose interior also avoids the origin).
    """

    d: int
    v: LatticePoint
    N: int
    a: tuple
    b: tuple
    c: tuple
    d_seq: tuple
    a_prime: tuple | None = None
    b_prime: tuple | None = None
    c_prime: tuple | None = None
    c_dprime: tuple | None = None
    checks: dict = field(default_factory=dict, compare=False)

    @property
    def has_target(self) -> bool:
        return self.a_prime is not None

    def sequences(self) -> dict[str, tuple]:
        out = {"a": self.a, "b": self.b, "c": self.c, "d": self.d_seq}
        if self.has_target:
            out.update(a_prime=self.a_prime, b_prime=self.b_prime, c_prime=self.c_prime, c_dprime=self.c_dprime)
        return out

    def normalized(self, name: str) -> TruncatedSeries:
        """Sequence ``name`` divided termwise by (2d)^n, as an exact rational series."""
        seq = self.sequences()[name]
        base = 2 * self.d
        return TruncatedSeries.from_coeffs([Fraction(x, base**n) for n, x in enumerate(seq)], "rational")

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "v": list(self.v),
            "N": self.N,
            "sequences": {k: [str(x) for x in seq] for k, seq in self.sequences().items()},
            "checks": dict(self.checks),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a", "b", "c", "d", "a_prime", "b_prime", "c_prime", "c_dprime"])
        for n in range(self.N + 1):
            row = [n, self.a[n], self.b[n], self.c[n], self.d_seq[n]]
            if self.has_target:
                row += [self.a_prime[n], self.b_prime[n], self.c_prime[n], self.c_dprime[n]]
            else:
                row += ["", "", "", ""]
            w.writerow(row)
        return buf.getvalue()


def first_return_counts(b: Sequence[int]) -> list[int]:
    """Invert ``b_n = sum_{j=1}^n c_j b_{n-j}`` for the first-return counts ``c``."""
    return first_passage_counts(b, b, skip_zero=True)


def first_passage_counts(e: Sequence[int], b: Sequence[int], skip_zero: bool = False) -> list[int]:
    """Solve ``e_n = sum_j f_j b_{n-j}`` for ``f`` given ``b_0 = 1``.

    With ``e = b`` and ``skip_zero`` this yields first returns (``f_0 = 0``).
    """
    if b[0] != 1:
        raise InputError("deconvolution needs b_0 = 1")
    n_max = min(len(e), len(b)) - 1
    bb = [_big(x) for x in b[: n_max + 1]]
    nz = [k for k in range(1, n_max + 1) if bb[k]]
    f = [_big(0)] * (n_max + 1)
    for n in range(n_max + 1):
        if skip_zero and n == 0:
            continue
        acc = _big(e[n])
        for k in nz:
            if k > n:
                break
            fj = f[n - k]
            if fj:
                acc -= fj * bb[k]
        f[n] = acc
    return [int(x) for x in f]


def _convolve_with_powers(c: Sequence[int], base: int) -> list[int]:
    """``sum_j c_j base^(n-j)``: walks whose first event happens at step j, then continue freely."""
    out, acc = [], 0
    for x in c:
        acc = acc * base + x
        out.append(acc)
    return out


def walk_table(d: int, v: Sequence[int] | None = None, N: int = 10, limits: Limits | None = None) -> WalkCountTable:
    """All counting sequences for dimension ``d`` and target ``v`` up to length ``N``.

    Return counts come from the dynamic program; first returns from the
    rational series ``1 - 1/B`` with denominators cleared afterwards; first
    arrivals at ``v`` by deconvolving endpoint counts against return counts.
    Each of those is compared with a direct dynamic program that removes
    the relevant point after every step, and any disagreement raises
    :class:`InvariantViolation`.
    """
    check_dimension(d, limits)
    _check_length(N)
    target = LatticePoint.origin(d) if v is None else _as_point(v, d)
    origin = LatticePoint.origin(d)
    radius = (N + target.l1) // 2 + 1
    base = 2 * d
    d_seq = tuple(base**n for n in range(N + 1))

    plain = _CubeWalker(d, radius, N, limits)
    b, e_v = [1], [1 if target.is_origin() else 0]
    for _ in range(N):
        plain.step()
        b.append(plain.get(origin))
        e_v.append(plain.get(target))
    del plain

    # first returns through the rational series, then back to integers
    B = TruncatedSeries.from_coeffs([Fraction(x, base**n) for n, x in enumerate(b)], "rational")
    C = solve_first_return(B)
    c = []
    for n, q in enumerate(C.coeffs):
        scaled = q * base**n
        if scaled.denominator != 1:
            raise InvariantViolation(f"first-return count at n={n} is not an integer: {scaled}")
        c.append(int(scaled))
    checks = {}

    # direct count of first returns: clear the origin after every step
    direct = _CubeWalker(d, radius, N, limits)
    c_direct = [0]
    for _ in range(N):
        direct.step()
        c_direct.append(direct.get(origin))
        direct.clear(origin)
    del direct
    if c_direct != c:
        raise InvariantViolation("first-return counts disagree between series inversion and direct DP")
    checks["c_series_vs_direct_dp"] = True

    a = _convolve_with_powers(c, base)
    if target.is_origin():
        return WalkCountTable(d, target, N, tuple(a), tuple(b), tuple(c), d_seq, checks=checks)

    c_prime = first_passage_counts(e_v, b)

    avoid = _CubeWalker(d, radius, N, limits)
    b_prime, c_prime_direct, avoiding_total = [1], [0], [1]
    for _ in range(N):
        avoid.step()
        c_prime_direct.append(avoid.get(target))
        avoid.clear(target)
        b_prime.append(avoid.get(origin))
        avoiding_total.append(avoid.total())
    del avoid
    if c_prime != c_prime_direct:
        raise InvariantViolation("first-arrival counts disagree between deconvolution and direct DP")
    a_prime = [dn - t for dn, t in zip(d_seq, avoiding_total)]
    if a_prime != _convolve_with_powers(c_prime, base):
        raise InvariantViolation("walks visiting v disagree with the first-arrival decomposition")
    checks["c_prime_deconvolution_vs_direct_dp"] = True
    checks["a_prime_vs_first_arrival_sum"] = True

    inner = _CubeWalker(d, radius, N, limits)
    c_dprime = [0]
    for _ in range(N):
        inner.step()
        c_dprime.append(inner.get(target))
        inner.clear(target)
        inner.clear(origin)
    del inner

    return WalkCountTable(
        d, target, N, tuple(a), tuple(b), tuple(c), d_seq,
        tuple(a_prime), tuple(b_prime), tuple(c_prime), tuple(c_dprime), checks,
    )


# ---------------------------------------------------------------------------
# convolution routes for long walks

def binomial_convolve(f: Sequence[int], g: Sequence[int]) -> list[int]:
    """``h_n = sum_k C(n, k) f_k g_{n-k}``.

    If ``f`` counts walks on one set of axes and ``g`` on a disjoint set,
    ``h`` counts walks on the union: choose which k of the n steps go to
    the first group.
    """
    n_max = min(len(f), len(g)) - 1
    F = np.array([_big(x) for x in f[: n_max + 1]], dtype=object)
    G = np.array([_big(x) for x in g[: n_max + 1]], dtype=object)
    f_support = np.array([k for k in range(n_max + 1) if f[k]], dtype=np.int64)
    g_nonzero = np.array([bool(x) for x in g[: n_max + 1]])
    row = np.array([_big(1)], dtype=object)  # Pascal row n, built additively
    out = []
    for n in range(n_max + 1):
        if n:
            nxt = np.empty(n + 1, dtype=object)
            nxt[0] = nxt[n] = _big(1)
            nxt[1:n] = row[:-1] + row[1:]
            row = nxt
        ks = f_support[f_support <= n]
        ks = ks[g_nonzero[n - ks]]
        out.append(int((row[ks] * F[ks] * G[n - ks]).sum()) if len(ks) else 0)
    return out


def line_endpoint_counts(N: int, targets: Iterable[int]) -> dict[int, list[int]]:
    """One-dimensional endpoint counts by dynamic programming on [-N, N]."""
    _check_length(N)
    wanted = sorted(set(int(t) for t in targets))
    row = np.zeros(2 * N + 3, dtype=object)
    row[N + 1] = 1
    out = {t: [1 if t == 0 else 0] for t in wanted}
    for _ in range(N):
        nxt = np.zeros_like(row)
        nxt[1:] += row[:-1]
        nxt[:-1] += row[1:]
        row = nxt
        for t in wanted:
            out[t].append(int(row[N + 1 + t]) if abs(t) <= N else 0)
    return out


def endpoint_sequence(d: int, v: Sequence[int], N: int, limits: Limits | None = None) -> list[int]:
    """Walks of each length n <= N from the origin that end at ``v``.

    Built from one-dimensional counts along each axis and combined with
    :func:`binomial_convolve`, so the cost is O(d N^2) big-integer
    products instead of a d-dimensional array.
    """
    check_dimension(d, limits)
    target = _as_point(v, d)
    per_axis = line_endpoint_counts(N, list(target))
    seq = per_axis[target[0]]
    for coord in target[1:]:
        seq = binomial_convolve(per_axis[coord], seq)
    return seq


def closed_walk_counts(d: int, N: int, limits: Limits | None = None) -> list[int]:
    """Return counts ``b_n`` for n <= N via :func:`endpoint_sequence` at the origin."""
    return endpoint_sequence(d, LatticePoint.origin(d), N, limits)


# ---------------------------------------------------------------------------
# exhaustive oracle

Walk = tuple  # tuple of points u_0 = origin, u_1, ..., u_n


def _directions(d: int) -> list[tuple]:
    dirs = []
    for i in range(d):
        for s in (1, -1):
            e = [0] * d
            e[i] = s
            dirs.append(tuple(e))
    return dirs


def brute_force_count(d: int, n: int, predicate: Callable[[Walk], bool], limits: Limits | None = None) -> int:
    """Count walks of length ``n`` from the origin satisfying ``predicate`` by listing all (2d)^n of them."""
    check_dimension(d, limits)
    _check_length(n)
    budget = resolve(limits).brute_force_budget
    if (2 * d) ** n > budget:
        raise ResourceLimitError(f"(2d)^n = {(2 * d) ** n} walks exceed the enumeration budget {budget}")
    dirs = _directions(d)
    origin = (0,) * d
    count = 0
    for steps in itertools.product(dirs, repeat=n):
        pos = origin
        walk = [pos]
        for s in steps:
            pos = tuple(p + q for p, q in zip(pos, s))
            walk.append(pos)
        if predicate(tuple(walk)):
            count += 1
    return count


def every_walk(walk: Walk) -> bool:
    return True


def is_recurrent(walk: Walk) -> bool:
    origin = walk[0]
    return any(u == origin for u in walk[1:])


def ends_at(point: Sequence[int]) -> Callable[[Walk], bool]:
    target = tuple(point)
    return lambda walk: walk[-1] == target


def is_first_return(walk: Walk) -> bool:
    origin = walk[0]
    return len(walk) > 1 and walk[-1] == origin and all(u != origin for u in walk[1:-1])


def visits(point: Sequence[int]) -> Callable[[Walk], bool]:
    target = tuple(point)
    return lambda walk: any(u == target for u in walk[1:])


def brute_force_table(d: int, v: Sequence[int] | None, N: int, limits: Limits | None = None) -> dict[str, list[int]]:
    """All eight sequences for lengths 0..N by depth-first enumeration of every walk."""
    check_dimension(d, limits)
    _check_length(N)
    budget = resolve(limits).brute_force_budget
    if (2 * d) ** N > budget:
        raise ResourceLimitError(f"(2d)^N = {(2 * d) ** N} walks exceed the enumeration budget {budget}")
    origin = (0,) * d
    target = origin if v is None else tuple(_as_point(v, d))
    with_target = target != origin
    names = ["a", "b", "c", "d"] + (["a_prime", "b_prime", "c_prime", "c_dprime"] if with_target else [])
    out = {k: [0] * (N + 1) for k in names}
    a, b, c, dd = out["a"], out["b"], out["c"], out["d"]
    if with_target:
        ap, bp, cp, cpp = out["a_prime"], out["b_prime"], out["c_prime"], out["c_dprime"]
    dirs = _directions(d)

    def visit(pos, n, inner_origin, inner_target, hit_target):
        # inner_* : whether u_1..u_{n-1} contain the point
        at_origin = pos == origin
        dd[n] += 1
        if n >= 1 and (inner_origin or at_origin):
            a[n] += 1
        if at_origin:
            b[n] += 1
            if n >= 1 and not inner_origin:
                c[n] += 1
        if with_target:
            at_target = pos == target
            if hit_target or (n >= 1 and at_target):
                ap[n] += 1
            if at_origin and not hit_target:
                bp[n] += 1
            if at_target and not inner_target:
                cp[n] += 1
                if not inner_origin:
                    cpp[n] += 1
        if n == N:
            return
        next_inner_origin = inner_origin or (n >= 1 and at_origin)
        next_inner_target = inner_target or (n >= 1 and with_target and pos == target)
        next_hit = with_target and (hit_target or (n >= 1 and pos == target))
        for s in dirs:
            visit(tuple(p + q for p, q in zip(pos, s)), n + 1, next_inner_origin, next_inner_target, next_hit)

    visit(origin, 0, False, False, False)
    return out


def reachable(u: Sequence[int], m: int) -> bool:
    """Whether a walk of length m from the origin can end at u: needs m >= |u|_1 and equal parity."""
    norm = sum(abs(c) for c in u)
    return m >= norm and (m - norm) % 2 == 0
