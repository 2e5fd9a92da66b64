"""Walks on a finite graph with complex edge weights.

A weight assigns a complex number to each unordered pair of distinct
vertices labelled 1..m (pairs not listed weigh zero).  The weight of a
walk is the product of the weights of its steps, and every sequence here
is a total weight over a family of walks starting at vertex 1:

``d``       all walks of length n
``b``       walks ending at 1
``c``       walks ending at 1 that do not visit 1 in between
``a``       walks that revisit 1 at some positive step
``a_prime`` walks that visit the target
``b_prime`` walks ending at 1 that never visit the target
``c_prime`` walks ending at the target that do not visit it before
``c_dprime`` walks ending at the target that visit neither 1 nor the target in between

Because the support is finite, each total is a finite sum, so no
convergence question arises at fixed length.  Values are exact
(``Fraction`` or :class:`GaussianRational`) when all weights are given as
integers, rationals or strings, and Python ``complex`` otherwise.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import Limits, resolve
from .errors import InputError, ResourceLimitError
from .recurrence import ONE
from .series import GaussianRational, TruncatedSeries, multiply, solve_first_return, sqrt_set

SEQUENCE_NAMES = ("a", "b", "c", "d")
PRIMED_NAMES = ("a_prime", "b_prime", "c_prime", "c_dprime")


# ---------------------------------------------------------------------------
# weights and graphs

def _parse_weight(w):
    """Return ``(value, exact)`` for one edge weight in any accepted spelling."""
    if isinstance(w, (list, tuple)):
        if len(w) != 2:
            raise InputError(f"a weight pair must be [re, im], got {w!r}")
        re, im = (_parse_weight(part) for part in w)
        if re[1] and im[1]:
            return GaussianRational(re[0], im[0]), True
        return complex(complex(re[0]).real, complex(im[0]).real), False
    if isinstance(w, bool):
        raise InputError("boolean weights are not accepted")
    if isinstance(w, (int, Fraction)):
        return Fraction(w), True
    if isinstance(w, GaussianRational):
        return w, True
    if isinstance(w, str):
        text = w.strip().replace(" ", "")
        try:
            return Fraction(text), True
        except ValueError:
            pass
        try:
            return complex(text.replace("i", "j")), False
        except ValueError:
            raise InputError(f"cannot parse weight {w!r}") from None
    if isinstance(w, (float, complex)):
        return complex(w), False
    raise InputError(f"unsupported weight type {type(w).__name__}")


def _simplify(x):
    """Keep exact real weights as ``Fraction`` so real-only graphs avoid complex arithmetic."""
    if isinstance(x, GaussianRational) and x.im == 0:
        return x.re
    return x


class WeightedGraph:
    """Finite-support complex weight on pairs of vertices 1..m, walks start at 1.

    Built through :func:`build_weighted`.  Immutable after construction.
    """

    def __init__(self, m: int, weights: Mapping[frozenset, object], exact: bool):
        self.m = m
        self.exact = exact
        self._weights = dict(weights)
        adj: dict[int, list] = {u: [] for u in range(1, m + 1)}
        for pair, w in self._weights.items():
            u, v = sorted(pair)
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._adj = {u: tuple(sorted(nbrs, key=lambda t: t[0])) for u, nbrs in adj.items()}
        seen, stack = {1}, [1]
        while stack:
            u = stack.pop()
            for x, _ in self._adj[u]:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        self.component = frozenset(seen)
        # every explicit vertex has finite degree, so per-length sums are finite
        self.max_degree = max((len(n) for n in self._adj.values()), default=0)

    @property
    def semantics(self) -> str:
        return "rational" if self.exact else "complex"

    @property
    def zero(self):
        return Fraction(0) if self.exact else 0j

    @property
    def one(self):
        return Fraction(1) if self.exact else 1 + 0j

    def weight(self, u: int, v: int):
        return self._weights.get(frozenset((u, v)), self.zero)

    def neighbors(self, u: int) -> tuple:
        return self._adj.get(u, ())

    def edges(self) -> list[tuple[int, int, object]]:
        return sorted((min(p), max(p), w) for p, w in self._weights.items())

    def vertex_sum(self, u: int):
        total = self.zero
        for _, w in self._adj[u]:
            total = total + w
        return total

    def is_nonnegative(self) -> bool:
        for w in self._weights.values():
            if isinstance(w, GaussianRational):
                if w.im != 0 or w.re < 0:
                    return False
            elif isinstance(w, complex):
                if w.imag != 0 or w.real < 0:
                    return False
            elif w < 0:
                return False
        return True

    def matrix(self, absolute: bool = False, drop: Iterable[int] = ()) -> np.ndarray:
        """Dense m-by-m complex weight matrix (vertex k at index k-1), optionally with rows/cols zeroed."""
        A = np.zeros((self.m, self.m), dtype=complex)
        for (u, v, w) in self.edges():
            z = abs(complex(w)) if absolute else complex(w)
            A[u - 1, v - 1] = A[v - 1, u - 1] = z
        for k in drop:
            A[k - 1, :] = 0
            A[:, k - 1] = 0
        return A

    def to_json(self) -> dict:
        return {"vertices": self.m, "edges": [[u, v, _value_json(w)] for u, v, w in self.edges()]}

    def __repr__(self) -> str:
        return f"WeightedGraph(m={self.m}, edges={len(self._weights)}, {self.semantics})"


def build_weighted(edges: Iterable[Sequence], m: int | None = None) -> WeightedGraph:
    """Graph from ``(u, v, weight)`` triples; zero weights are accepted and dropped."""
    parsed, exact, labels = {}, True, set()
    for item in edges:
        if len(item) != 3:
            raise InputError(f"edge must be (u, v, weight), got {item!r}")
        u, v, w = item
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (u, v)):
            raise InputError(f"vertex labels must be integers, got {u!r}, {v!r}")
        if u < 1 or v < 1:
            raise InputError(f"vertex labels start at 1, got {u}, {v}")
        if u == v:
            raise InputError(f"loop at vertex {u} is not allowed")
        pair = frozenset((u, v))
        if pair in parsed:
            raise InputError(f"duplicate pair {{{min(pair)}, {max(pair)}}}")
        value, is_exact = _parse_weight(w)
        exact = exact and is_exact
        parsed[pair] = value
        labels.update(pair)
    top = max(labels, default=1)
    if m is None:
        m = top
    elif m < top:
        raise InputError(f"vertex count {m} is smaller than the largest label {top}")
    weights = {}
    for pair, value in parsed.items():
        value = _simplify(value) if exact else complex(value)
        if value != 0:
            weights[pair] = value
    return WeightedGraph(max(m, 1), weights, exact)


def graph_from_json(blob: Mapping) -> tuple[WeightedGraph, int | None, list | None]:
    """Parse ``{"vertices", "edges", "target"?, "perm"?}``; returns the graph, target and permutation."""
    try:
        m = int(blob["vertices"])
        edges = [(int(u), int(v), w) for u, v, w in blob["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from None
    return build_weighted(edges, m), blob.get("target"), blob.get("perm")


def lattice_window_graph(d: int, radius: int) -> tuple[WeightedGraph, dict]:
    """Simple random walk on the L1 ball of Z^d as a weighted graph; the origin is vertex 1.

    Every lattice edge inside the window weighs ``1/(2d)``, so for lengths
    ``n <= radius`` the weighted sums equal the lattice counts divided by
    ``(2d)^n``.
    """
    if d < 1 or radius < 0:
        raise InputError("need d >= 1 and radius >= 0")
    points = [p for p in itertools.product(range(-radius, radius + 1), repeat=d) if sum(map(abs, p)) <= radius]
    origin = (0,) * d
    points.sort(key=lambda p: (p != origin, sum(map(abs, p)), p))
    labels = {p: k for k, p in enumerate(points, 1)}
    h = Fraction(1, 2 * d)
    edges = []
    for p, k in labels.items():
        for axis in range(d):
            q = p[:axis] + (p[axis] + 1,) + p[axis + 1 :]
            if q in labels:
                edges.append((k, labels[q], h))
    return build_weighted(edges, len(points)), labels


# ---------------------------------------------------------------------------
# weight classes

@dataclass
class ConvexityReport:
    ok: bool
    sums: dict
    failing: list

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "sums": {str(k): _value_json(v) for k, v in self.sums.items()}, "failing": self.failing}


def _close(x, y, tol: float = 1e-12) -> bool:
    if isinstance(x, complex) or isinstance(y, complex):
        return abs(complex(x) - complex(y)) <= tol
    return x == y


def check_convex(g: WeightedGraph) -> ConvexityReport:
    """Is the weight sum around every vertex of the component equal to one?"""
    sums = {u: g.vertex_sum(u) for u in sorted(g.component)}
    failing = [u for u, s in sums.items() if not _close(s, 1)]
    return ConvexityReport(not failing, sums, failing)


def check_superconvex(g: WeightedGraph) -> ConvexityReport:
    """Are all vertex sums at least one?  Only meaningful for real weights."""
    for _, _, w in g.edges():
        if complex(w).imag != 0:
            raise InputError("superconvexity needs real weights")
    sums = {u: g.vertex_sum(u) for u in sorted(g.component)}
    failing = [u for u, s in sums.items() if (complex(s).real if isinstance(s, complex) else s) < 1]
    return ConvexityReport(not failing, sums, failing)


def _as_perm(perm, m: int) -> dict[int, int]:
    if isinstance(perm, Mapping):
        mapping = {int(k): int(v) for k, v in perm.items()}
    else:
        seq = list(perm)
        if len(seq) != m:
            raise InputError(f"permutation must list images of all {m} vertices")
        mapping = {k: int(x) for k, x in enumerate(seq, 1)}
    full = {k: mapping.get(k, k) for k in range(1, m + 1)}
    if sorted(full.values()) != list(range(1, m + 1)):
        raise InputError("permutation is not a bijection on the explicit vertices")
    return full


def check_v_transitive(g: WeightedGraph, v: int, perm) -> bool:
    """Does the bijection carry 1 to v and preserve every pair weight?

    Since the permutation fixes every label above m, only explicit pairs
    need checking.
    """
    f = _as_perm(perm, g.m)
    if f[1] != v:
        raise InputError(f"permutation sends 1 to {f[1]}, not to {v}")
    for a, b in itertools.combinations(range(1, g.m + 1), 2):
        if g.weight(a, b) != g.weight(f[a], f[b]):
            return False
    return True


def find_v_transitive_perm(g: WeightedGraph, v: int, limits: Limits | None = None) -> list[int] | None:
    """Exhaustive search for a weight-preserving bijection with 1 -> v (small graphs only)."""
    lim = resolve(limits)
    if g.m > lim.perm_search_max:
        raise ResourceLimitError(f"permutation search is capped at {lim.perm_search_max} vertices, graph has {g.m}")
    rest = [k for k in range(1, g.m + 1) if k != v]
    for tail in itertools.permutations(rest):
        perm = [v, *tail]
        if check_v_transitive(g, v, perm):
            return perm
    return None


# ---------------------------------------------------------------------------
# transfer recurrences

@dataclass
class WeightedSeriesBundle:
    N: int
    semantics: str
    a: tuple
    b: tuple
    c: tuple
    d: tuple
    target: int | None = None
    a_prime: tuple | None = None
    b_prime: tuple | None = None
    c_prime: tuple | None = None
    c_dprime: tuple | None = None

    def sequences(self) -> dict[str, tuple]:
        names = SEQUENCE_NAMES + (PRIMED_NAMES if self.target is not None else ())
        return {k: getattr(self, k) for k in names}

    def series(self, name: str) -> TruncatedSeries:
        return TruncatedSeries.from_coeffs(getattr(self, name), self.semantics)

    def row(self, n: int) -> dict:
        return {k: seq[n] for k, seq in self.sequences().items()}

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "semantics": self.semantics,
            "target": self.target,
            "sequences": {k: [_value_json(x) for x in seq] for k, seq in self.sequences().items()},
        }


def _value_json(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, GaussianRational):
        return [str(x.re), str(x.im)]
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _step(g: WeightedGraph, state: dict) -> dict:
    out: dict = {}
    for x, mass in state.items():
        for y, w in g.neighbors(x):
            out[y] = out.get(y, g.zero) + mass * w
    return {k: val for k, val in out.items() if val != 0}


def _total(g: WeightedGraph, state: dict):
    total = g.zero
    for val in state.values():
        total = total + val
    return total


def _check_work(g: WeightedGraph, N: int, limits: Limits | None) -> None:
    lim = resolve(limits)
    work = (2 * len(g.edges()) + g.m) * (N + 1)
    if work > lim.weighted_work_budget:
        raise ResourceLimitError(f"transfer work {work} exceeds the budget {lim.weighted_work_budget}")


def weighted_walk_series(g: WeightedGraph, v: int | None = None, N: int = 10, limits: Limits | None = None) -> WeightedSeriesBundle:
    """All walk-weight sequences up to length N by transfer recurrences.

    First returns come from deconvolving the return weights, and are
    checked against a recurrence that stops walks at 1.
    """
    if N < 0:
        raise InputError("N must be nonnegative")
    if v is not None and not (isinstance(v, int) and 2 <= v <= g.m):
        raise InputError(f"target must be an explicit vertex other than 1, got {v!r}")
    _check_work(g, N, limits)
    zero, one = g.zero, g.one
    walks = {1: one}
    stopped = {1: one}
    d_seq, b_seq, c_direct = [], [], []
    for n in range(N + 1):
        if n:
            walks = _step(g, walks)
            stopped = _step(g, stopped)
            c_direct.append(stopped.pop(1, zero))
        else:
            c_direct.append(zero)
        d_seq.append(_total(g, walks))
        b_seq.append(walks.get(1, zero))
    sem = g.semantics
    B = TruncatedSeries.from_coeffs(b_seq, sem)
    C = solve_first_return(B)
    if not all(_close(x, y, 1e-9) for x, y in zip(C.coeffs, c_direct)):
        raise AssertionError("first-return deconvolution disagrees with the stopped recurrence")
    D = TruncatedSeries.from_coeffs(d_seq, sem)
    A = multiply(C, D)
    bundle = WeightedSeriesBundle(N, sem, A.coeffs, tuple(b_seq), C.coeffs, tuple(d_seq))
    if v is None:
        return bundle
    avoid = {1: one}
    inner = {1: one}
    a_p, b_p, c_p, c_pp = [], [], [], []
    for n in range(N + 1):
        if n:
            avoid = _step(g, avoid)
            c_p.append(avoid.pop(v, zero))
            inner = _step(g, inner)
            c_pp.append(inner.pop(v, zero))
            inner.pop(1, None)
        else:
            c_p.append(zero)
            c_pp.append(zero)
        b_p.append(avoid.get(1, zero))
        a_p.append(d_seq[n] - _total(g, avoid))
    bundle.target = v
    bundle.a_prime, bundle.b_prime, bundle.c_prime, bundle.c_dprime = map(tuple, (a_p, b_p, c_p, c_pp))
    return bundle


def brute_force_weighted_rows(g: WeightedGraph, v: int | None, N: int, limits: Limits | None = None) -> list[dict]:
    """Rows 0..N of every sequence by enumerating walks over nonzero-weight edges."""
    lim = resolve(limits)
    if g.max_degree ** N > lim.brute_force_budget:
        raise ResourceLimitError(f"{g.max_degree}^{N} walks exceed the budget {lim.brute_force_budget}")
    names = SEQUENCE_NAMES + (PRIMED_NAMES if v is not None else ())
    rows = [{k: g.zero for k in names} for _ in range(N + 1)]

    def visit(pos, n, weight, seen_one, seen_v):
        # seen_one: 1 visited at a step in 1..n-1; seen_v: v visited at a step in 0..n-1
        row = rows[n]
        row["d"] += weight
        revisited = seen_one or (n > 0 and pos == 1)
        if pos == 1:
            row["b"] += weight
            if n > 0 and not seen_one:
                row["c"] += weight
        if revisited:
            row["a"] += weight
        if v is not None:
            if seen_v or pos == v:
                row["a_prime"] += weight
            if pos == 1 and not seen_v:
                row["b_prime"] += weight
            if pos == v and not seen_v:
                row["c_prime"] += weight
                if n > 0 and not seen_one:
                    row["c_dprime"] += weight
        if n == N:
            return
        now_one = seen_one or (n > 0 and pos == 1)
        now_v = seen_v or pos == v
        for y, w in g.neighbors(pos):
            visit(y, n + 1, weight * w, now_one, now_v)

    visit(1, 0, g.one, False, False)
    return rows


def brute_force_weighted(g: WeightedGraph, v: int | None, n: int, limits: Limits | None = None) -> dict:
    """Row n of every sequence by direct enumeration (the oracle for the recurrences)."""
    return brute_force_weighted_rows(g, v, n, limits)[n]


# ---------------------------------------------------------------------------
# theorem values

def spectral_radius_estimate(g: WeightedGraph) -> float:
    """Upper bound on the growth rate of total absolute walk weight from vertex 1.

    Uses the Collatz-Wielandt bound ``max_i (|A| x)_i / x_i`` for a
    positive vector x obtained by power iteration on ``|A| + I``,
    restricted to the component of 1.  A value below one certifies that
    ``sum_n d^{|h|}_n`` is finite.
    """
    comp = sorted(g.component)
    if len(comp) == 1:
        return 0.0
    idx = [k - 1 for k in comp]
    A = np.abs(g.matrix(absolute=True)[np.ix_(idx, idx)]).real
    x = np.ones(len(comp))
    M = A + np.eye(len(comp))
    for _ in range(500):
        x = M @ x
        x /= x.max()
    ratios = (A @ x) / x
    return float(np.nextafter(ratios.max() * (1 + 1e-12), math.inf))


def resolvent_sums(g: WeightedGraph, x: complex = 1.0, v: int | None = None) -> dict:
    """``B(x)``, ``D(x)`` and, with a target, ``B0(x)`` by solving ``(I - xA) y = e_1``.

    Valid when the power series converge at x; used as an independent
    check of partial sums and to sample generating functions near one.
    """
    A = g.matrix()
    e1 = np.zeros(g.m, dtype=complex)
    e1[0] = 1
    y = np.linalg.solve(np.eye(g.m) - x * A, e1)
    out = {"B": complex(y[0]), "D": complex(y.sum())}
    if v is not None:
        A0 = g.matrix(drop=[v])
        y0 = np.linalg.solve(np.eye(g.m) - x * A0, e1)
        out["B0"] = complex(y0[0])
    return out


@dataclass
class TheoremValue:
    value: object
    status: str
    diagnostics: dict = field(default_factory=dict)
    branch: str | None = None

    def to_json(self) -> dict:
        value, approx = self.value, None
        if value is ONE:
            value, approx = "ONE", [1.0, 0.0]
        elif value is not None:
            z = complex(value)
            value, approx = _value_json(value), [z.real, z.imag]
        return {
            "value": value,
            "approx": approx,
            "status": self.status,
            "branch": self.branch,
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (Fraction, GaussianRational, complex)):
        return _value_json(obj)
    if isinstance(obj, (np.floating, np.bool_)):
        return obj.item()
    return obj


def _partial(seq):
    total = seq[0] * 0
    for x in seq:
        total = total + x
    return total


def _stabilized(seq, limits: Limits | None) -> tuple[bool, float]:
    lim = resolve(limits)
    k = lim.stabilization_window
    tail = float(sum(abs(complex(x)) for x in seq[-k:]))
    return tail < lim.stabilization_tol, tail


def general_recurrence_value(g: WeightedGraph, N: int = 100, limits: Limits | None = None) -> TheoremValue:
    """``A_h(1)`` with the identity ``A_h(1) = (1 - 1/B_h(1)) D_h(1)`` checked at truncation N.

    Existence of the sums is certified by the gauge when it is below one.
    For nonnegative weights with gauge at least one the sums diverge and
    the report carries the inequality ``a_{n+2} >= c_2 d_n``.  Otherwise
    the status is ``undetermined``.
    """
    gauge = spectral_radius_estimate(g)
    bundle = weighted_walk_series(g, None, N, limits)
    diag = {"gauge": gauge, "N": N}
    if gauge < 1:
        A1, B1, D1 = (_partial(getattr(bundle, k)) for k in "abd")
        closed = (1 - 1 / B1) * D1
        residual = abs(complex(A1 - closed))
        stable = [_stabilized(getattr(bundle, k), limits) for k in "abd"]
        exact = resolvent_sums(g)
        diag.update(
            A_partial=A1, B_partial=B1, D_partial=D1, closed_form=closed, residual=residual,
            stabilized=all(s for s, _ in stable), tail_mass=max(t for _, t in stable),
            resolvent_B=exact["B"], resolvent_D=exact["D"],
        )
        return TheoremValue(A1, "exists", diag)
    if g.is_nonnegative():
        c2 = bundle.c[2] if N >= 2 else g.zero
        chain = all(bundle.a[n + 2] >= c2 * bundle.d[n] for n in range(N - 1))
        diag.update(c2=c2, chain_holds=chain, D_partial=_partial(bundle.d), A_partial=_partial(bundle.a))
        status = "diverges" if c2 > 0 else "undetermined"
        return TheoremValue(None, status, diag)
    diag["reason"] = "gauge >= 1 with non-real or negative weights"
    return TheoremValue(None, "undetermined", diag)


def convex_recurrence_limit(g: WeightedGraph, N: int = 200, limits: Limits | None = None) -> TheoremValue:
    """``lim a^h_n`` for a convex weight: ``1 - 1/B_h(1)``, or ONE when nonnegative with divergent ``B_h``.

    A finite convex weight has every vertex sum equal to one, so the
    all-ones vector is fixed by the weight matrix and the return weights
    do not tend to zero.  In practice ``B_h(1)`` diverges on every finite
    convex graph and the nonnegative case always ends in ONE.
    """
    report = check_convex(g)
    if not report:
        raise InputError(f"weight is not convex at vertices {report.failing}")
    bundle = weighted_walk_series(g, None, N, limits)
    if not all(_close(x, 1) for x in bundle.d):
        raise AssertionError("total walk weight of a convex weight must be one at every length")
    estimate = bundle.a[-1]
    stable, tail = _stabilized(bundle.b, limits)
    B1 = _partial(bundle.b)
    diag = {"N": N, "a_N": estimate, "B_partial": B1, "b_tail_mass": tail}
    if stable:
        closed = 1 - 1 / B1
        diag.update(closed_form=closed, agreement=abs(complex(closed - estimate)))
        return TheoremValue(closed, "exists", diag)
    if g.is_nonnegative():
        diag["gap"] = abs(complex(1 - estimate))
        return TheoremValue(ONE, "diverges", diag)
    diag["reason"] = "return weights do not settle and the weight is not nonnegative"
    return TheoremValue(estimate, "undetermined", diag)


def _certify(estimate: complex, scale: complex, radicand: complex) -> tuple[str | None, float, list]:
    roots = sqrt_set(radicand)
    candidates = [scale * r for r in roots]
    dists = [abs(estimate - c) for c in candidates]
    k = int(np.argmin(dists))
    branch = None if len(roots) == 1 else ("+" if k == 0 else "-")
    return branch, dists[k], candidates


def v_recurrence_value(
    g: WeightedGraph,
    v: int,
    N: int = 100,
    mode: str = "general",
    perm=None,
    limits: Limits | None = None,
    tol: float = 1e-8,
) -> TheoremValue:
    """Weight of walks that ever visit v, checked against the square-root formula.

    ``general`` mode targets ``A_{0,h}(1)``, which should lie in
    ``D_h(1) * sqrt(1 - B_{0,h}(1)/B_h(1))``; ``convex`` mode targets
    ``lim (a_n^h)'``, in ``sqrt(1 - B_{0,h}(1)/B_h(1))`` or ONE when the
    weight is nonnegative and ``B_h(1)`` diverges.  Both need a
    weight-preserving bijection sending 1 to v, given as ``perm`` or found
    by exhaustive search on small graphs.
    """
    if mode not in ("general", "convex"):
        raise InputError(f"mode must be 'general' or 'convex', got {mode!r}")
    if v == 1:
        raise InputError("the target must differ from the start vertex 1")
    if not (isinstance(v, int) and 2 <= v <= g.m):
        raise InputError(f"target {v!r} is not an explicit vertex")
    if perm is None:
        perm = find_v_transitive_perm(g, v, limits)
        if perm is None:
            raise InputError(f"no weight-preserving bijection sends 1 to {v}; the formula does not apply")
    elif not check_v_transitive(g, v, perm):
        raise InputError("the supplied permutation does not preserve the weights")
    perm = [_as_perm(perm, g.m)[k] for k in range(1, g.m + 1)]
    if mode == "convex" and not check_convex(g):
        raise InputError("convex mode needs a convex weight")
    diag = {"mode": mode, "N": N, "perm": perm}
    if v not in g.component:
        diag["reason"] = "target outside the component of 1; every walk weight through it is zero"
        return TheoremValue(g.zero, "exists", diag)
    bundle = weighted_walk_series(g, v, N, limits)
    B0_partial = _partial(bundle.b_prime)
    B_partial = _partial(bundle.b)
    if mode == "general":
        gauge = spectral_radius_estimate(g)
        diag["gauge"] = gauge
        if gauge >= 1:
            status = "diverges" if g.is_nonnegative() else "undetermined"
            return TheoremValue(None, status, diag)
        estimate = _partial(bundle.a_prime)
        D_partial = _partial(bundle.d)
        radicand = complex(1 - B0_partial / B_partial)
        branch, dist, cands = _certify(complex(estimate), complex(D_partial), radicand)
        exact = resolvent_sums(g, 1.0, v)
        diag.update(
            A0_partial=estimate, B_partial=B_partial, B0_partial=B0_partial, D_partial=D_partial,
            candidates=cands, distance=dist, certified=dist <= tol,
            resolvent=exact,
        )
        return TheoremValue(estimate, "exists", diag, branch)
    estimate = bundle.a_prime[-1]
    stable, tail = _stabilized(bundle.b, limits)
    diag.update(a_prime_N=estimate, B_partial=B_partial, B0_partial=B0_partial, b_tail_mass=tail)
    if stable:
        radicand = complex(1 - B0_partial / B_partial)
        value = estimate
        status = "exists"
    elif g.is_nonnegative():
        radicand = 1 + 0j  # B0/B -> 0 as B diverges
        value = ONE
        status = "diverges"
    else:
        diag["reason"] = "return weights do not settle and the weight is not nonnegative"
        return TheoremValue(estimate, "undetermined", diag)
    branch, dist, cands = _certify(complex(estimate), 1 + 0j, radicand)
    diag.update(candidates=cands, distance=dist, certified=dist <= tol)
    return TheoremValue(value, status, diag, branch)


def abel_trend(g: WeightedGraph, v: int, xs: Sequence[float] = (0.9, 0.99, 0.999, 0.9999, 0.99999)) -> dict:
    """Sample ``F_B(x)`` and ``F_{B0}(x)/F_B(x)`` as x increases to one.

    For a nonnegative weight with ``B_h(1)`` infinite and v reachable the
    first should grow without bound and the ratio should fall to zero.
    This only reports the sampled trend; a function limit is not
    finitely checkable.
    """
    if not (isinstance(v, int) and 2 <= v <= g.m):
        raise InputError(f"target {v!r} is not an explicit vertex other than 1")
    rows = []
    for x in xs:
        r = resolvent_sums(g, x, v)
        rows.append({"x": x, "F_B": r["B"].real, "ratio": (r["B0"] / r["B"]).real})
    increasing = all(b["F_B"] > a["F_B"] for a, b in zip(rows, rows[1:]))
    decreasing = all(b["ratio"] < a["ratio"] for a, b in zip(rows, rows[1:]))
    return {"rows": rows, "F_B_increasing": increasing, "ratio_decreasing": decreasing}
