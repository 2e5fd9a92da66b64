"""Monte Carlo simulation of the simple random walk, checked against exact counts.

Randomness comes from the Philox4x32-10 counter-based generator.  Trial
``t`` of a run with seed ``s`` reads its direction choices from the
blocks ``philox(counter=(t_lo, t_hi, block, 0), key=(s_lo, s_hi))``, four
steps per block.  Every trial therefore owns an independent stream that
does not depend on how trials are batched, and results are bit-identical
for identical inputs.

Directions are ``word mod 2d``.  For 2d not a power of two this favours
the low residues by at most ``2d / 2^32`` in probability, far below what
any trial count in reach can resolve.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import Limits, resolve
from .errors import InputError, ResourceLimitError
from .lattice import LatticePoint, _as_point, check_dimension, endpoint_counts, reachable, walk_table

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_CHUNK = 1 << 17


def philox4x32(counter: Sequence[np.ndarray], key: tuple[int, int], rounds: int = 10) -> list[np.ndarray]:
    """The Philox4x32 block function on arrays of 32-bit counter words (held in uint64)."""
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK32 for c in counter)
    k0, k1 = key[0] & 0xFFFFFFFF, key[1] & 0xFFFFFFFF
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> np.uint64(32)) ^ c1 ^ np.uint64(k0),
            p1 & _MASK32,
            (p0 >> np.uint64(32)) ^ c3 ^ np.uint64(k1),
            p0 & _MASK32,
        )
    return [c0, c1, c2, c3]


def _split_seed(seed: int) -> tuple[int, int]:
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


@dataclass(frozen=True)
class SimulationSpec:
    d: int
    n: int
    trials: int
    seed: int
    target: LatticePoint

    @classmethod
    def make(cls, d: int, n: int, trials: int, seed: int, target=None) -> "SimulationSpec":
        check_dimension(d)
        if n < 0:
            raise InputError("walk length must be nonnegative")
        if trials < 1:
            raise InputError("trials must be at least 1")
        _split_seed(seed)
        point = LatticePoint.origin(d) if target is None else _as_point(target, d)
        return cls(d, n, trials, seed, point)

    def to_json(self) -> dict:
        out = asdict(self)
        out["target"] = list(self.target)
        return out


def _check_budget(spec: SimulationSpec, limits: Limits | None) -> None:
    lim = resolve(limits)
    steps = spec.trials * max(spec.n, 1)
    if steps > lim.simulation_budget:
        raise ResourceLimitError(f"{steps} simulated steps exceed the budget {lim.simulation_budget}")


def _walk_chunks(spec: SimulationSpec):
    """Yield ``(positions, step)`` per step for consecutive chunks of trials.

    ``positions`` is an int64 array of shape (chunk, d); ``step`` runs
    0..n within each chunk, with step 0 the origin.
    """
    key = _split_seed(spec.seed)
    two_d = np.uint64(2 * spec.d)
    for start in range(0, spec.trials, _CHUNK):
        stop = min(start + _CHUNK, spec.trials)
        trial = np.arange(start, stop, dtype=np.uint64)
        lo, hi = trial & _MASK32, trial >> np.uint64(32)
        zeros = np.zeros_like(trial)
        pos = np.zeros((stop - start, spec.d), dtype=np.int64)
        rows = np.arange(stop - start)
        yield pos, 0
        words = None
        for step in range(1, spec.n + 1):
            j = (step - 1) % 4
            if j == 0:
                block = np.full_like(trial, (step - 1) // 4)
                words = philox4x32((lo, hi, block, zeros), key)
            direction = (words[j] % two_d).astype(np.int64)
            pos[rows, direction >> 1] += 1 - 2 * (direction & 1)
            yield pos, step


def _stderr(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


def _z(estimate: float, exact: float | None, stderr: float, trials: int) -> float | None:
    if exact is None:
        return None
    se = stderr if stderr > 0 else _stderr(exact, trials)
    if se == 0:
        return 0.0 if estimate == exact else math.inf
    return (estimate - exact) / se


def exact_visit_probability(d: int, n: int, target: Sequence[int]) -> Fraction:
    """Probability that a length-n walk visits target at a step in 1..n (return, for the origin)."""
    point = _as_point(target, d)
    if point.is_origin():
        t = walk_table(d, None, n)
        return Fraction(t.a[n], t.d_seq[n])
    t = walk_table(d, point, n)
    return Fraction(t.a_prime[n], t.d_seq[n])


@dataclass
class VisitEstimate:
    spec: SimulationSpec
    hits: int
    estimate: float
    stderr: float
    exact: Fraction | None
    z: float | None

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "hits": self.hits,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "exact": None if self.exact is None else str(self.exact),
            "exact_approx": None if self.exact is None else float(self.exact),
            "z": self.z,
        }


def simulate_visit_frequency(spec: SimulationSpec, limits: Limits | None = None, exact: bool = True) -> VisitEstimate:
    """Fraction of trials that visit the target at some step 1..n, with its standard error."""
    _check_budget(spec, limits)
    target = np.array(spec.target, dtype=np.int64)
    hits = 0
    seen = None
    for pos, step in _walk_chunks(spec):
        if step == 0:
            seen = np.zeros(len(pos), dtype=bool)
            continue
        seen |= np.all(pos == target, axis=1)
        if step == spec.n:
            hits += int(seen.sum())
    p = hits / spec.trials
    se = _stderr(p, spec.trials)
    ref = exact_visit_probability(spec.d, spec.n, spec.target) if exact else None
    return VisitEstimate(spec, hits, p, se, ref, _z(p, None if ref is None else float(ref), se, spec.trials))


@dataclass
class EndpointEstimate:
    spec: SimulationSpec
    counts: dict
    exact: dict

    def rows(self) -> list[dict]:
        T = self.spec.trials
        out = []
        for p in sorted(set(self.counts) | set(self.exact)):
            k = self.counts.get(p, 0)
            est = k / T
            se = _stderr(est, T)
            ref = self.exact.get(p, Fraction(0))
            out.append(
                {"point": list(p), "count": k, "estimate": est, "stderr": se, "exact": str(ref),
                 "z": _z(est, float(ref), se, T)}
            )
        return out

    def max_abs_z(self) -> float:
        return max(abs(r["z"]) for r in self.rows())

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "rows": self.rows()}


def simulate_endpoint_frequency(spec: SimulationSpec, limits: Limits | None = None) -> EndpointEstimate:
    """Empirical law of the position after n steps next to the exact law from endpoint counts."""
    _check_budget(spec, limits)
    counts: dict = {}
    for pos, step in _walk_chunks(spec):
        if step == spec.n:
            pts, k = np.unique(pos, axis=0, return_counts=True)
            for p, c in zip(map(tuple, pts.tolist()), k.tolist()):
                counts[LatticePoint(p)] = counts.get(LatticePoint(p), 0) + c
    base = (2 * spec.d) ** spec.n
    exact = {p: Fraction(seq[spec.n], base) for p, seq in endpoint_counts(spec.d, spec.n).items() if seq[spec.n]}
    return EndpointEstimate(spec, counts, exact)


def reachability_zero_check(spec: SimulationSpec, limits: Limits | None = None) -> dict:
    """Structural checks on simulated paths and on the parity rule for reaching ``spec.target``.

    Every simulated position after i steps must have L1 norm at most i and
    the parity of i.  The rule "reachable in m steps iff m >= |u|_1 and
    m = |u|_1 mod 2" is compared with the exact endpoint count.
    """
    _check_budget(spec, limits)
    m, u = spec.n, spec.target
    target = np.array(u, dtype=np.int64)
    structural_ok, hits = True, 0
    for pos, step in _walk_chunks(spec):
        norms = np.abs(pos).sum(axis=1)
        if np.any(norms > step) or np.any((norms - step) % 2):
            structural_ok = False
        if step == m:
            hits += int(np.all(pos == target, axis=1).sum())
    exact_count = endpoint_counts(spec.d, m).get(u, (0,) * (m + 1))[m]
    claim = reachable(u, m)
    return {
        "spec": spec.to_json(),
        "hits": hits,
        "exact_count": exact_count,
        "claim_positive": claim,
        "exact_positive": exact_count > 0,
        "claim_matches": claim == (exact_count > 0),
        "structural_ok": structural_ok,
        "impossible_hits": hits if exact_count == 0 else 0,
        "ok": structural_ok and claim == (exact_count > 0) and (exact_count > 0 or hits == 0),
    }


# cells (d, n, target) of the calibration battery
CALIBRATION_CELLS = (
    (1, 1, (1,)), (1, 4, (0,)), (1, 7, (2,)), (1, 10, (0,)), (1, 9, (-3,)),
    (2, 2, (0, 0)), (2, 6, (0, 0)), (2, 10, (0, 0)), (2, 5, (1, 0)), (2, 8, (1, 1)),
    (2, 9, (2, -1)), (2, 12, (0, 2)), (3, 2, (0, 0, 0)), (3, 6, (0, 0, 0)), (3, 10, (0, 0, 0)),
    (3, 5, (1, 0, 0)), (3, 8, (1, 1, 0)), (3, 7, (0, -1, 2)), (3, 12, (1, 0, 0)), (4, 6, (0, 0, 0, 0)),
)
CALIBRATION_SEED = 20240601


@dataclass
class CalibrationReport:
    cells: list
    soft: float
    hard: float

    @property
    def soft_exceed(self) -> int:
        return sum(abs(c.z) > self.soft for c in self.cells)

    @property
    def hard_exceed(self) -> int:
        return sum(abs(c.z) > self.hard for c in self.cells)

    @property
    def ok(self) -> bool:
        return self.hard_exceed == 0 and self.soft_exceed <= 1

    def to_json(self) -> dict:
        return {
            "cells": [c.to_json() for c in self.cells],
            "soft_threshold": self.soft,
            "hard_threshold": self.hard,
            "soft_exceed": self.soft_exceed,
            "hard_exceed": self.hard_exceed,
            "ok": self.ok,
        }


def calibration_battery(trials: int = 10**6, seed: int = CALIBRATION_SEED, limits: Limits | None = None) -> CalibrationReport:
    """Visit-frequency z-scores over the fixed cell list; each cell uses ``seed + index``."""
    lim = resolve(limits)
    cells = [
        simulate_visit_frequency(SimulationSpec.make(d, n, trials, seed + k, target), limits)
        for k, (d, n, target) in enumerate(CALIBRATION_CELLS)
    ]
    return CalibrationReport(cells, lim.z_soft, lim.z_hard)


def return_trend(d: int, lengths: Sequence[int], trials: int, seed: int, limits: Limits | None = None) -> dict:
    """Return-to-origin estimates over increasing walk lengths beside the exact profile.

    ``consistent`` holds when the exact profile is nondecreasing and every
    estimate sits within the hard z threshold of it.
    """
    lim = resolve(limits)
    cells = [simulate_visit_frequency(SimulationSpec.make(d, n, trials, seed, None), limits) for n in lengths]
    exact = [c.exact for c in cells]
    return {
        "d": d,
        "lengths": list(lengths),
        "estimates": [c.estimate for c in cells],
        "exact": [float(x) for x in exact],
        "z": [c.z for c in cells],
        "exact_nondecreasing": all(b >= a for a, b in zip(exact, exact[1:])),
        "consistent": all(b >= a for a, b in zip(exact, exact[1:])) and all(abs(c.z) <= lim.z_hard for c in cells),
    }
