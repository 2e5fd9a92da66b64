"""Self-test battery behind ``polyawalk verify``.

Each check recomputes a quantity by two independent routes, or tests an
inequality or identity, and reports ``{"name", "ok", "detail"}``.  The
details hold only deterministic values (no timings or clock readings), so
two runs with the same flags serialise to identical JSON.

``quick`` keeps everything to a few seconds; the full battery runs every
check at the sizes the acceptance suite uses.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable

from .config import Limits
from .effective2d import exact_gaps, robbins_factorial_bounds, u2n_bounds_check, verify_gap
from .errors import PolyaWalkError
from .lattice import LatticePoint, brute_force_table, closed_walk_counts, walk_table
from .montecarlo import (
    SimulationSpec,
    calibration_battery,
    reachability_zero_check,
    simulate_endpoint_frequency,
)
from .recurrence import ONE, polya_enclosure
from .series import GaussianRational, TruncatedSeries, linear_combine, multiply, reciprocal
from .weighted import (
    PRIMED_NAMES,
    SEQUENCE_NAMES,
    brute_force_weighted_rows,
    build_weighted,
    check_convex,
    convex_recurrence_limit,
    find_v_transitive_perm,
    general_recurrence_value,
    lattice_window_graph,
    v_recurrence_value,
    weighted_walk_series,
)

# 1 - 1/B(1) in three dimensions, with B(1) from Watson's closed form
POLYA_3D_REFERENCE = 1 - 1 / 1.516386059151978

I_HALF = GaussianRational(0, Fraction(1, 2))


def weighted_battery() -> dict:
    """Named (graph, target) pairs exercised by the weighted checks."""
    half = Fraction(1, 2)

    def path(*ws):
        return build_weighted([(k, k + 1, w) for k, w in enumerate(ws, 1)])

    return {
        "edge-1": (build_weighted([(1, 2, 1)]), 2),
        "edge-half": (build_weighted([(1, 2, half)]), 2),
        "edge-i-half": (build_weighted([(1, 2, I_HALF)]), 2),
        "triangle": (build_weighted([(1, 2, half), (2, 3, half), (1, 3, half)]), 2),
        "triangle-far": (build_weighted([(1, 2, half), (2, 3, half), (1, 3, half)]), 3),
        "path-equal": (path(half, half), 3),
        "path-mixed": (path(Fraction(1, 3), GaussianRational(Fraction(1, 4), Fraction(-1, 2)), 2), 2),
        "path-long": (path(half, I_HALF, Fraction(-1, 3), Fraction(2, 3)), 5),
        "square-convex": (build_weighted([(1, 2, half), (2, 3, half), (3, 4, half), (1, 4, half)]), 3),
        "square-complex": (
            build_weighted([(1, 2, half), (2, 3, I_HALF), (3, 4, half), (1, 4, I_HALF)]),
            3,
        ),
    }


def _check(name: str, fn: Callable[[], tuple[bool, dict]]) -> dict:
    try:
        ok, detail = fn()
    except PolyaWalkError as exc:
        ok, detail = False, {"error": type(exc).__name__, "message": str(exc)}
    return {"name": name, "ok": bool(ok), "detail": detail}


# --- lattice ----------------------------------------------------------------------

def _lattice_cases():
    for d in (1, 2, 3):
        yield d, None
        yield d, LatticePoint.axis(d)
        if d >= 2:
            yield d, LatticePoint([1, 1] + [0] * (d - 2))


def oracle_counts(N: int) -> tuple[bool, dict]:
    mismatches = []
    for d, v in _lattice_cases():
        table = walk_table(d, v, N).sequences()
        oracle = brute_force_table(d, v, N)
        for name, seq in oracle.items():
            if list(table[name]) != seq:
                mismatches.append(f"d={d} v={v} {name}")
    return not mismatches, {"N": N, "cases": 8, "mismatches": mismatches}


def closed_forms(m_max: int) -> tuple[bool, dict]:
    b1 = closed_walk_counts(1, 2 * m_max)
    b2 = closed_walk_counts(2, 2 * m_max)
    bad = [m for m in range(m_max + 1) if b1[2 * m] != math.comb(2 * m, m) or b2[2 * m] != math.comb(2 * m, m) ** 2]
    return not bad, {"m_max": m_max, "failures": bad[:10]}


def generating_identities(N: int) -> tuple[bool, dict]:
    failed = []
    for d, v in _lattice_cases():
        t = walk_table(d, v, N)
        A, B, C, D = (t.normalized(k) for k in "abcd")
        ok = A == multiply(C, D) and multiply(B, 1 - C) == B.unit(N)
        if v is not None:
            A0, B0, C0, C1 = (t.normalized(k) for k in ("a_prime", "b_prime", "c_prime", "c_dprime"))
            ok = ok and A0 == multiply(C0, D)
            ok = ok and B == linear_combine(1, B0, 1, multiply(multiply(C0, C0), B))
            ok = ok and C0 == multiply(B0, C1)
        if not ok:
            failed.append(f"d={d} v={v}")
    return not failed, {"N": N, "failed": failed}


def series_laws(order: int, samples: int) -> tuple[bool, dict]:
    rng = random.Random(1729)

    def draw():
        coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(order + 1)]
        coeffs[0] = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        return TruncatedSeries.from_coeffs(coeffs, "rational")

    failures = 0
    for _ in range(samples):
        S, T, U = draw(), draw(), draw()
        laws = (
            multiply(S, T) == multiply(T, S),
            multiply(multiply(S, T), U) == multiply(S, multiply(T, U)),
            multiply(S, linear_combine(1, T, 1, U)) == linear_combine(1, multiply(S, T), 1, multiply(S, U)),
            multiply(S, reciprocal(S)) == S.unit(order),
        )
        failures += not all(laws)
    return failures == 0, {"order": order, "samples": samples, "failures": failures}


# --- recurrence ---------------------------------------------------------------------

def polya_nesting(lengths: tuple[int, ...], width_at_last: float | None) -> tuple[bool, dict]:
    encs = [polya_enclosure(3, N).interval for N in lengths]
    nested = all(b.lo >= a.lo and b.hi <= a.hi for a, b in zip(encs, encs[1:]))
    contains = all(e.lo <= POLYA_3D_REFERENCE <= e.hi for e in encs)
    narrow = width_at_last is None or encs[-1].width < width_at_last
    detail = {
        "lengths": list(lengths),
        "enclosures": [e.to_json() for e in encs],
        "reference": POLYA_3D_REFERENCE,
        "nested": nested,
        "contains_reference": contains,
        "final_width": encs[-1].width,
    }
    return nested and contains and narrow, detail


# --- effective2d ----------------------------------------------------------------------

def robbins_bracket() -> tuple[bool, dict]:
    lo, hi = robbins_factorial_bounds(7)
    digits = math.floor(lo * 100) == 503933 and math.floor(hi * 100) == 504004
    contained = all(Fraction(a) <= math.factorial(n) <= Fraction(b) for n in range(1, 31) for a, b in [robbins_factorial_bounds(n)])
    return digits and contained, {"seven": [lo, hi], "digits_match": digits, "contains_n_le_30": contained}


def u2n_constants(M: int) -> tuple[bool, dict]:
    report = u2n_bounds_check(M)
    return report.ok, report.to_json()


def gap_bounds_exact(N_max: int) -> tuple[bool, dict]:
    records = verify_gap(range(3, N_max + 1), "exact")
    bad = [r.N for r in records if not r.checks.get("gap_le_upper", False)]
    gaps = exact_gaps(min(N_max, 400))
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    return not bad and monotone, {"N_max": N_max, "upper_failures": bad[:10], "gap_nonincreasing": monotone}


def gap_bounds_float(N: int) -> tuple[bool, dict]:
    (rec,) = verify_gap([N], "float")
    return rec.all_ok, rec.to_json()


# --- weighted -------------------------------------------------------------------------

def weighted_oracle(N: int) -> tuple[bool, dict]:
    bad = []
    for name, (g, v) in weighted_battery().items():
        bundle = weighted_walk_series(g, v, N)
        rows = brute_force_weighted_rows(g, v, N)
        for n, row in enumerate(rows):
            if any(row[k] != getattr(bundle, k)[n] for k in row):
                bad.append(f"{name} n={n}")
                break
    return not bad, {"N": N, "mismatches": bad}


def lattice_windows(cases) -> tuple[bool, dict]:
    bad = []
    for d, radius, v in cases:
        g, labels = lattice_window_graph(d, radius)
        bundle = weighted_walk_series(g, labels[LatticePoint(v)], radius)
        table = walk_table(d, v, radius)
        for name in SEQUENCE_NAMES + PRIMED_NAMES:
            exact = table.d_seq if name == "d" else getattr(table, name)
            if [x * (2 * d) ** n for n, x in enumerate(getattr(bundle, name))] != list(exact):
                bad.append(f"d={d} r={radius} {name}")
    return not bad, {"cases": [list(map(str, c)) for c in cases], "mismatches": bad}


def weighted_identities(N: int) -> tuple[bool, dict]:
    results = {}
    for name, (g, v) in weighted_battery().items():
        if find_v_transitive_perm(g, v) is None:
            continue
        b = weighted_walk_series(g, v, N)
        A, B, C, D = (b.series(k) for k in SEQUENCE_NAMES)
        A0, B0, C0, C1 = (b.series(k) for k in PRIMED_NAMES)
        results[name] = bool(
            A == multiply(C, D)
            and multiply(B, 1 - C) == B.unit(N)
            and A0 == multiply(C0, D)
            and B == linear_combine(1, B0, 1, multiply(multiply(C0, C0), B))
            and C0 == multiply(B0, C1)
        )
    return all(results.values()), {"N": N, "transitive_cases": results}


def theorem_values(N_general: int, N_convex: int) -> tuple[bool, dict]:
    bat = weighted_battery()
    half = general_recurrence_value(bat["edge-half"][0], N_general)
    ihalf = general_recurrence_value(bat["edge-i-half"][0], N_general)
    ok_half = abs(complex(half.value) - 0.5) < 1e-10 and half.diagnostics["residual"] < 1e-10
    ok_ihalf = abs(complex(ihalf.value) - complex(-0.2, -0.1)) < 1e-10
    convex = {}
    for name, (g, _) in bat.items():
        if check_convex(g) and g.is_nonnegative():
            res = convex_recurrence_limit(g, N_convex)
            convex[name] = {"value": res.to_json()["value"], "gap": res.diagnostics.get("gap")}
    ok_convex = all(c["value"] == "ONE" and c["gap"] is not None and c["gap"] < 1e-3 for c in convex.values())
    detail = {
        "edge_half": half.to_json(),
        "edge_i_half": ihalf.to_json(),
        "convex": convex,
    }
    return ok_half and ok_ihalf and ok_convex and len(convex) >= 2, detail


def sqrt_branches(N: int) -> tuple[bool, dict]:
    out = {}
    for name, (g, v) in weighted_battery().items():
        if find_v_transitive_perm(g, v) is None:
            continue
        mode = "convex" if check_convex(g) else "general"
        res = v_recurrence_value(g, v, N if mode == "general" else 2 * N, mode=mode)
        if res.status not in ("exists", "diverges"):
            continue
        out[name] = {
            "mode": mode,
            "branch": res.branch,
            "distance": res.diagnostics.get("distance"),
            "certified": res.diagnostics.get("certified", False),
        }
    ok = bool(out) and all(r["certified"] and r["branch"] is not None for r in out.values())
    return ok, {"N": N, "cases": out}


# --- montecarlo -----------------------------------------------------------------------

def monte_carlo_calibration(trials: int) -> tuple[bool, dict]:
    report = calibration_battery(trials)
    blob = report.to_json()
    detail = {
        "trials": trials,
        "z": [c["z"] for c in blob["cells"]],
        "soft_exceed": blob["soft_exceed"],
        "hard_exceed": blob["hard_exceed"],
    }
    return report.ok, detail


def monte_carlo_structure(trials: int) -> tuple[bool, dict]:
    reach = [
        reachability_zero_check(SimulationSpec.make(2, m, trials, 5, u))
        for u, m in (((3, 0), 2), ((1, 0), 3), ((1, 1), 3))
    ]
    line = simulate_endpoint_frequency(SimulationSpec.make(1, 2, trials, 6))
    law_ok = line.exact == {LatticePoint((-2,)): Fraction(1, 4), LatticePoint((0,)): Fraction(1, 2), LatticePoint((2,)): Fraction(1, 4)}
    ok = all(r["ok"] for r in reach) and law_ok and line.max_abs_z() <= 5
    return ok, {"reachability": [r["ok"] for r in reach], "line_law_max_z": line.max_abs_z()}


def run_battery(quick: bool = False) -> dict:
    """Run every check; ``ok`` is true only when all of them pass."""
    if quick:
        plan = [
            ("lattice.oracle_counts", lambda: oracle_counts(8)),
            ("lattice.closed_forms", lambda: closed_forms(100)),
            ("lattice.generating_identities", lambda: generating_identities(24)),
            ("series.ring_laws", lambda: series_laws(12, 10)),
            ("recurrence.polya_nesting", lambda: polya_nesting((50, 200, 400), None)),
            ("effective2d.robbins", robbins_bracket),
            ("effective2d.u2n", lambda: u2n_constants(10**4)),
            ("effective2d.gap_exact", lambda: gap_bounds_exact(300)),
            ("effective2d.gap_float", lambda: gap_bounds_float(140000)),
            ("weighted.oracle", lambda: weighted_oracle(8)),
            ("weighted.lattice_windows", lambda: lattice_windows([(1, 8, (1,)), (2, 6, (1, 0))])),
            ("weighted.identities", lambda: weighted_identities(12)),
            ("weighted.theorem_values", lambda: theorem_values(100, 200)),
            ("weighted.sqrt_branches", lambda: sqrt_branches(100)),
            ("montecarlo.calibration", lambda: monte_carlo_calibration(10**4)),
            ("montecarlo.structure", lambda: monte_carlo_structure(2000)),
        ]
    else:
        plan = [
            ("lattice.oracle_counts", lambda: oracle_counts(8)),
            ("lattice.closed_forms", lambda: closed_forms(500)),
            ("lattice.generating_identities", lambda: generating_identities(60)),
            ("series.ring_laws", lambda: series_laws(24, 25)),
            ("recurrence.polya_nesting", lambda: polya_nesting((200, 1000, 2000), 1e-2)),
            ("effective2d.robbins", robbins_bracket),
            ("effective2d.u2n", lambda: u2n_constants(10**5)),
            ("effective2d.gap_exact", lambda: gap_bounds_exact(5000)),
            ("effective2d.gap_float", lambda: gap_bounds_float(140000)),
            ("weighted.oracle", lambda: weighted_oracle(10)),
            ("weighted.lattice_windows", lambda: lattice_windows([(1, 10, (1,)), (2, 10, (1, 0)), (3, 8, (1, 1, 0))])),
            ("weighted.identities", lambda: weighted_identities(20)),
            ("weighted.theorem_values", lambda: theorem_values(100, 200)),
            ("weighted.sqrt_branches", lambda: sqrt_branches(100)),
            ("montecarlo.calibration", lambda: monte_carlo_calibration(10**6)),
            ("montecarlo.structure", lambda: monte_carlo_structure(20000)),
        ]
    checks = [_check(name, fn) for name, fn in plan]
    return {"quick": quick, "ok": all(c["ok"] for c in checks), "checks": checks}
