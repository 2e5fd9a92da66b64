"""Command-line entry point: ``polyawalk <subcommand> [flags]``.

Every run prints a provenance header (package version, seed, and a hash of
the resolved options) followed by the report.  JSON is the canonical
format: keys are sorted and non-finite floats are spelled as strings, so
the same flags give the same bytes apart from the ``timestamp`` fields.

Options may also come from ``--config FILE``, a JSON object whose keys are
the flag names with dashes turned into underscores; flags given on the
command line win.  Resource caps above their defaults are refused unless
``--i-know`` is present.  All logarithms in reported bounds are natural.

Exit codes: 0 success, 1 invariant violation, 2 bad input, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import hashlib
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .battery import run_battery
from .config import Limits
from .effective2d import CSV_HEADER, empirical_threshold, robbins_factorial_bounds, u2n_bounds_check, verify_gap
from .errors import InputError, InvariantViolation, PolyaWalkError, ResourceLimitError
from .lattice import LatticePoint, brute_force_table, check_dimension, walk_table
from .montecarlo import (
    CALIBRATION_SEED,
    SimulationSpec,
    reachability_zero_check,
    simulate_endpoint_frequency,
    simulate_visit_frequency,
)
from .recurrence import ONE, asymptotic_compare, hitting_enclosure, polya_enclosure, zero_recurrence_profile
from .series import GaussianRational, Interval
from .weighted import (
    abel_trend,
    brute_force_weighted_rows,
    check_convex,
    check_superconvex,
    convex_recurrence_limit,
    find_v_transitive_perm,
    general_recurrence_value,
    graph_from_json,
    v_recurrence_value,
    weighted_walk_series,
)

CAP_FLAGS = {
    "max_dim": int,
    "memory_budget": int,
    "brute_force_budget": int,
    "simulation_budget": int,
    "exact_gap_max": int,
    "float_gap_max": int,
    "weighted_work_budget": int,
    "perm_search_max": int,
}

DEFAULTS = {
    "format": "json",
    "i_know": False,
    "steps": None,
    "target": None,
    "stride": 1,
    "targets": None,
    "n_list": "100,1000,5000",
    "mode": None,
    "robbins": False,
    "u2n": None,
    "graph": None,
    "perm": None,
    "brute": None,
    "trials": 10**5,
    "seed": 0,
    "kind": "visit",
    "quick": False,
}


# --- canonical output -------------------------------------------------------------

def to_plain(obj):
    """Recursively turn report objects into JSON-native values."""
    if obj is ONE:
        return "ONE"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return to_plain(float(obj))
    if isinstance(obj, (Fraction, GaussianRational)):
        return str(obj)
    if isinstance(obj, complex):
        return [to_plain(obj.real), to_plain(obj.imag)]
    if isinstance(obj, Interval):
        return to_plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_plain(v) for v in items]
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)


def strip_timestamps(obj):
    """Copy of a JSON value without any ``timestamp`` keys."""
    if isinstance(obj, dict):
        return {k: strip_timestamps(v) for k, v in obj.items() if k != "timestamp"}
    if isinstance(obj, list):
        return [strip_timestamps(v) for v in obj]
    return obj


# --- option handling ----------------------------------------------------------------

def _point(raw, d: int | None):
    if raw is None:
        return None
    if isinstance(raw, (list, tuple)):
        return LatticePoint([int(x) for x in raw])
    return LatticePoint.parse(str(raw), d)


def _int_list(raw) -> list[int]:
    if isinstance(raw, (list, tuple)):
        return [int(x) for x in raw]
    try:
        return [int(x) for x in str(raw).replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {raw!r}") from None


def _limits(opts: dict) -> Limits:
    overrides = {k: opts[k] for k in CAP_FLAGS if opts.get(k) is not None}
    lim = dataclasses.replace(Limits(), **overrides)
    raised = lim.exceeds_defaults()
    if raised and not opts.get("i_know"):
        raise ResourceLimitError(f"raising {', '.join(raised)} beyond the defaults needs --i-know")
    return lim


def _config_hash(opts: dict) -> str:
    relevant = {k: v for k, v in opts.items() if k not in ("config",)}
    blob = json.dumps(to_plain(relevant), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _require(opts: dict, *names: str) -> None:
    missing = [n for n in names if opts.get(n) is None]
    if missing:
        raise InputError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


# --- subcommands ----------------------------------------------------------------------
# each returns (report, csv_text or None, exit_code)

def cmd_count(opts, lim):
    _require(opts, "dim", "steps")
    d, N = opts["dim"], opts["steps"]
    v = _point(opts["target"], d)
    if v is not None and v.is_origin():
        v = None
    table = walk_table(d, v, N, lim)
    report = table.to_json()
    if opts.get("brute") is not None:
        n = min(int(opts["brute"]), N)
        oracle = brute_force_table(d, v, n, lim)
        agree = all(list(table.sequences()[k][: n + 1]) == seq for k, seq in oracle.items())
        report["enumeration_check"] = {"up_to": n, "agrees": agree}
        if not agree:
            raise InvariantViolation("walk table disagrees with brute-force enumeration")
    return report, table.to_csv(), 0


def cmd_profile(opts, lim):
    _require(opts, "dim", "steps")
    rep = zero_recurrence_profile(opts["dim"], opts["steps"], lim)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "profile", "approx", "gap"])
    for n, q in enumerate(rep.profile):
        if n % opts["stride"] == 0 or n == rep.N:
            w.writerow([n, str(q), float(q), float(1 - q)])
    return rep.to_json(opts["stride"]), buf.getvalue(), 0


def cmd_limit(opts, lim):
    _require(opts, "dim")
    d = opts["dim"]
    N = opts["steps"] if opts["steps"] is not None else 1000
    check_dimension(d, lim)
    if d <= 2:
        rep = zero_recurrence_profile(d, N, lim)
        return {"d": d, "N": N, "limit": "ONE", "details": rep.details}, None, 0
    enc = polya_enclosure(d, N, lim)
    return {"d": d, "N": N, "limit": enc.interval, "details": enc.details()}, None, 0


def cmd_vlimit(opts, lim):
    _require(opts, "dim", "target")
    d = opts["dim"]
    N = opts["steps"] if opts["steps"] is not None else 1000
    v = _point(opts["target"], d)
    if v.is_origin():
        raise InputError("the target must be nonzero; use `limit` for returns")
    if d <= 2:
        t = walk_table(d, v, min(N, 200), lim)
        n = t.N
        visit = Fraction(t.a_prime[n], t.d_seq[n])
        return {"d": d, "v": list(v), "N": n, "limit": "ONE",
                "visit_probability_at_N": str(visit), "visit_probability_approx": float(visit)}, None, 0
    enc = hitting_enclosure(d, v, N, lim)
    return {"d": d, "v": list(v), "N": N, "limit": enc.interval, "details": enc.details()}, None, 0


def cmd_asym(opts, lim):
    d = opts.get("dim") or 3
    N = opts["steps"] if opts["steps"] is not None else 1000
    raw = opts["targets"] or ";".join(str(LatticePoint.axis(d, 0, k)) for k in (1, 2, 4))
    targets = [_point(t, d) for t in (raw if isinstance(raw, list) else str(raw).split(";"))]
    rows = asymptotic_compare(d, targets, N, lim)
    buf = io.StringIO()
    keys = ["v", "norm2", "limit_lo", "limit_hi", "estimate", "formula", "ratio", "ratio_times_B"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([";".join(map(str, r["v"])) if k == "v" else r[k] for k in keys])
    return {"d": d, "N": N, "rows": rows}, buf.getvalue(), 0


def cmd_bounds2d(opts, lim):
    N_list = _int_list(opts["n_list"])
    mode = opts["mode"] or "exact"
    report = {"mode": mode}
    csv_parts = []
    gap_N = [N for N in N_list if N >= 1]
    if gap_N:
        records = verify_gap(gap_N, mode, lim)
        report["records"] = [r.to_json() for r in records]
        report["threshold"] = empirical_threshold(records)
        csv_parts.append("\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n")
        failed = any(r.status == "ok" and not r.all_ok for r in records)
    else:
        failed = False
    if opts["robbins"]:
        rows = []
        for n in N_list:
            lo, hi = robbins_factorial_bounds(n)
            exact = math.factorial(n)
            rows.append({"n": n, "lower": lo, "upper": hi,
                         "contains": Fraction(lo) <= exact <= Fraction(hi) if n <= 170 else None})
        report["robbins"] = rows
        csv_parts.append("n,lower,upper,contains\n" + "".join(
            f"{r['n']},{r['lower']!r},{r['upper']!r},{r['contains']}\n" for r in rows))
        failed = failed or any(r["contains"] is False for r in rows)
    if opts["u2n"] is not None:
        u = u2n_bounds_check(int(opts["u2n"]))
        report["u2n"] = u.to_json()
        failed = failed or not u.ok
    return report, "\n".join(csv_parts), 1 if failed else 0


def _load_graph(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read graph file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"graph file is not valid JSON: {exc}") from None


def cmd_weighted(opts, lim):
    _require(opts, "graph")
    blob = opts["graph"] if isinstance(opts["graph"], dict) else _load_graph(opts["graph"])
    g, target, perm = graph_from_json(blob)
    if opts["target"] is not None:
        target = int(opts["target"])
    if opts["perm"] is not None:
        perm = _int_list(opts["perm"])
    N = opts["steps"] if opts["steps"] is not None else 100
    report = {"graph": g.to_json(), "target": target, "N": N, "semantics": g.semantics}
    convex = check_convex(g)
    report["convex"] = convex.to_json()
    try:
        report["superconvex"] = check_superconvex(g).to_json()
    except InputError as exc:
        report["superconvex"] = {"ok": None, "reason": str(exc)}
    report["general_value"] = general_recurrence_value(g, N, lim).to_json()
    if convex:
        report["convex_limit"] = convex_recurrence_limit(g, max(N, 200), lim).to_json()
    status = 0
    if target is not None:
        bundle = weighted_walk_series(g, target, min(N, 60), lim)
        report["series"] = bundle.to_json()
        if perm is None:
            perm = find_v_transitive_perm(g, target, lim)
        report["transitive_perm"] = perm
        if perm is not None and target != 1:
            mode = opts["mode"] or ("convex" if convex else "general")
            report["v_value"] = v_recurrence_value(g, target, N, mode, perm, lim).to_json()
        if g.is_nonnegative() and target != 1 and target in g.component:
            report["abel_trend"] = abel_trend(g, target)
        if opts["brute"] is not None:
            n = min(int(opts["brute"]), bundle.N)
            rows = brute_force_weighted_rows(g, target, n, lim)
            agree = all(row[k] == getattr(bundle, k)[i] for i, row in enumerate(rows) for k in row)
            report["enumeration_check"] = {"up_to": n, "agrees": agree}
            if not agree:
                raise InvariantViolation("weighted series disagree with brute-force enumeration")
    return report, None, status


def cmd_simulate(opts, lim):
    _require(opts, "dim", "steps")
    d = opts["dim"]
    spec = SimulationSpec.make(d, opts["steps"], opts["trials"], opts["seed"], _point(opts["target"], d))
    kind = opts["kind"]
    if kind == "visit":
        est = simulate_visit_frequency(spec, lim)
        blob = est.to_json()
        text = "estimate,stderr,exact,z\n" + f"{est.estimate!r},{est.stderr!r},{blob['exact']},{est.z!r}\n"
        return blob, text, 0
    if kind == "endpoint":
        est = simulate_endpoint_frequency(spec, lim)
        rows = est.rows()
        text = "point,count,estimate,stderr,exact,z\n" + "".join(
            f"{';'.join(map(str, r['point']))},{r['count']},{r['estimate']!r},{r['stderr']!r},{r['exact']},{r['z']!r}\n"
            for r in rows)
        return est.to_json(), text, 0
    if kind == "reach":
        rep = reachability_zero_check(spec, lim)
        return rep, None, 0 if rep["ok"] else 1
    raise InputError(f"unknown simulation kind {kind!r}")


def cmd_verify(opts, lim):
    result = run_battery(quick=bool(opts["quick"]))
    lines = ["check,ok"] + [f"{c['name']},{c['ok']}" for c in result["checks"]]
    return result, "\n".join(lines) + "\n", 0 if result["ok"] else 1


COMMANDS = {
    "count": (cmd_count, "exact walk counts a, b, c, d (and primed counts with --target)"),
    "profile": (cmd_profile, "return probabilities within n steps, n <= N"),
    "limit": (cmd_limit, "eventual return probability (ONE for d <= 2, an enclosure otherwise)"),
    "vlimit": (cmd_vlimit, "probability of ever visiting a target point"),
    "asym": (cmd_asym, "hitting probabilities against the Green-function asymptotic"),
    "bounds2d": (cmd_bounds2d, "planar gap bounds, Robbins brackets and central-term constants"),
    "weighted": (cmd_weighted, "series and limit values for a weighted graph given as JSON"),
    "simulate": (cmd_simulate, "Monte Carlo frequencies next to exact values"),
    "verify": (cmd_verify, "run the invariant battery"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of option defaults")
    common.add_argument("--i-know", action="store_true", default=argparse.SUPPRESS,
                        help="allow caps above the built-in defaults")
    for name, typ in CAP_FLAGS.items():
        common.add_argument("--" + name.replace("_", "-"), type=typ, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="polyawalk", description="Exact and enclosed recurrence quantities for lattice and weighted walks.")
    parser.add_argument("--version", action="version", version=f"polyawalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name in ("count", "profile", "limit", "vlimit", "asym", "simulate"):
            p.add_argument("--dim", type=int, default=S)
        if name in ("count", "profile", "limit", "vlimit", "asym", "weighted", "simulate"):
            p.add_argument("--steps", type=int, default=S)
        if name in ("count", "vlimit", "simulate", "weighted"):
            p.add_argument("--target", default=S, help="lattice point as 1,0,... (vertex label for weighted)")
        if name in ("count", "weighted"):
            p.add_argument("--brute", type=int, default=S, help="cross-check with enumeration up to this length")
        if name == "profile":
            p.add_argument("--stride", type=int, default=S)
        if name == "asym":
            p.add_argument("--targets", default=S, help="points separated by ';', e.g. 1,0,0;2,0,0")
        if name == "bounds2d":
            p.add_argument("--n-list", default=S)
            p.add_argument("--mode", choices=["exact", "float"], default=S)
            p.add_argument("--robbins", action="store_true", default=S)
            p.add_argument("--u2n", type=int, default=S, help="check the central-term constants up to this n")
        if name == "weighted":
            p.add_argument("--graph", default=S, help="JSON file with vertices, edges and optional target/perm; '-' for stdin")
            p.add_argument("--mode", choices=["general", "convex"], default=S)
            p.add_argument("--perm", default=S, help="images of vertices 1..m, comma-separated")
        if name == "simulate":
            p.add_argument("--trials", type=int, default=S)
            p.add_argument("--seed", type=int, default=S)
            p.add_argument("--kind", choices=["visit", "endpoint", "reach"], default=S)
        if name == "verify":
            p.add_argument("--quick", action="store_true", default=S)
    return parser


def resolve_options(ns: argparse.Namespace) -> dict:
    """Merge built-in defaults, the config file and command-line flags, in increasing precedence."""
    given = vars(ns).copy()
    command = given.pop("command")
    opts = dict(DEFAULTS)
    opts.update({k: None for k in CAP_FLAGS})
    opts["dim"] = None
    path = given.pop("config", None)
    if path is not None:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot load config file: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
        unknown = set(cfg) - set(opts)
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update(cfg)
    opts.update(given)
    opts["command"] = command
    return opts


def _provenance(opts: dict) -> dict:
    seed = opts["seed"] if opts["command"] == "simulate" else (CALIBRATION_SEED if opts["command"] == "verify" else None)
    return {
        "tool": "polyawalk",
        "version": __version__,
        "command": opts["command"],
        "seed": seed,
        "config_hash": _config_hash(opts),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports bad usage with status 2
        return int(exc.code or 0)
    try:
        opts = resolve_options(ns)
        lim = _limits(opts)
        handler = COMMANDS[opts["command"]][0]
        report, csv_text, code = handler(opts, lim)
        prov = _provenance(opts)
        if opts["format"] == "csv":
            if csv_text is None:
                raise InputError(f"`{opts['command']}` has no CSV projection; use --format json")
            out.write(f"# polyawalk {prov['version']} command={prov['command']} seed={prov['seed']} config={prov['config_hash']}\n")
            out.write(csv_text)
        else:
            out.write(canonical_json({"provenance": prov, "result": report}) + "\n")
        return code
    except PolyaWalkError as exc:
        print(f"polyawalk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
