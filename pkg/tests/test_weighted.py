from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyawalk.config import Limits
from polyawalk.errors import InputError, ResourceLimitError
from polyawalk.lattice import walk_table
from polyawalk.recurrence import ONE
from polyawalk.series import GaussianRational, linear_combine, multiply
from polyawalk.weighted import (
    PRIMED_NAMES,
    SEQUENCE_NAMES,
    abel_trend,
    brute_force_weighted,
    brute_force_weighted_rows,
    build_weighted,
    check_convex,
    check_superconvex,
    check_v_transitive,
    convex_recurrence_limit,
    find_v_transitive_perm,
    general_recurrence_value,
    graph_from_json,
    lattice_window_graph,
    resolvent_sums,
    spectral_radius_estimate,
    v_recurrence_value,
    weighted_walk_series,
)

I_HALF = GaussianRational(0, F(1, 2))


def edge(w):
    return build_weighted([(1, 2, w)])


def triangle():
    return build_weighted([(1, 2, "1/2"), (2, 3, "1/2"), (1, 3, "1/2")])


def path(*weights):
    return build_weighted([(k, k + 1, w) for k, w in enumerate(weights, 1)])


# battery of (graph, target) pairs used for oracle equivalence
BATTERY = {
    "edge-1": (edge(1), 2),
    "edge-half": (edge(F(1, 2)), 2),
    "edge-i-half": (edge(I_HALF), 2),
    "triangle": (triangle(), 2),
    "triangle-far": (triangle(), 3),
    "path-equal": (path(F(1, 2), F(1, 2)), 3),
    "path-mixed": (path(F(1, 3), GaussianRational(F(1, 4), F(-1, 2)), 2), 2),
    "path-long": (path(F(1, 2), I_HALF, F(-1, 3), F(2, 3)), 5),
    "split": (build_weighted([(1, 2, F(1, 2)), (3, 4, F(1, 2))]), 3),
    "square-complex": (build_weighted([(1, 2, "1/2"), (2, 3, [0, "1/2"]), (3, 4, "1/2"), (1, 4, [0, "1/2"])]), 3),
}


# --- construction ---------------------------------------------------------------

def test_build_rejects_bad_edges():
    with pytest.raises(InputError, match="duplicate"):
        build_weighted([(1, 2, F(1, 2)), (2, 1, 1)])
    with pytest.raises(InputError, match="loop"):
        build_weighted([(1, 1, 1)])
    with pytest.raises(InputError):
        build_weighted([(0, 1, 1)])


def test_component_of_start():
    assert edge(I_HALF).component == {1, 2}
    assert BATTERY["split"][0].component == {1, 2}


def test_weight_spellings():
    g = build_weighted([(1, 2, "1/2"), (2, 3, ["0", "1/2"]), (3, 4, 0.25)])
    assert g.semantics == "complex"
    exact = build_weighted([(1, 2, "1/2"), (2, 3, ["1/3", "-1/2"])])
    assert exact.semantics == "rational"
    assert exact.weight(3, 2) == GaussianRational(F(1, 3), F(-1, 2))


def test_json_round_trip():
    g, target = BATTERY["path-mixed"]
    blob = dict(g.to_json(), target=target, perm=[2, 1, 3])
    again, tgt, perm = graph_from_json(blob)
    assert again.edges() == g.edges() and tgt == 2 and perm == [2, 1, 3]
    with pytest.raises(InputError):
        graph_from_json({"edges": []})


# --- weight classes -------------------------------------------------------------

def test_convexity_examples():
    assert check_convex(edge(1))
    assert not check_convex(edge(F(1, 2)))
    assert check_convex(triangle())


def test_superconvexity_examples():
    assert check_superconvex(edge(1))
    assert check_superconvex(edge(F(3, 2))) and not check_convex(edge(F(3, 2)))
    assert not check_superconvex(edge(F(1, 2)))
    with pytest.raises(InputError):
        check_superconvex(edge(I_HALF))


def test_v_transitivity_examples():
    assert check_v_transitive(edge(F(1, 3)), 2, [2, 1])
    assert check_v_transitive(path(F(1, 2), F(1, 2)), 3, [3, 2, 1])
    unequal = path(F(1, 2), F(1, 3))
    assert find_v_transitive_perm(unequal, 2) is None
    with pytest.raises(InputError):
        check_v_transitive(unequal, 2, [3, 2, 1])
    with pytest.raises(InputError):
        check_v_transitive(unequal, 3, [3, 3, 1])


def test_permutation_search_cap():
    g = path(*[F(1, 2)] * 10)
    with pytest.raises(ResourceLimitError):
        find_v_transitive_perm(g, 11)


# --- series -------------------------------------------------------------------

def test_series_examples():
    b = weighted_walk_series(edge(1), None, 6)
    assert b.d == (1,) * 7 and b.b == (1, 0, 1, 0, 1, 0, 1)
    assert b.c == (0, 0, 1, 0, 0, 0, 0) and b.a == (0, 0, 1, 1, 1, 1, 1)
    b = weighted_walk_series(edge(F(1, 2)), None, 6)
    assert b.d == tuple(F(1, 2**n) for n in range(7))
    assert b.b[4] == F(1, 16) and b.c == (0, 0, F(1, 4), 0, 0, 0, 0)
    b = weighted_walk_series(edge(I_HALF), None, 6)
    assert all(b.d[n] == I_HALF**n for n in range(7))
    assert all(b.b[2 * m] == F(-1, 4) ** m for m in range(4))


def test_bundle_initial_values():
    for g, v in BATTERY.values():
        b = weighted_walk_series(g, v, 4)
        assert (b.a[0], b.c[0], b.b[0], b.d[0]) == (0, 0, 1, 1)


def test_brute_force_examples():
    g = triangle()
    row = brute_force_weighted(g, None, 0)
    assert (row["d"], row["b"], row["a"]) == (1, 1, 0)
    assert brute_force_weighted(edge(I_HALF), None, 2)["d"] == F(-1, 4)
    assert brute_force_weighted(g, 2, 3) == weighted_walk_series(g, 2, 3).row(3)
    with pytest.raises(ResourceLimitError):
        brute_force_weighted(g, None, 12, Limits(brute_force_budget=1000))


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_oracle_equivalence(name):
    g, v = BATTERY[name]
    rows = brute_force_weighted_rows(g, v, 10)
    bundle = weighted_walk_series(g, v, 10)
    for n in range(11):
        assert rows[n] == bundle.row(n), n


def test_target_outside_component_has_zero_primed_weights():
    g, v = BATTERY["split"]
    b = weighted_walk_series(g, v, 8)
    assert all(x == 0 for x in b.a_prime + b.c_prime + b.c_dprime)
    assert b.b_prime == b.b


def test_triangle_inequality_termwise():
    for g, v in BATTERY.values():
        absolute = build_weighted([(u, w, abs(complex(h))) for u, w, h in g.edges()], g.m)
        bound = [complex(x).real for x in weighted_walk_series(absolute, None, 10).d]
        seqs = weighted_walk_series(g, v, 10).sequences()
        for name, seq in seqs.items():
            assert all(abs(complex(x)) <= bd + 1e-12 for x, bd in zip(seq, bound)), name


@st.composite
def cycle_weights(draw):
    # a square with weights a, 1 - a around it: convex for every complex a
    re = draw(st.fractions(-2, 2, max_denominator=6))
    im = draw(st.fractions(-2, 2, max_denominator=6))
    a = GaussianRational(re, im)
    return build_weighted([(1, 2, a), (2, 3, 1 - a), (3, 4, a), (1, 4, 1 - a)])


@settings(max_examples=25, deadline=None)
@given(cycle_weights())
def test_convex_weights_have_unit_total_weight(g):
    assert check_convex(g)
    assert all(x == 1 for x in weighted_walk_series(g, None, 12).d)


@st.composite
def superconvex_graph(draw):
    m = draw(st.integers(2, 4))
    pairs = [(u, w) for u in range(1, m + 1) for w in range(u + 1, m + 1)]
    weights = draw(st.lists(st.fractions(0, 2, max_denominator=4), min_size=len(pairs), max_size=len(pairs)))
    g = build_weighted([(u, w, h) for (u, w), h in zip(pairs, weights)], m)
    boost = []
    for u in range(1, m + 1):
        deficit = 1 - g.vertex_sum(u)
        if deficit > 0:
            boost.append(deficit)
    # raise every weight enough to make all vertex sums at least one
    lift = max(boost, default=0)
    return build_weighted([(u, w, h + lift) for (u, w), h in zip(pairs, weights)], m)


@settings(max_examples=30, deadline=None)
@given(superconvex_graph(), st.integers(2, 4))
def test_superconvex_visit_weight_nondecreasing(g, v):
    v = min(v, g.m)
    assert check_superconvex(g)
    seq = weighted_walk_series(g, v, 9).a_prime
    assert all(y >= x for x, y in zip(seq, seq[1:]))


def _identities_hold(bundle) -> bool:
    A, B, C, D = (bundle.series(k) for k in SEQUENCE_NAMES)
    A0, B0, C0, C1 = (bundle.series(k) for k in PRIMED_NAMES)
    n = bundle.N
    return (
        A == multiply(C, D)
        and multiply(B, 1 - C) == B.unit(n)
        and A0 == multiply(C0, D)
        and B == linear_combine(1, B0, 1, multiply(multiply(C0, C0), B))
        and C0 == multiply(B0, C1)
    )


@pytest.mark.parametrize("name", ["edge-half", "edge-i-half", "triangle", "path-equal", "square-complex"])
def test_generating_identities_on_transitive_battery(name):
    g, v = BATTERY[name]
    assert find_v_transitive_perm(g, v) is not None
    assert _identities_hold(weighted_walk_series(g, v, 14))


def test_squared_identity_needs_transitivity():
    g, v = BATTERY["path-mixed"]
    assert find_v_transitive_perm(g, v) is None
    assert not _identities_hold(weighted_walk_series(g, v, 10))


@st.composite
def mirror_graph(draw):
    # weights symmetric under i -> m + 1 - i, so the reversal carries 1 to m
    m = draw(st.integers(2, 5))
    gauss = st.builds(
        GaussianRational, st.fractions(-1, 1, max_denominator=5), st.fractions(-1, 1, max_denominator=5)
    )
    edges = {}
    for u in range(1, m + 1):
        for w in range(u + 1, m + 1):
            key = frozenset((u, w))
            mirror = frozenset((m + 1 - u, m + 1 - w))
            if mirror in edges:
                edges[key] = edges[mirror]
            elif draw(st.booleans()):
                edges[key] = draw(gauss)
            else:
                edges[key] = 0
    return build_weighted([(min(k), max(k), h) for k, h in edges.items()], m)


@settings(max_examples=25, deadline=None)
@given(mirror_graph())
def test_generating_identities_under_mirror_symmetry(g):
    v = g.m
    assert check_v_transitive(g, v, list(range(v, 0, -1)))
    assert _identities_hold(weighted_walk_series(g, v, 9))


# --- lattice windows ------------------------------------------------------------

@pytest.mark.parametrize("d,radius,v", [(1, 10, (2,)), (2, 10, (1, 1)), (3, 6, (1, 0, 0))])
def test_lattice_window_matches_counts(d, radius, v):
    g, labels = lattice_window_graph(d, radius)
    bundle = weighted_walk_series(g, labels[v], radius)
    table = walk_table(d, v, radius)
    for name in SEQUENCE_NAMES + PRIMED_NAMES:
        exact = table.d_seq if name == "d" else getattr(table, name)
        assert [x * (2 * d) ** n for n, x in enumerate(getattr(bundle, name))] == list(exact), name


# --- theorem values -------------------------------------------------------------

def test_spectral_gauge_examples():
    assert spectral_radius_estimate(edge(F(1, 2))) == pytest.approx(0.5)
    assert spectral_radius_estimate(edge(I_HALF)) == pytest.approx(0.5)
    assert spectral_radius_estimate(triangle()) >= 1
    assert spectral_radius_estimate(path(F(1, 2), F(1, 2))) == pytest.approx(2**-0.5)


def test_general_value_edge_half():
    res = general_recurrence_value(edge(F(1, 2)), 100)
    assert res.status == "exists"
    assert abs(res.value - F(1, 2)) < F(1, 10**25)
    assert res.diagnostics["residual"] < 1e-10
    assert res.diagnostics["resolvent_B"] == pytest.approx(4 / 3)


def test_general_value_edge_i_half():
    res = general_recurrence_value(edge(I_HALF), 100)
    assert abs(complex(res.value) - (-(2 + 1j) / 10)) < 1e-10
    assert res.diagnostics["residual"] < 1e-10
    assert res.diagnostics["resolvent_D"] == pytest.approx((4 + 2j) / 5)


def test_general_value_divergence_and_undetermined():
    res = general_recurrence_value(edge(1), 30)
    assert res.status == "diverges" and res.diagnostics["c2"] == 1 and res.diagnostics["chain_holds"]
    res = general_recurrence_value(edge(GaussianRational(0, 1)), 30)
    assert res.status == "undetermined" and res.value is None


def test_partial_sums_agree_with_resolvent():
    g, v = BATTERY["path-long"]
    sums = resolvent_sums(g, 1.0, v)
    b = weighted_walk_series(g, v, 150)
    assert complex(sum(b.b, F(0))) == pytest.approx(sums["B"], abs=1e-12)
    assert complex(sum(b.b_prime, F(0))) == pytest.approx(sums["B0"], abs=1e-12)


def test_convex_limit_examples():
    res = convex_recurrence_limit(edge(1), 40)
    assert res.value is ONE
    res = convex_recurrence_limit(triangle(), 200)
    assert res.value is ONE and res.diagnostics["gap"] < 1e-3
    star = build_weighted([(1, 2, F(1, 2)), (1, 3, F(1, 2))])
    with pytest.raises(InputError):
        convex_recurrence_limit(star, 10)


def test_convex_complex_weight_is_undetermined():
    g = build_weighted([(1, 2, ["1/2", "1/2"]), (2, 3, ["1/2", "-1/2"]), (3, 4, ["1/2", "1/2"]), (1, 4, ["1/2", "-1/2"])])
    res = convex_recurrence_limit(g, 60)
    assert res.status == "undetermined"


def test_v_value_examples():
    res = v_recurrence_value(edge(F(1, 2)), 2, 100)
    assert res.branch == "+" and res.diagnostics["certified"]
    assert abs(res.value - 1) < F(1, 10**25)
    res = v_recurrence_value(edge(I_HALF), 2, 100)
    assert res.branch == "+" and res.diagnostics["distance"] < 1e-8
    res = v_recurrence_value(edge(1), 2, 40, mode="convex")
    assert res.value is ONE and res.diagnostics["a_prime_N"] == 1
    res = v_recurrence_value(triangle(), 3, 200, mode="convex")
    assert res.value is ONE and res.diagnostics["certified"]


def test_v_value_outside_component():
    g = build_weighted([(1, 2, F(1, 2)), (3, 4, F(1, 2))])
    res = v_recurrence_value(g, 3, 10, perm=[3, 4, 1, 2])
    assert res.value == 0


def test_v_value_errors():
    with pytest.raises(InputError):
        v_recurrence_value(edge(F(1, 2)), 1, 10)
    with pytest.raises(InputError, match="bijection"):
        v_recurrence_value(path(F(1, 2), F(1, 3)), 2, 10)
    with pytest.raises(InputError, match="convex"):
        v_recurrence_value(edge(F(1, 2)), 2, 10, mode="convex")
    with pytest.raises(InputError):
        v_recurrence_value(path(F(1, 2), F(1, 2)), 3, 10, perm=[3, 1, 2])


def test_abel_trend_for_recurrent_weight():
    report = abel_trend(triangle(), 2)
    assert report["F_B_increasing"] and report["ratio_decreasing"]
    assert report["rows"][-1]["ratio"] < 1e-3
