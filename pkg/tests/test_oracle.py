from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import dsep_by_paths
from strategies import latent_dags

from fcirepair.fixtures import fixture
from fcirepair.graph_core import GraphError, LatentDag, d_separated
from fcirepair.oracle import IndependenceOracle, format_set


def test_counts_every_query():
    o = IndependenceOracle(fixture("collider3"))
    o.independent("A", "B")
    o.independent("B", "A", ["C"])
    assert o.queries == 2


def test_query_log_format():
    log = []
    o = IndependenceOracle(fixture("collider3"), log=log)
    o.independent("A", "B")
    o.independent("A", "B", {"C"})
    assert log == ["? A B {} -> yes", "? A B {C} -> no"]


def test_format_set_is_sorted():
    assert format_set({"b1", "Z3", "T1"}) == "{T1,Z3,b1}"


def test_network1_answers(network1):
    o = IndependenceOracle(network1)
    assert o.independent("B3", "S3")
    assert o.independent("X3", "Y3", {"R3", "S3", "Z3", "V3"})


def test_direct_edge_is_always_dependent():
    g = LatentDag("ABCD", (), [("A", "B"), ("C", "D")])
    o = IndependenceOracle(g)
    rest = ["C", "D"]
    for k in range(3):
        for s in combinations(rest, k):
            assert not o.independent("A", "B", s)


@pytest.mark.parametrize(
    "a, b, s, message",
    [
        ("A", "H", [], "hidden"),
        ("A", "B", ["H"], "hidden"),
        ("A", "B", ["A"], "conditioning"),
        ("A", "A", [], "distinct"),
        ("A", "Q", [], "unknown"),
    ],
)
def test_query_preconditions(a, b, s, message):
    g = LatentDag("AB", ["H"], [("H", "A"), ("H", "B")])
    with pytest.raises(GraphError, match=message):
        IndependenceOracle(g).independent(a, b, s)


@given(latent_dags(max_nodes=7), st.data())
def test_answers_match_d_separation_and_are_symmetric(g, data):
    vis = sorted(g.visible)
    if len(vis) < 2:
        return
    a, b = data.draw(st.permutations(vis))[:2]
    s = data.draw(st.sets(st.sampled_from([v for v in vis if v not in (a, b)] or ["-"])))
    s.discard("-")
    o = IndependenceOracle(g)
    ans = o.independent(a, b, s)
    assert ans == o.independent(b, a, s) == d_separated(g, a, b, s) == dsep_by_paths(g, a, b, s)
    assert o.queries == 2


# -- separator search -----------------------------------------------------


def naive_first(g, a, b, pool, size):
    for s in combinations(sorted(pool), size):
        if d_separated(g, a, b, s):
            return frozenset(s)
    return None


@given(latent_dags(max_nodes=8), st.data())
def test_reduced_search_equals_naive_enumeration(g, data):
    vis = sorted(g.visible)
    if len(vis) < 3:
        return
    a, b = data.draw(st.permutations(vis))[:2]
    pool = data.draw(st.sets(st.sampled_from([v for v in vis if v not in (a, b)]), min_size=1))
    o = IndependenceOracle(g)
    exists = any(
        d_separated(g, a, b, s) for k in range(len(pool) + 1) for s in combinations(pool, k)
    )
    assert o.any_separator_within(a, b, pool) == exists
    for size in range(len(pool) + 1):
        want = naive_first(g, a, b, pool, size)
        got = o.first_separator(a, b, pool, size)
        assert got == want
        if want is not None:
            break


def test_batched_search_counts_sequential_queries(network1):
    pool = sorted(network1.visible - {"X3", "Y3"})
    logged = IndependenceOracle(network1, log=[])
    batched = IndependenceOracle(network1)
    for size in range(5):
        found = logged.first_separator("X3", "Y3", pool, size)
        assert batched.first_separator("X3", "Y3", pool, size) == found
        assert logged.queries == batched.queries == len(logged.log)
    # the first four-node separator in lexicographic order
    assert found == {"B3", "R3", "S3", "V3"}


def test_separable_with_collider_has_no_witness():
    res = IndependenceOracle(fixture("collider3")).separable_with("A", "B", "C")
    assert not res.found and res.exhaustive


def test_separable_with_irrelevant_node():
    g = LatentDag("ABCD", (), [("A", "C"), ("B", "C")])
    res = IndependenceOracle(g).separable_with("A", "B", "D")
    assert res.witness == {"D"} and res.exhaustive


def test_separable_with_network1(network1):
    o = IndependenceOracle(network1)
    res = o.separable_with("R3", "V3", "X3")
    assert res.found and res.exhaustive
    assert "X3" in res.witness and o.independent("R3", "V3", res.witness)
    # the reference D-Sep set for this pair is not itself a separator
    assert not o.independent("R3", "V3", {"T1", "V1", "X3", "Z3", "b1"})


def test_bounded_search_reports_incompleteness():
    g = fixture("collider3")
    res = IndependenceOracle(g).separable_with("A", "B", "C", candidates=["C"], cap=2)
    assert not res.found and not res.exhaustive


def test_separable_with_rejects_endpoint():
    with pytest.raises(GraphError):
        IndependenceOracle(fixture("collider3")).separable_with("A", "B", "A")


@given(latent_dags(max_nodes=7), st.data())
def test_separable_with_exact_mode_matches_brute_force(g, data):
    vis = sorted(g.visible)
    if len(vis) < 3:
        return
    a, b, c = data.draw(st.permutations(vis))[:3]
    rest = [v for v in vis if v not in (a, b, c)]
    exists = any(
        d_separated(g, a, b, set(s) | {c}) for k in range(len(rest) + 1) for s in combinations(rest, k)
    )
    o = IndependenceOracle(g)
    res = o.separable_with(a, b, c)
    assert res.found == exists and res.exhaustive
    if res.found:
        assert c in res.witness and d_separated(g, a, b, res.witness)
    bounded = o.separable_with(a, b, c, candidates=vis, cap=len(vis))
    assert bounded.found == exists
    if bounded.found:
        assert c in bounded.witness and d_separated(g, a, b, bounded.witness)
