from itertools import permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import discriminating_paths_by_enumeration, is_definite_discriminating, pds_by_paths
from conftest import cached_run
from golden import POSSIBLE_D_SEP_X
from strategies import poipgs

from fcirepair.engine import Phase, PdsQuery, RunConfig, Trace, ci_step_c
from fcirepair.fixtures import fixture
from fcirepair.graph_core import GraphError, build_including_path_graph, d_sep_set
from fcirepair.poipg import (
    ARROW,
    CIRCLE,
    TAIL,
    Mark,
    PdsVariant,
    Poipg,
    complete_unoriented,
    contradictions,
    directed_path_exists,
    edge_token,
    find_definite_discriminating_path,
    is_collider,
    is_definite_noncollider,
    iter_definite_discriminating_paths,
    parse_edge_token,
    possible_d_sep,
)


def graph(text):
    return Poipg.from_text(text)


def states_before(trace, predicate):
    """Graph states replayed up to each event matching ``predicate``."""
    events = list(trace)
    return [(ev, Trace(events[:i]).replay()) for i, ev in enumerate(events) if predicate(ev)]


def stage_c_graph(result):
    events = list(result.trace)
    return Trace(events[: events.index(Phase("D"))]).replay()


# -- marks and text -------------------------------------------------------


def test_mark_notation():
    assert [m.value for m in Mark] == ["-", "o", ">"]
    assert len(PdsVariant) == 3


@pytest.mark.parametrize("ma, mb", list(product(Mark, repeat=2)))
def test_edge_token_round_trip(ma, mb):
    assert parse_edge_token(edge_token(ma, mb)) == (ma, mb)


@pytest.mark.parametrize(
    "token, marks",
    [("-->", (TAIL, ARROW)), ("<->", (ARROW, ARROW)), ("o->", (CIRCLE, ARROW)),
     ("o-o", (CIRCLE, CIRCLE)), ("<-o", (ARROW, CIRCLE)), ("<--", (ARROW, TAIL))],
)
def test_edge_tokens(token, marks):
    assert parse_edge_token(token) == marks


@pytest.mark.parametrize("token", ["->", "<=>", "x-o", "o-x", "-o-"])
def test_bad_edge_tokens(token):
    with pytest.raises(ValueError):
        parse_edge_token(token)


@given(poipgs())
def test_text_round_trip(p):
    assert Poipg.from_text(p.to_text(), nodes=p.nodes) == p


def test_text_lists_isolated_nodes_and_constraints():
    p = graph("node D\nA o-o B\nB o-o C\nconstraint C B A")
    assert p.to_text() == "node D\nA o-o B\nB o-o C\nconstraint A B C\n"


def test_reversed_edge_lines_are_canonicalised():
    assert graph("B <-- A").to_text() == "A --> B\n"


def test_dot_uses_odot_for_circles():
    text = graph("A o-> B").to_dot()
    assert 'arrowtail=odot, arrowhead=normal' in text


# -- structure ------------------------------------------------------------


def test_complete_unoriented():
    p = complete_unoriented("ABC")
    assert p.num_edges() == 3
    assert all(ma is CIRCLE and mb is CIRCLE for _, _, ma, mb in p.edges())
    assert not p.constraints
    assert complete_unoriented(["A"]).num_edges() == 0
    assert complete_unoriented(fixture("network1").sorted_visible()).num_edges() == 300


def test_complete_unoriented_needs_a_node():
    with pytest.raises(GraphError):
        complete_unoriented([])


def test_constraint_is_symmetric_in_its_ends():
    p = graph("A o-o B\nB o-o C")
    assert p.add_constraint("C", "B", "A")
    assert not p.add_constraint("A", "B", "C")
    assert p.has_constraint("A", "B", "C") and p.has_constraint("C", "B", "A")


def test_constraint_needs_both_edges():
    with pytest.raises(GraphError):
        graph("A o-o B\nnode C").add_constraint("A", "B", "C")


def test_removing_an_edge_drops_its_constraints():
    p = graph("A o-o B\nB o-o C\nC o-o D\nconstraint A B C\nconstraint B C D")
    p.remove_edge("A", "B")
    assert p.constraints == {("B", "C", "D")}


def test_degenerate_triple_rejected():
    p = graph("A o-o B")
    with pytest.raises(GraphError):
        is_collider(p, "A", "B", "A")


def test_missing_edge_rejected():
    p = graph("A o-o B\nnode C")
    with pytest.raises(GraphError):
        is_definite_noncollider(p, "A", "B", "C")


# -- local predicates -----------------------------------------------------


def test_collider_examples(original1):
    assert not is_collider(graph("A o-o B\nB o-o C"), "A", "B", "C")
    assert is_collider(graph("A o-> B\nB <-o C"), "A", "B", "C")
    assert is_collider(stage_c_graph(original1), "T1", "R3", "X3")


def test_definite_noncollider_examples(original1):
    assert is_definite_noncollider(graph("A <-- B\nB o-o C"), "A", "B", "C")
    assert not is_definite_noncollider(graph("A o-> B\nB <-o C"), "A", "B", "C")
    final = original1.poipg
    assert final.has_constraint("S3", "X3", "P3")
    assert is_definite_noncollider(final, "S3", "X3", "P3")


@given(poipgs())
def test_contradiction_detector_fires_exactly_when_both_predicates_hold(p):
    both = set()
    for left, mid, right in p.constraints:
        if is_collider(p, left, mid, right) and is_definite_noncollider(p, left, mid, right):
            both.add((left, mid, right))
    assert set(contradictions(p)) == both


def test_directed_paths(original1):
    p = graph("A --> B\nB --> C")
    assert directed_path_exists(p, "A", "C")
    assert not directed_path_exists(p, "C", "A")
    q = graph("A <-> B")
    assert not directed_path_exists(q, "A", "B") and not directed_path_exists(q, "B", "A")
    c = stage_c_graph(original1)
    assert c.mark("Z1", "V1") is CIRCLE and c.mark("V1", "Z1") is ARROW
    assert not directed_path_exists(c, "V1", "Z1")


# -- Possible-D-Sep -------------------------------------------------------


def _queries(result):
    return states_before(result.trace, lambda ev: isinstance(ev, PdsQuery))


@pytest.mark.parametrize("pair", sorted(POSSIBLE_D_SEP_X))
def test_possible_d_sep_x_network1(original1, pair):
    a, b = pair
    states = [p for ev, p in _queries(original1) if (ev.a, ev.b) == pair]
    assert states, "pair never queried"
    assert possible_d_sep(states[0], a, b, "x") - {b} == POSSIBLE_D_SEP_X[pair]


def test_possible_d_sep_x_at_stage_c(original1):
    c = stage_c_graph(original1)
    assert possible_d_sep(c, "R3", "V3", PdsVariant.X) - {"V3"} == POSSIBLE_D_SEP_X[("R3", "V3")]


def test_x3_y3_state_has_both_removals(original1):
    states = [p for ev, p in _queries(original1) if (ev.a, ev.b) == ("X3", "Y3")]
    p = states[0]
    assert not p.adjacent("R3", "V3") and not p.adjacent("S3", "W3")


def test_isolated_node_has_empty_possible_d_sep():
    p = graph("node A\nB o-o C")
    for v in PdsVariant:
        assert possible_d_sep(p, "A", "B", v) == set()


def test_xdoubleprime_without_constraints_reaches_everything():
    p = graph("A o-o B\nB o-o C\nC o-o D\nD o-o A\nA o-o C\nD <-> E")
    assert possible_d_sep(p, "A", "B", "xdoubleprime") == {"B", "C", "D", "E"}


def test_b_is_reached_but_never_passed_through():
    p = graph("A o-o B\nB o-o C")
    for v in PdsVariant:
        assert "C" not in possible_d_sep(p, "A", "B", v)
    assert possible_d_sep(p, "A", "C", "xdoubleprime") == {"B", "C"}


def test_possible_d_sep_requires_distinct_known_nodes():
    p = graph("A o-o B")
    with pytest.raises(GraphError):
        possible_d_sep(p, "A", "A", "x")
    with pytest.raises(GraphError):
        possible_d_sep(p, "A", "Q", "x")


def _allowed(p, variant):
    if variant == "x":
        return lambda x, y, z: (p.mark(x, y) is ARROW and p.mark(z, y) is ARROW) or p.adjacent(x, z)
    return lambda x, y, z: not p.has_constraint(x, y, z)


@pytest.mark.parametrize("variant", ["x", "xdoubleprime"])
@given(p=poipgs(max_nodes=6))
def test_state_search_covers_every_simple_path(variant, p):
    for a, b in permutations(p.nodes, 2):
        assert possible_d_sep(p, a, b, variant) >= pds_by_paths(p, a, b, _allowed(p, variant))


@pytest.mark.parametrize("variant", ["x", "xdoubleprime"])
def test_state_search_equals_simple_paths_on_fixture_states(original1, variant):
    for ev, p in _queries(original1)[:40]:
        got = possible_d_sep(p, ev.a, ev.b, variant)
        assert got == pds_by_paths(p, ev.a, ev.b, _allowed(p, variant))


def test_state_search_follows_walks_past_simple_paths():
    # B-A-C is blocked, but the walk B-A-D-E-A-C enters A a second time
    p = graph("A o-o B\nA o-o C\nA o-o D\nA o-o E\nD o-o E\nconstraint B A C")
    allowed = _allowed(p, "xdoubleprime")
    assert "C" not in pds_by_paths(p, "B", "C", allowed)
    assert "C" in possible_d_sep(p, "B", "C", "xdoubleprime")


@given(poipgs(), st.data())
def test_xdoubleprime_monotone_under_constraint_removal(p, data):
    if not p.constraints:
        return
    drop = data.draw(st.sampled_from(sorted(p.constraints)))
    q = p.copy()
    q.constraints.discard(drop)
    for a, b in permutations(p.nodes, 2):
        assert possible_d_sep(q, a, b, "xdoubleprime") >= possible_d_sep(p, a, b, "xdoubleprime")


@given(poipgs())
def test_predicates_are_pure(p):
    before = p.to_text()
    for a, b in permutations(p.nodes, 2):
        for v in PdsVariant:
            assert possible_d_sep(p, a, b, v) == possible_d_sep(p, a, b, v)
    assert p.to_text() == before


def test_variant_x_ignores_second_endpoint(original1):
    c = stage_c_graph(original1)
    for a in c.nodes:
        results = {frozenset(possible_d_sep(c, a, b, "x")) for b in c.nodes if b != a}
        assert len(results) == 1, a


def test_variant_xprime_depends_on_second_endpoint(original1):
    c = stage_c_graph(original1)
    assert any(
        len({frozenset(possible_d_sep(c, a, b, "xprime") - {b}) for b in c.nodes if b != a}) > 1
        for a in c.nodes
    )


def test_xdoubleprime_contains_d_sep_on_corrected_queries(corrected1, network1):
    truth = build_including_path_graph(network1)
    for ev, p in _queries(corrected1):
        assert possible_d_sep(p, ev.a, ev.b, "xdoubleprime") >= d_sep_set(truth, ev.a, ev.b) - {ev.b}


# -- definite discriminating paths ---------------------------------------


def test_no_long_discriminating_path_without_arrowheads():
    # edges touching m are exempt from the arrowhead clause, so only the
    # three-node paths survive, and those never sit in a triangle
    p = graph("A o-o B\nB o-o C\nC o-o D\nD o-o E")
    for m in p.nodes:
        assert all(len(u) == 3 for u in iter_definite_discriminating_paths(p, m))
        assert iter_definite_discriminating_paths(p, m, triangle_only=True) == []
    assert iter_definite_discriminating_paths(p, "C") == [("B", "C", "D")]


def test_minimal_discriminating_path():
    p = graph("X o-> M\nM <-o Y")
    assert find_definite_discriminating_path(p, "M") == ("X", "M", "Y")


def test_four_node_discriminating_path():
    # X *-> V <-> M with V -> Y: V is a collider pointing into Y
    p = graph("X o-> V\nV <-> M\nV --> Y\nM o-o Y")
    path = find_definite_discriminating_path(p, "M")
    assert path == ("V", "M", "Y") or path == ("X", "V", "M", "Y")
    assert ("X", "V", "M", "Y") in iter_definite_discriminating_paths(p, "M")
    assert is_definite_discriminating(p, ["X", "V", "M", "Y"], "M")


def _stage_e_graphs(result):
    events = list(result.trace)
    before_e = Trace(events[: events.index(Phase("E"))]).replay()
    before_e.reset_marks()
    ci_step_c(before_e, result.sepsets)
    return [before_e, result.poipg]


@pytest.mark.parametrize("cfg", [RunConfig.original(), RunConfig.corrected()], ids=["original", "corrected"])
def test_discriminating_paths_match_enumeration_on_network1(cfg):
    result = cached_run("network1", cfg)
    for p in _stage_e_graphs(result):
        for m in p.nodes:
            got = {path for path in iter_definite_discriminating_paths(p, m, max_len=6) if len(path) <= 6}
            assert got == discriminating_paths_by_enumeration(p, m, 6), m


@given(poipgs(max_nodes=6))
def test_discriminating_paths_match_enumeration(p):
    for m in p.nodes:
        got = set(iter_definite_discriminating_paths(p, m))
        assert got == discriminating_paths_by_enumeration(p, m, len(p.nodes))
        for path in got:
            assert path[0] < path[-1]
