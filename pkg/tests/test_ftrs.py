from itertools import combinations

import networkx as nx
import pytest
from hypothesis import assume, given, settings, strategies as st

from errors import DecompositionError, PreconditionError
from ftrs import (
    anchored_pairs,
    build_anchored_ftrs,
    build_pair_ftrs,
    build_pairwise_ftrs_greedy,
    build_pairwise_ftrs_minimal,
    decompose_pair_ftrs,
)
from graph_core import DiGraph, reachable_from
from verify import is_minimal, verify_ftrs
from tests.strategies import digraphs, graphs_with_pairs, to_networkx

TWO_ROUTES = [(0, 1), (0, 3), (1, 2), (3, 2)]
THREE_ROUTES = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]
DIAMOND_CHORD = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)]
DIAMOND_TAIL = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]
# Two diamonds glued at the cut vertex 3.
FIGURE_EIGHT = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]


def _hub_instance(p):
    edges = [(i, 0) for i in range(1, p + 1)] + [(0, p + i) for i in range(1, p + 1)]
    pairs = [(i, p + i) for i in range(1, p + 1)]
    return DiGraph(2 * p + 1, edges), pairs


### ----------------------- Anchored FTRS ----------------------- ###
def test_anchored_pairs():
    assert anchored_pairs(3, 1, "out") == [(1, 0), (1, 2)]
    assert anchored_pairs(3, 1, "in") == [(0, 1), (2, 1)]
    with pytest.raises(ValueError):
        anchored_pairs(3, 1, "both")


@pytest.mark.parametrize(
    "n, edges, k, expected",
    [
        (4, [(0, 1), (0, 2), (1, 3)], 0, [(0, 1), (0, 2), (1, 3)]),
        (4, TWO_ROUTES, 1, sorted(TWO_ROUTES)),
        (4, DIAMOND_CHORD, 0, [(0, 1), (0, 2), (1, 3)]),
        # Failing (0, 2) leaves the chord as the only route to 2.
        (4, DIAMOND_CHORD, 1, sorted(DIAMOND_CHORD)),
    ],
)
def test_build_anchored_ftrs_examples(n, edges, k, expected):
    g = DiGraph(n, edges)

    result = build_anchored_ftrs(g, 0, "out", k)

    assert result.edges.edge_list() == expected
    assert result.preserver.verified
    assert result.preserver.provenance["reference_size"] == 2**k * n


def test_build_anchored_ftrs_in_direction():
    g = DiGraph(4, TWO_ROUTES)

    result = build_anchored_ftrs(g, 2, "in", 0)

    assert result.direction == "in"
    assert result.edges.edge_list() == [(0, 1), (1, 2), (3, 2)]


def test_build_anchored_ftrs_rejects_bad_input():
    g = DiGraph(3, [(0, 1)])

    with pytest.raises(PreconditionError):
        build_anchored_ftrs(g, 3, "out", 1)
    with pytest.raises(PreconditionError):
        build_anchored_ftrs(g, 0, "out", -1)
    with pytest.raises(ValueError):
        build_anchored_ftrs(g, 0, "sideways", 1)


@settings(deadline=None, max_examples=25)
@given(g=digraphs(min_n=2, max_n=4), data=st.data())
def test_anchored_ftrs_is_a_minimal_preserver(g, data):
    anchor = data.draw(st.integers(min_value=0, max_value=g.n - 1))
    direction = data.draw(st.sampled_from(["out", "in"]))
    k = data.draw(st.integers(min_value=0, max_value=1))
    pairs = anchored_pairs(g.n, anchor, direction)

    h = build_anchored_ftrs(g, anchor, direction, k).edges

    assert verify_ftrs(g, h, pairs, k).passed
    assert is_minimal(g, h, "ftrs", k, pairs).minimal


### ----------------------- Pairwise minimal 1-FTRS ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, pairs, expected",
    [
        (4, TWO_ROUTES, [], []),
        (3, [(0, 1), (1, 2)], [(0, 2)], [(0, 1), (1, 2)]),
        (5, THREE_ROUTES, [(0, 1)], [(0, 2), (0, 3), (2, 1), (3, 1)]),
        (3, [(0, 1), (1, 2)], [(2, 0), (1, 1)], []),
    ],
)
def test_build_pairwise_ftrs_minimal_examples(n, edges, pairs, expected):
    g = DiGraph(n, edges)

    preserver = build_pairwise_ftrs_minimal(g, pairs)

    assert preserver.subgraph.edge_list() == expected
    assert preserver.verified
    assert preserver.builder == "minimal"


@settings(deadline=None, max_examples=40)
@given(instance=graphs_with_pairs(max_n=5, max_pairs=3))
def test_pairwise_minimal_preserver_verifies_and_is_minimal(instance):
    g, pairs = instance

    preserver = build_pairwise_ftrs_minimal(g, pairs)

    assert verify_ftrs(g, preserver.subgraph, pairs, 1).passed
    assert is_minimal(g, preserver.subgraph, "ftrs", 1, pairs).minimal


### ----------------------- Two-path decomposition ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, t, expected_q, expected_q_tilde",
    [
        (3, [(0, 1), (1, 2)], 2, [(0, 1), (1, 2)], [(0, 1), (1, 2)]),
        (4, TWO_ROUTES, 2, [(0, 1), (1, 2)], [(0, 3), (3, 2)]),
        (5, DIAMOND_TAIL, 4, [(0, 1), (1, 3), (3, 4)], [(0, 2), (2, 3), (3, 4)]),
        (7, FIGURE_EIGHT, 6, [(0, 1), (1, 3), (3, 4), (4, 6)], [(0, 2), (2, 3), (3, 5), (5, 6)]),
    ],
)
def test_decompose_pair_ftrs_examples(n, edges, t, expected_q, expected_q_tilde):
    g = DiGraph(n, edges)

    q, q_tilde = decompose_pair_ftrs(g, 0, t)

    assert [g.edges[e] for e in q] == expected_q
    assert [g.edges[e] for e in q_tilde] == expected_q_tilde


def test_decompose_pair_ftrs_rejects_bad_input():
    g = DiGraph(5, THREE_ROUTES)

    with pytest.raises(DecompositionError):
        decompose_pair_ftrs(g, 0, 1)
    with pytest.raises(PreconditionError):
        decompose_pair_ftrs(g, 1, 0)
    with pytest.raises(PreconditionError):
        decompose_pair_ftrs(g, 0, 0)


def test_build_pair_ftrs_keeps_two_routes():
    g = DiGraph(5, THREE_ROUTES)

    pair_ftrs = build_pair_ftrs(g, 0, 1)

    assert pair_ftrs.pair == (0, 1)
    assert pair_ftrs.edges.m == 4
    q, q_tilde = pair_ftrs.paths
    assert set(q) | set(q_tilde) == set(pair_ftrs.edges.edge_ids())
    assert build_pair_ftrs(g, 1, 0).paths is None


def _minimal_cuts(graph, s, t, max_size):
    edges = list(graph.edges)
    cuts = []
    for size in range(1, max_size + 1):
        for cut in combinations(edges, size):
            if any(set(smaller) <= set(cut) for smaller in cuts):
                continue
            remaining = graph.copy()
            remaining.remove_edges_from(cut)
            if not nx.has_path(remaining, s, t):
                cuts.append(cut)
    return cuts


@settings(deadline=None, max_examples=60)
@given(g=digraphs(min_n=2, max_n=6))
def test_every_path_crosses_small_minimal_cuts_once(g):
    s, t = 0, g.n - 1
    assume(t in reachable_from(g, s))

    pair_ftrs = build_pair_ftrs(g, s, t)
    graph = to_networkx(pair_ftrs.edges)
    q, q_tilde = pair_ftrs.paths
    assert set(q) | set(q_tilde) == set(pair_ftrs.edges.edge_ids())

    for cut in _minimal_cuts(graph, s, t, 2):
        for path in nx.all_simple_edge_paths(graph, s, t):
            assert len(set(path) & set(cut)) == 1


### ----------------------- Greedy pairwise 1-FTRS ----------------------- ###
def test_greedy_without_pairs_is_empty():
    preserver = build_pairwise_ftrs_greedy(DiGraph(4, TWO_ROUTES), [])

    assert preserver.size == 0
    assert preserver.provenance["selected_vertices"] == []


def test_greedy_single_pair_selects_the_source():
    g = DiGraph(4, TWO_ROUTES)

    preserver = build_pairwise_ftrs_greedy(g, [(0, 2)])

    # Both paths contain 0 and 2, so the smaller one is selected first and no paths remain.
    assert preserver.provenance["selected_vertices"] == [0]
    assert preserver.provenance["remaining_paths"] == 0
    assert preserver.subgraph.edge_list() == sorted(TWO_ROUTES)
    assert preserver.verified


def test_greedy_selects_the_hub():
    g, pairs = _hub_instance(4)

    preserver = build_pairwise_ftrs_greedy(g, pairs)

    assert preserver.provenance["selected_vertices"] == [0]
    assert preserver.provenance["remaining_paths"] == 0
    assert preserver.provenance["threshold"] == 2.0
    assert preserver.size == g.m
    assert preserver.to_dict()["builder"] == "greedy"


def test_greedy_picks_the_smallest_frequent_vertex_first():
    # Two hubs: 0 lies on 4 collected paths, 1 on 6; both exceed sqrt(4) = 2.
    g = DiGraph(10, [(2, 0), (0, 3), (4, 0), (0, 1), (1, 5), (6, 1), (1, 7), (8, 1), (1, 9)])
    pairs = [(2, 3), (4, 5), (6, 7), (8, 9)]

    preserver = build_pairwise_ftrs_greedy(g, pairs)

    assert preserver.provenance["selected_vertices"] == [0, 1]
    assert preserver.provenance["remaining_paths"] == 0
    assert preserver.size == g.m
    assert preserver.verified


@settings(deadline=None, max_examples=20)
@given(instance=graphs_with_pairs(max_n=5, max_pairs=4))
def test_greedy_preserver_verifies(instance):
    g, pairs = instance

    preserver = build_pairwise_ftrs_greedy(g, pairs)

    assert preserver.verified
    assert verify_ftrs(g, preserver.subgraph, pairs, 1).passed
    assert len(preserver.provenance["selected_vertices"]) <= 2 * preserver.provenance["threshold"]
