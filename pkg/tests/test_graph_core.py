import pytest
import networkx as nx
from hypothesis import given, settings, strategies as st

from errors import GraphError, NotASubgraphError, NotStronglyConnectedError, PathConcatError
from graph_core import (
    DiGraph,
    Subgraph,
    bfs_tree,
    certificate,
    concat_paths,
    cut_edges,
    cut_vertices,
    find_path,
    normalize_pairs,
    path_vertices,
    reachable_from,
    scc_decompose,
    split_vertices,
)
from tests.strategies import digraphs, failure_sets, nx_partition, strongly_connected_digraphs, to_networkx

CYCLE_3 = [(0, 1), (1, 2), (2, 0)]
PATH_3 = [(0, 1), (1, 2)]
BIDIRECTED_TRIANGLE = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]
DIAMOND_TAIL = [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]


### ----------------------- Fixtures ----------------------- ###
@pytest.fixture
def diamond():
    return DiGraph(5, DIAMOND_TAIL)


### ----------------------- DiGraph and Subgraph ----------------------- ###
@pytest.mark.parametrize(
    "n, edges",
    [
        (-1, []),
        (2, [(0, 2)]),
        (2, [(1, 1)]),
        (2, [(0, 1), (0, 1)]),
    ],
)
def test_digraph_rejects_invalid_input(n, edges):
    with pytest.raises(GraphError):
        DiGraph(n, edges)


def test_digraph_edge_ids_follow_canonical_order():
    g = DiGraph(3, [(2, 0), (0, 2), (1, 0), (0, 1)])

    assert g.edges == ((0, 1), (0, 2), (1, 0), (2, 0))
    assert g.edge_id(1, 0) == 2
    assert g.out_edges[0] == (0, 1)
    assert g.in_edges[0] == (2, 3)
    assert g == DiGraph(3, [(0, 1), (0, 2), (1, 0), (2, 0)])
    with pytest.raises(GraphError):
        g.edge_id(1, 2)


def test_subgraph_keeps_parent_edge_ids():
    g = DiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    h = g.subgraph([1, 3])

    assert h.n == 4
    assert h.edge_ids() == (1, 3)
    assert h.edge_list() == [(1, 2), (3, 0)]
    assert h.without([3]).edge_ids() == (1,)
    assert h.union(g.subgraph([0])).edge_ids() == (0, 1, 3)
    assert h.issubset(g.full())
    with pytest.raises(NotASubgraphError):
        Subgraph(g, frozenset([4]))


def test_subgraph_views(diamond):
    full = diamond.full()

    assert full.induced([0, 1, 3]).edge_list() == [(0, 1), (1, 3)]
    assert full.without_vertices([3]).edge_list() == [(0, 1), (0, 2)]

    local = full.induced_digraph([1, 3, 4])
    assert local.vertices == (1, 3, 4)
    assert local.graph.edges == ((0, 1), (1, 2))
    assert [diamond.edges[e] for e in local.edge_map] == [(1, 3), (3, 4)]


def test_union_rejects_foreign_parent():
    with pytest.raises(NotASubgraphError):
        DiGraph(2, [(0, 1)]).full().union(DiGraph(2, [(1, 0)]).full())


### ----------------------- SCC decomposition ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, expected",
    [
        (3, CYCLE_3, [{0, 1, 2}]),
        (3, PATH_3, [{0}, {1}, {2}]),
        (4, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)], [{0, 1}, {2, 3}]),
        (0, [], []),
    ],
)
def test_scc_decompose_examples(n, edges, expected):
    partition = scc_decompose(DiGraph(n, edges))

    assert [set(c) for c in partition.components] == expected
    for cid, component in enumerate(partition.components):
        assert all(partition.component_of[v] == cid for v in component)


def test_scc_partition_first_difference():
    g = DiGraph(3, CYCLE_3)
    whole = scc_decompose(g)
    broken = scc_decompose(g, removed=[g.edge_id(2, 0)])

    assert whole.first_difference(whole) is None
    assert whole.first_difference(broken) == 0
    assert whole.describe_difference(broken) == {
        "vertex": 0,
        "expected_component": [0, 1, 2],
        "actual_component": [0],
    }


@settings(deadline=None, max_examples=150)
@given(data=st.data(), g=digraphs(max_n=8))
def test_scc_decompose_matches_networkx(data, g):
    removed = data.draw(failure_sets(g))

    partition = scc_decompose(g, removed=removed)

    assert set(partition.components) == nx_partition(g, removed)
    assert [min(c) for c in partition.components] == sorted(min(c) for c in partition.components)


### ----------------------- Traversals ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, s, reverse, expected",
    [
        (3, PATH_3, 0, False, {0, 1, 2}),
        (3, PATH_3, 2, False, {2}),
        (3, PATH_3, 2, True, {0, 1, 2}),
        (4, [(0, 1), (1, 0), (2, 3), (3, 2)], 0, False, {0, 1}),
    ],
)
def test_reachable_from_examples(n, edges, s, reverse, expected):
    assert reachable_from(DiGraph(n, edges), s, reverse=reverse) == expected


def test_reachable_from_rejects_bad_vertex():
    with pytest.raises(GraphError):
        reachable_from(DiGraph(2, [(0, 1)]), 2)


@settings(deadline=None, max_examples=100)
@given(g=digraphs(min_n=1, max_n=7), data=st.data())
def test_reachable_from_matches_networkx(g, data):
    s = data.draw(st.integers(min_value=0, max_value=g.n - 1))
    graph = to_networkx(g)

    assert reachable_from(g, s) == nx.descendants(graph, s) | {s}
    assert reachable_from(g, s, reverse=True) == nx.ancestors(graph, s) | {s}


def test_bfs_tree_and_find_path(diamond):
    tree = bfs_tree(diamond, 0)

    assert tree.depth == {0: 0, 1: 1, 2: 1, 3: 2, 4: 3}
    assert tree.order == (0, 1, 2, 3, 4)
    # 3 is reached through the lower-id edge (1, 3)
    assert diamond.edges[tree.parent_edge[3]] == (1, 3)

    path = find_path(diamond, 0, 4)
    assert path_vertices(diamond, path, 0) == (0, 1, 3, 4)
    assert find_path(diamond, 4, 0) is None
    assert find_path(diamond, 2, 2) == []


def test_path_vertices_rejects_broken_path(diamond):
    with pytest.raises(PathConcatError):
        path_vertices(diamond, [diamond.edge_id(0, 1), diamond.edge_id(2, 3)], 0)


### ----------------------- Cut edges ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, s, t, expected",
    [
        (3, PATH_3, 0, 2, {(0, 1), (1, 2)}),
        (3, [(0, 1), (1, 2), (0, 2)], 0, 2, set()),
        (5, DIAMOND_TAIL, 0, 4, {(3, 4)}),
        (3, PATH_3, 2, 0, set()),
        (3, PATH_3, 1, 1, set()),
    ],
)
def test_cut_edges_examples(n, edges, s, t, expected):
    g = DiGraph(n, edges)

    assert {g.edges[e] for e in cut_edges(g, s, t)} == expected


@settings(deadline=None, max_examples=100)
@given(g=digraphs(min_n=2, max_n=6), data=st.data())
def test_cut_edges_match_definition(g, data):
    s = data.draw(st.integers(min_value=0, max_value=g.n - 1))
    t = data.draw(st.integers(min_value=0, max_value=g.n - 1))

    by_definition = {
        e for e in range(g.m) if s != t and t in reachable_from(g, s) and t not in reachable_from(g, s, removed=[e])
    }

    assert cut_edges(g, s, t) == by_definition


def test_cut_vertices(diamond):
    assert cut_vertices(diamond, 0, 4) == {3}
    assert cut_vertices(diamond, 0, 3) == set()


### ----------------------- Certificates ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, component, expected_size",
    [
        (1, [], {0}, 0),
        (3, CYCLE_3, {0, 1, 2}, 3),
        (3, BIDIRECTED_TRIANGLE, {0, 1, 2}, 4),
    ],
)
def test_certificate_examples(n, edges, component, expected_size):
    g = DiGraph(n, edges)
    cert = certificate(component, g)

    assert len(cert) == expected_size
    assert len(cert) <= 2 * (len(component) - 1)


def test_certificate_rejects_non_component():
    with pytest.raises(NotStronglyConnectedError):
        certificate({0, 1, 2}, DiGraph(3, PATH_3))


@settings(deadline=None, max_examples=100)
@given(g=strongly_connected_digraphs(max_n=7))
def test_certificate_spans_component(g):
    cert = certificate(range(g.n), g)

    assert len(cert) <= 2 * (g.n - 1)
    assert len(scc_decompose(g.subgraph(cert)).components) == 1


### ----------------------- Vertex splitting ----------------------- ###
@pytest.mark.parametrize(
    "n, edges, expected_n, expected_m, expected_components",
    [
        (2, [(0, 1)], 4, 3, 4),
        (3, CYCLE_3, 6, 6, 1),
        (3, [], 6, 3, 6),
    ],
)
def test_split_vertices_examples(n, edges, expected_n, expected_m, expected_components):
    split, _ = split_vertices(DiGraph(n, edges))

    assert (split.n, split.m) == (expected_n, expected_m)
    assert len(scc_decompose(split).components) == expected_components


def test_split_vertices_keeps_protected_whole():
    split, split_map = split_vertices(DiGraph(3, PATH_3), protected=[0, 2])

    assert split.n == 4
    assert split_map.vertex_in[1] != split_map.vertex_out[1]
    assert split_map.vertex_in[0] == split_map.vertex_out[0]
    assert set(split_map.gadget_edge) == {1}
    assert split_map.original_edge()[split_map.edge_map[0]] == 0


@settings(deadline=None, max_examples=80)
@given(g=digraphs(min_n=2, max_n=6), data=st.data())
def test_split_vertices_reduces_vertex_failures(g, data):
    u = data.draw(st.integers(min_value=0, max_value=g.n - 1))
    others = [v for v in range(g.n) if v != u]
    failed = data.draw(st.sets(st.sampled_from(others), max_size=2))
    split, split_map = split_vertices(g)
    gadgets = [split_map.gadget_edge[w] for w in failed]

    reached = reachable_from(split, split_map.vertex_out[u], removed=gadgets)
    for v in range(g.n):
        if v in failed:
            continue
        expected = v in reachable_from(g.full().without_vertices(failed), u)
        assert (split_map.vertex_in[v] in reached or v == u) == expected


### ----------------------- Paths and pairs ----------------------- ###
@pytest.mark.parametrize(
    "p, q, expected",
    [
        ((0, 1), (1, 2), (0, 1, 2)),
        ((0,), (0, 1), (0, 1)),
        ((0, 1), (2, 3), None),
        ((), (0, 1), None),
    ],
)
def test_concat_paths(p, q, expected):
    if expected is None:
        with pytest.raises(PathConcatError):
            concat_paths(p, q)
    else:
        assert concat_paths(p, q) == expected


def test_normalize_pairs():
    assert normalize_pairs([(0, 1), (1, 0), (0, 1)], 2) == ((0, 1), (1, 0))
    with pytest.raises(GraphError):
        normalize_pairs([(0, 2)], 2)
