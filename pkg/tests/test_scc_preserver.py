import pytest
from hypothesis import given, settings, strategies as st

from errors import EnumerationBudgetError, InvalidOrderError, PreconditionError
from graph_core import DiGraph, scc_decompose
from scc_preserver import (
    OrderedList,
    ProcedureBParams,
    build_1ft_scc,
    build_certificate_preserver,
    build_connectivity_certificate,
    build_h0,
    build_kft_scc,
    build_procedure_b,
    derive_seed,
)
from verify import verify_connectivity_certificate, verify_scc_preserver
from tests.strategies import digraphs, strongly_connected_digraphs

CYCLE_3 = [(0, 1), (1, 2), (2, 0)]
PATH_3 = [(0, 1), (1, 2)]
BIDIRECTED_TRIANGLE = [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]
BIDIRECTED_SQUARE = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (3, 0), (0, 3)]


def _inner(view):
    return build_1ft_scc(view, certify=False)


### ----------------------- Fixtures ----------------------- ###
@pytest.fixture
def triangle():
    return DiGraph(3, BIDIRECTED_TRIANGLE)


@pytest.fixture
def square():
    return DiGraph(4, BIDIRECTED_SQUARE)


### ----------------------- Ordered lists and H0 ----------------------- ###
def test_ordered_list():
    assert OrderedList.by_decreasing_depth({0: 0, 1: 1, 2: 1, 3: 2}).order == (3, 1, 2, 0)
    assert len(OrderedList((1, 0))) == 2
    with pytest.raises(InvalidOrderError):
        OrderedList((0, 2))


@pytest.mark.parametrize(
    "n, edges, order, expected_size",
    [
        (3, CYCLE_3, (0, 1, 2), 3),
        (3, PATH_3, (2, 1, 0), 0),
        (3, PATH_3, (0, 1, 2), 0),
        (3, BIDIRECTED_TRIANGLE, (0, 1, 2), 4),
    ],
)
def test_build_h0_examples(n, edges, order, expected_size):
    assert build_h0(DiGraph(n, edges), order).m == expected_size


def test_build_h0_rejects_short_order():
    with pytest.raises(InvalidOrderError):
        build_h0(DiGraph(3, CYCLE_3), (0, 1))


@settings(deadline=None, max_examples=100)
@given(g=digraphs(max_n=7), data=st.data())
def test_build_h0_preserves_every_prefix(g, data):
    order = data.draw(st.permutations(range(g.n)))

    h0 = build_h0(g, order)

    assert h0.m <= 2 * g.n
    for i in range(1, g.n + 1):
        prefix = order[:i]
        assert scc_decompose(h0.induced(prefix)) == scc_decompose(g.full().induced(prefix))


### ----------------------- 0- and 1-FT-SCC preservers ----------------------- ###
@settings(deadline=None, max_examples=60)
@given(g=digraphs(max_n=7))
def test_certificate_preserver_is_exact(g):
    preserver = build_certificate_preserver(g)

    assert preserver.size <= 2 * g.n
    assert verify_scc_preserver(g, preserver.subgraph, 0).passed


@pytest.mark.parametrize(
    "n, edges, expected_size",
    [
        (3, CYCLE_3, 3),
        (1, [], 0),
        (3, PATH_3, 0),
    ],
)
def test_build_1ft_scc_examples(n, edges, expected_size):
    preserver = build_1ft_scc(DiGraph(n, edges))

    assert preserver.size == expected_size
    assert preserver.verified
    assert preserver.builder == "1ft-scc"


def test_build_1ft_scc_on_bidirected_square(square):
    preserver = build_1ft_scc(square)

    assert preserver.verified
    assert verify_scc_preserver(square, preserver.subgraph, 1).passed
    (component,) = preserver.provenance["components"]
    assert component["root"] == 0
    assert component["size"] == 4


def test_build_1ft_scc_whole_graph_keeps_condensation_links():
    g = DiGraph(5, [(0, 1), (1, 0), (1, 2), (0, 2), (2, 3), (3, 4), (4, 3)])

    plain = build_1ft_scc(g)
    whole = build_1ft_scc(g, whole_graph=True)

    assert plain.subgraph.edge_list() == [(0, 1), (1, 0), (3, 4), (4, 3)]
    assert whole.subgraph.edge_list() == [(0, 1), (0, 2), (1, 0), (2, 3), (3, 4), (4, 3)]


@settings(deadline=None, max_examples=150)
@given(g=digraphs(min_n=2, max_n=10, max_m=30))
def test_1ft_scc_preserver_verifies(g):
    preserver = build_1ft_scc(g, certify=False)

    assert verify_scc_preserver(g, preserver.subgraph, 1).passed


@settings(deadline=None, max_examples=150)
@given(g=strongly_connected_digraphs(min_n=2, max_n=10, max_extra=20))
def test_1ft_scc_preserver_verifies_on_strongly_connected_graphs(g):
    preserver = build_1ft_scc(g, certify=False)

    assert verify_scc_preserver(g, preserver.subgraph, 1).passed


@settings(deadline=None, max_examples=30)
@given(g=strongly_connected_digraphs(max_n=6))
def test_1ft_scc_preserver_is_linear_on_strongly_connected_graphs(g):
    preserver = build_1ft_scc(g)
    (component,) = preserver.provenance["components"]

    assert component["h0_out"] <= 2 * g.n
    assert component["h0_in"] <= 2 * g.n
    assert preserver.size <= component["h1"] + 4 * g.n


### ----------------------- Procedure B ----------------------- ###
@pytest.mark.parametrize(
    "n, expected",
    [
        (16, (45, 0.5, 12)),
        (1, (0, 1.0, 0)),
    ],
)
def test_procedure_b_params_resolve(n, expected):
    resolved = ProcedureBParams(k=1, r=1).resolve(n)

    assert (resolved.iterations, resolved.edge_sample_prob, resolved.anchor_count) == expected
    assert ProcedureBParams(k=1, iterations=3).resolve(n).iterations == 3


@pytest.mark.parametrize("n, expected_anchors", [(2, 1), (9, 7), (30, 19), (100, 47)])
def test_desk_constants_sample_fewer_anchors_than_vertices(n, expected_anchors):
    resolved = ProcedureBParams(k=1, r=1).resolve(n)

    assert resolved.anchor_count == expected_anchors
    assert resolved.anchor_count < n


@pytest.mark.parametrize(
    "kwargs",
    [
        {"k": -1},
        {"k": 1, "alpha": 1.5},
        {"k": 1, "edge_sample_prob": 2.0},
        {"k": 1, "anchor_count": -1},
        {"k": 1, "c_L": -1.0},
    ],
)
def test_procedure_b_params_validation(kwargs):
    with pytest.raises(ValueError):
        ProcedureBParams(**kwargs)


def test_procedure_b_with_all_anchors_alone_preserves(square):
    params = ProcedureBParams(k=1, r=0, iterations=0, anchor_count=square.n)

    preserver = build_procedure_b(square, params, _inner)

    assert preserver.provenance["anchors"] == [0, 1, 2, 3]
    assert preserver.provenance["h1_size"] == 0
    assert verify_scc_preserver(square, preserver.subgraph, 1).passed


def test_procedure_b_without_sampling_repeats_inner(square):
    params = ProcedureBParams(k=1, r=1, iterations=2, edge_sample_prob=0.0, anchor_count=0, seed=7)

    preserver = build_procedure_b(square, params, _inner)

    assert preserver.subgraph == _inner(square.full()).subgraph
    assert [r["sampled_edges"] for r in preserver.provenance["rounds"]] == [0, 0]
    assert preserver.provenance["anchors"] == []
    assert preserver.seed == 7


def test_procedure_b_is_seeded(square):
    params = ProcedureBParams(k=1, r=1, iterations=3, edge_sample_prob=0.5, anchor_count=1, seed=3)

    first = build_procedure_b(square, params, _inner)
    second = build_procedure_b(square, params, _inner)

    assert first.edge_ids() == second.edge_ids()
    assert first.provenance == second.provenance


def test_derive_seed():
    assert derive_seed(5, 0) == 5
    assert derive_seed(5, 1) == derive_seed(5, 1)
    assert derive_seed(5, 1) != derive_seed(5, 2)


### ----------------------- k-FT-SCC preservers ----------------------- ###
def test_build_kft_scc_delegates_budget_one(triangle):
    assert build_kft_scc(triangle, 1).builder == "1ft-scc"
    with pytest.raises(PreconditionError):
        build_kft_scc(triangle, 0)
    with pytest.raises(ValueError):
        build_kft_scc(triangle, 2, constants={"c_x": 1.0})


@pytest.mark.parametrize("n, edges", [(3, BIDIRECTED_TRIANGLE), (4, BIDIRECTED_SQUARE), (3, CYCLE_3)])
def test_build_kft_scc_two_failures(n, edges):
    g = DiGraph(n, edges)

    preserver = build_kft_scc(g, 2, seed=11)

    assert preserver.verified
    assert preserver.builder == "kft-scc"
    assert preserver.params["target_k"] == 2
    assert preserver.provenance["attempt_seeds"][0] == 11
    assert verify_scc_preserver(g, preserver.subgraph, 2).passed


@settings(deadline=None, max_examples=30)
@given(g=strongly_connected_digraphs(min_n=2, max_n=9, max_extra=15), seed=st.integers(min_value=0, max_value=2**16))
def test_kft_scc_preserver_verifies_against_two_failures(g, seed):
    preserver = build_kft_scc(g, 2, seed=seed)

    assert preserver.verified
    assert verify_scc_preserver(g, preserver.subgraph, 2).passed


def test_build_kft_scc_is_reproducible(square):
    first = build_kft_scc(square, 2, seed=4, certify=False)
    second = build_kft_scc(square, 2, seed=4, certify=False)

    assert first.verified is None
    assert first.edge_ids() == second.edge_ids()


def test_build_kft_scc_respects_enumeration_cap(triangle):
    with pytest.raises(EnumerationBudgetError):
        build_kft_scc(triangle, 2, cap=3)


### ----------------------- Connectivity certificates ----------------------- ###
@pytest.mark.parametrize(
    "k, vertex_mode",
    [
        (1, False),
        (2, False),
        (1, True),
        (2, True),
    ],
)
def test_build_connectivity_certificate(triangle, k, vertex_mode):
    preserver = build_connectivity_certificate(triangle, k, vertex_mode=vertex_mode)

    assert preserver.verified
    assert preserver.params == {"k": k, "vertex_mode": vertex_mode}
    assert verify_connectivity_certificate(triangle, preserver.subgraph, k, vertex_mode=vertex_mode).passed


def test_edge_connectivity_certificate_of_size_one_is_sparse(square):
    preserver = build_connectivity_certificate(square, 1)

    assert preserver.size == 6
    with pytest.raises(PreconditionError):
        build_connectivity_certificate(square, 0)


@settings(deadline=None, max_examples=40)
@given(g=digraphs(min_n=2, max_n=10, max_m=30), vertex_mode=st.booleans())
def test_one_failure_preserver_is_a_two_connectivity_certificate(g, vertex_mode):
    preserver = build_connectivity_certificate(g, 2, vertex_mode=vertex_mode, certify=False)

    assert verify_connectivity_certificate(g, preserver.subgraph, 2, vertex_mode=vertex_mode).passed


@settings(deadline=None, max_examples=15)
@given(g=digraphs(min_n=2, max_n=7, max_m=16), seed=st.integers(min_value=0, max_value=2**16))
def test_two_failure_preserver_is_a_three_edge_connectivity_certificate(g, seed):
    preserver = build_connectivity_certificate(g, 3, seed, certify=False)

    assert verify_connectivity_certificate(g, preserver.subgraph, 3).passed


@settings(deadline=None, max_examples=15)
@given(g=digraphs(min_n=2, max_n=5, max_m=10), seed=st.integers(min_value=0, max_value=2**16))
def test_split_graph_preserver_is_a_three_vertex_connectivity_certificate(g, seed):
    preserver = build_connectivity_certificate(g, 3, seed, vertex_mode=True, certify=False)

    assert preserver.provenance["split_vertices"] == 2 * g.n
    assert verify_connectivity_certificate(g, preserver.subgraph, 3, vertex_mode=True).passed
