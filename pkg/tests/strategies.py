from hypothesis import strategies as st
import networkx as nx

from graph_core import DiGraph, GraphLike, as_subgraph


@st.composite
def digraphs(draw, min_n: int = 1, max_n: int = 6, max_m: int | None = None) -> DiGraph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    slots = [(u, v) for u in range(n) for v in range(n) if u != v]
    if not slots:
        return DiGraph(n)
    edges = draw(st.lists(st.sampled_from(slots), unique=True, max_size=max_m or len(slots)))
    return DiGraph(n, edges)


@st.composite
def strongly_connected_digraphs(draw, min_n: int = 2, max_n: int = 6, max_extra: int = 6) -> DiGraph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    cycle = draw(st.permutations(range(n)))
    edges = {(cycle[i], cycle[(i + 1) % n]) for i in range(n)}
    slots = [(u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in edges]
    if slots:
        edges.update(draw(st.lists(st.sampled_from(slots), unique=True, max_size=max_extra)))
    return DiGraph(n, edges)


@st.composite
def graphs_with_pairs(draw, max_n: int = 6, max_pairs: int = 4) -> tuple[DiGraph, list[tuple[int, int]]]:
    g = draw(digraphs(min_n=2, max_n=max_n))
    vertex = st.integers(min_value=0, max_value=g.n - 1)
    pairs = draw(st.lists(st.tuples(vertex, vertex), min_size=1, max_size=max_pairs))
    return g, pairs


@st.composite
def failure_sets(draw, g: DiGraph, max_size: int = 2) -> tuple[int, ...]:
    if g.m == 0:
        return ()
    ids = draw(st.lists(st.integers(min_value=0, max_value=g.m - 1), unique=True, max_size=max_size))
    return tuple(sorted(ids))


def to_networkx(g: GraphLike, removed=()) -> nx.DiGraph:
    view = as_subgraph(g).without(removed)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(view.n))
    graph.add_edges_from(view.edge_list())
    return graph


def nx_partition(g: GraphLike, removed=()) -> set[frozenset[int]]:
    return {frozenset(c) for c in nx.strongly_connected_components(to_networkx(g, removed))}
