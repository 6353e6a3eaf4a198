"""
This module provides the directed-graph representation and the reachability and SCC primitives
consumed by every builder and verifier of the preservers toolkit.

Graphs are immutable. Edge ids are positions in the canonical `(tail, head)` ordering and never change;
subgraphs are edge masks over a shared parent, so failure views `H - F` are cheap to form.

Key functionalities:
    - `DiGraph`: immutable simple digraph with stable edge ids and out/in adjacency indices.
    - `Subgraph`: edge-mask view over a parent graph (failure, induced and union views).
    - `SccPartition`: canonical strong-connectivity partition with a first-difference witness.
    - Reachability, BFS paths and trees, cut edges and cut vertices.
    - Tarjan SCC decomposition, SCC certificates and vertex splitting.

Main dependencies:
    - `collections.deque`: for breadth-first search.
    - `errors`: a module from this project holding the exception hierarchy.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

from errors import GraphError, NotASubgraphError, NotStronglyConnectedError, PathConcatError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]
Pair = tuple[int, int]


### ----------------------- Graph types ----------------------- ###
class DiGraph:
    """
    An immutable simple directed graph on vertices `0..n-1`.

    Edges are stored sorted by `(tail, head)`; the position of an edge is its id.

    Attributes:
        - `n` (int): Number of vertices.
        - `edges` (tuple[Edge, ...]): Edges in canonical order, indexed by edge id.
        - `out_edges` (tuple[tuple[int, ...], ...]): Ascending ids of the edges leaving each vertex.
        - `in_edges` (tuple[tuple[int, ...], ...]): Ascending ids of the edges entering each vertex.

    Methods:
        - `m`: Number of edges.
        - `edge_id`: Looks up the id of edge `(tail, head)`.
        - `has_edge`: Checks whether `(tail, head)` is an edge.
        - `full`: Returns the subgraph keeping every edge.
        - `subgraph`: Returns the subgraph keeping the given edge ids.
    """

    def __init__(self, n: int, edges: Iterable[Edge] = ()) -> None:
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise GraphError(f"Vertex count must be a non-negative integer, got {n!r}")

        seen: set[Edge] = set()
        for edge in edges:
            tail, head = (int(x) for x in edge)
            if not (0 <= tail < n and 0 <= head < n):
                raise GraphError(f"Edge ({tail}, {head}) has a vertex outside 0..{n - 1}")
            if tail == head:
                raise GraphError(f"Self-loop at vertex {tail} is not allowed")
            if (tail, head) in seen:
                raise GraphError(f"Duplicate edge ({tail}, {head})")
            seen.add((tail, head))

        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(seen))
        self._ids = {edge: i for i, edge in enumerate(self.edges)}

        out_edges: list[list[int]] = [[] for _ in range(n)]
        in_edges: list[list[int]] = [[] for _ in range(n)]
        for i, (tail, head) in enumerate(self.edges):
            out_edges[tail].append(i)
            in_edges[head].append(i)
        self.out_edges = tuple(tuple(ids) for ids in out_edges)
        self.in_edges = tuple(tuple(ids) for ids in in_edges)
        self._hash = hash((n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_id(self, tail: int, head: int) -> int:
        try:
            return self._ids[(tail, head)]
        except KeyError:
            raise GraphError(f"({tail}, {head}) is not an edge of the graph") from None

    def has_edge(self, tail: int, head: int) -> bool:
        return (tail, head) in self._ids

    def full(self) -> "Subgraph":
        return Subgraph(self, frozenset(range(self.m)))

    def subgraph(self, edge_ids: Iterable[int]) -> "Subgraph":
        return Subgraph(self, frozenset(edge_ids))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DiGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Subgraph:
    """
    A spanning subgraph of `parent` given by the set of retained parent edge ids.

    The vertex set is always the parent's; edge ids are parent edge ids and are never re-indexed.

    Attributes:
        - `parent` (DiGraph): The graph this view is taken over.
        - `edge_mask` (frozenset[int]): Retained parent edge ids.
    """

    parent: DiGraph
    edge_mask: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not isinstance(self.edge_mask, frozenset):
            object.__setattr__(self, "edge_mask", frozenset(self.edge_mask))
        m = self.parent.m
        for e in self.edge_mask:
            if not (0 <= e < m):
                raise NotASubgraphError(f"Edge id {e} is not an edge of the parent graph (m={m})")

    @property
    def n(self) -> int:
        return self.parent.n

    @property
    def m(self) -> int:
        return len(self.edge_mask)

    def edge_ids(self) -> tuple[int, ...]:
        """Returns the retained edge ids in ascending order."""

        return tuple(sorted(self.edge_mask))

    def edge_list(self) -> list[Edge]:
        return [self.parent.edges[e] for e in self.edge_ids()]

    def without(self, failed: Iterable[int]) -> "Subgraph":
        return Subgraph(self.parent, self.edge_mask.difference(failed))

    def without_vertices(self, vertices: Iterable[int]) -> "Subgraph":
        """Removes every edge incident to one of `vertices`; the vertex set itself is unchanged."""

        doomed = set(vertices)
        edges = self.parent.edges
        return Subgraph(
            self.parent,
            frozenset(e for e in self.edge_mask if edges[e][0] not in doomed and edges[e][1] not in doomed),
        )

    def induced(self, vertices: Iterable[int]) -> "Subgraph":
        """Keeps only the edges with both endpoints in `vertices` (the view `H[A]`)."""

        keep = set(vertices)
        edges = self.parent.edges
        return Subgraph(
            self.parent,
            frozenset(e for e in self.edge_mask if edges[e][0] in keep and edges[e][1] in keep),
        )

    def union(self, *others: "Subgraph") -> "Subgraph":
        mask = set(self.edge_mask)
        for other in others:
            _check_same_parent(self, other)
            mask.update(other.edge_mask)
        return Subgraph(self.parent, frozenset(mask))

    def issubset(self, other: "Subgraph") -> bool:
        return self.parent == other.parent and self.edge_mask <= other.edge_mask

    def induced_digraph(self, vertices: Iterable[int]) -> "InducedGraph":
        """
        Materializes `H[A]` as a standalone graph on local ids `0..|A|-1`.

        Local vertex `i` is the `i`-th smallest vertex of `A`; local edge `j` maps back to the
        parent edge `edge_map[j]`.

        Args:
            vertices (Iterable[int]): The vertex set `A`.

        Returns:
            InducedGraph: The local graph, the local-to-parent vertex list and the edge back map.
        """

        local_vertices = tuple(sorted(set(vertices)))
        local_id = {v: i for i, v in enumerate(local_vertices)}
        edges = self.parent.edges
        kept = [
            e for e in sorted(self.edge_mask) if edges[e][0] in local_id and edges[e][1] in local_id
        ]
        graph = DiGraph(len(local_vertices), [(local_id[edges[e][0]], local_id[edges[e][1]]) for e in kept])
        # Sorted parent ids of an induced edge set stay sorted under a monotone relabelling.
        return InducedGraph(graph, local_vertices, tuple(kept))

    def to_digraph(self) -> DiGraph:
        """Materializes the view; local edge `j` is the `j`-th smallest retained parent edge."""

        return DiGraph(self.parent.n, self.edge_list())

    def __repr__(self) -> str:
        return f"Subgraph(n={self.n}, edges={self.m} of {self.parent.m})"


class InducedGraph(NamedTuple):
    graph: DiGraph
    vertices: tuple[int, ...]
    edge_map: tuple[int, ...]


GraphLike = Union[DiGraph, Subgraph]


def as_subgraph(g: GraphLike) -> Subgraph:
    """Treats a `DiGraph` as the subgraph keeping all of its edges."""

    if isinstance(g, Subgraph):
        return g
    if isinstance(g, DiGraph):
        return g.full()
    raise TypeError(f"Expected DiGraph or Subgraph, got {type(g).__name__}")


def _check_same_parent(a: Subgraph, b: Subgraph) -> None:
    if a.parent != b.parent:
        raise NotASubgraphError("Subgraphs do not share the same parent graph")


def _resolve(g: GraphLike, removed: Iterable[int] = ()) -> tuple[DiGraph, frozenset[int] | None]:
    """Returns the parent graph and the active edge ids (None meaning every edge)."""

    if isinstance(g, Subgraph):
        parent, active = g.parent, g.edge_mask
    elif isinstance(g, DiGraph):
        parent, active = g, None
    else:
        raise TypeError(f"Expected DiGraph or Subgraph, got {type(g).__name__}")

    removed = frozenset(removed)
    if removed:
        base = active if active is not None else range(parent.m)
        active = frozenset(e for e in base if e not in removed)
    return parent, active


def _check_vertex(g: DiGraph, v: int) -> None:
    if not (0 <= v < g.n):
        raise GraphError(f"Vertex {v} is outside 0..{g.n - 1}")


### ----------------------- SCC partition ----------------------- ###
@dataclass(frozen=True)
class SccPartition:
    """
    The strongly connected components of a graph in canonical order.

    Component ids are assigned by ascending smallest contained vertex, so two partitions of the same
    vertex set are equal exactly when these objects compare equal.

    Attributes:
        - `component_of` (tuple[int, ...]): Component id of each vertex.
        - `components` (tuple[frozenset[int], ...]): Vertex set of each component.
    """

    component_of: tuple[int, ...]
    components: tuple[frozenset[int], ...]

    def same_component(self, u: int, v: int) -> bool:
        return self.component_of[u] == self.component_of[v]

    def non_singletons(self) -> list[frozenset[int]]:
        return [c for c in self.components if len(c) > 1]

    def first_difference(self, other: "SccPartition") -> int | None:
        """
        Returns the smallest vertex whose component differs between the two partitions, or None.

        Args:
            other (SccPartition): A partition of the same vertex set.
        """

        if len(self.component_of) != len(other.component_of):
            raise GraphError("Partitions are over different vertex sets")
        for v in range(len(self.component_of)):
            if self.components[self.component_of[v]] != other.components[other.component_of[v]]:
                return v
        return None

    def describe_difference(self, other: "SccPartition") -> dict | None:
        """Returns a JSON-friendly witness for the first difference, or None when equal."""

        v = self.first_difference(other)
        if v is None:
            return None
        return {
            "vertex": v,
            "expected_component": sorted(self.components[self.component_of[v]]),
            "actual_component": sorted(other.components[other.component_of[v]]),
        }


### ----------------------- Traversals ----------------------- ###
def reachable_from(
    g: GraphLike, s: int, reverse: bool = False, removed: Iterable[int] = ()
) -> frozenset[int]:
    """
    Returns every vertex reachable from `s` (including `s`).

    Args:
        g (GraphLike): Graph or subgraph view.
        s (int): Start vertex.
        reverse (bool): Traverse the reverse graph `G^R`, i.e. return the vertices that reach `s`.
        removed (Iterable[int]): Edge ids treated as failed.

    Returns:
        frozenset[int]: The reachable vertex set.
    """

    parent, active = _resolve(g, removed)
    _check_vertex(parent, s)
    adjacency = parent.in_edges if reverse else parent.out_edges
    end = 0 if reverse else 1
    edges = parent.edges

    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in adjacency[u]:
            if active is not None and e not in active:
                continue
            w = edges[e][end]
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


class BfsTree(NamedTuple):
    root: int
    parent_edge: dict[int, int]
    depth: dict[int, int]
    order: tuple[int, ...]

    def edge_ids(self) -> frozenset[int]:
        return frozenset(self.parent_edge.values())


def bfs_tree(g: GraphLike, s: int, reverse: bool = False, removed: Iterable[int] = ()) -> BfsTree:
    """
    Builds the BFS tree from `s`, exploring edges in ascending edge-id order.

    With `reverse=True` the tree lives in `G^R`: `parent_edge[v]` is the edge leaving `v` towards the root.

    Returns:
        BfsTree: Root, tree edge per non-root vertex, BFS depth per reached vertex and discovery order.
    """

    parent, active = _resolve(g, removed)
    _check_vertex(parent, s)
    adjacency = parent.in_edges if reverse else parent.out_edges
    end = 0 if reverse else 1
    edges = parent.edges

    parent_edge: dict[int, int] = {}
    depth = {s: 0}
    order = [s]
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in adjacency[u]:
            if active is not None and e not in active:
                continue
            w = edges[e][end]
            if w not in depth:
                depth[w] = depth[u] + 1
                parent_edge[w] = e
                order.append(w)
                queue.append(w)
    return BfsTree(s, parent_edge, depth, tuple(order))


def find_path(g: GraphLike, s: int, t: int, removed: Iterable[int] = ()) -> list[int] | None:
    """
    Returns a shortest `s -> t` path as a list of edge ids, or None when `t` is unreachable.

    The path is the BFS-tree path, so among shortest paths it prefers the lowest edge ids.
    """

    tree = bfs_tree(g, s, removed=removed)
    _check_vertex(parent_graph(g), t)
    if t not in tree.depth:
        return None
    path = []
    v = t
    edges = parent_graph(g).edges
    while v != s:
        e = tree.parent_edge[v]
        path.append(e)
        v = edges[e][0]
    path.reverse()
    return path


def parent_graph(g: GraphLike) -> DiGraph:
    """Returns the underlying `DiGraph` of a graph or subgraph view."""

    return g.parent if isinstance(g, Subgraph) else g


def path_vertices(g: GraphLike, path: Sequence[int], start: int) -> tuple[int, ...]:
    """Converts an edge-id path starting at `start` into its vertex sequence."""

    edges = parent_graph(g).edges
    vertices = [start]
    for e in path:
        tail, head = edges[e]
        if tail != vertices[-1]:
            raise PathConcatError(f"Edge {e} = ({tail}, {head}) does not continue a path ending at {vertices[-1]}")
        vertices.append(head)
    return tuple(vertices)


def cut_edges(g: GraphLike, s: int, t: int) -> frozenset[int]:
    """
    Returns the `(s,t)`-cut edges: edges whose single removal makes `t` unreachable from `s`.

    Every such edge lies on every `s -> t` path, so only the edges of one BFS path are tested.
    Empty when `t` is unreachable from `s` or `s == t`.
    """

    if s == t:
        return frozenset()
    path = find_path(g, s, t)
    if path is None:
        return frozenset()
    return frozenset(e for e in path if t not in reachable_from(g, s, removed=(e,)))


def cut_vertices(g: GraphLike, s: int, t: int) -> frozenset[int]:
    """Returns the vertices other than `s`, `t` whose removal makes `t` unreachable from `s`."""

    if s == t:
        return frozenset()
    path = find_path(g, s, t)
    if path is None:
        return frozenset()
    view = as_subgraph(g)
    inner = path_vertices(g, path, s)[1:-1]
    return frozenset(v for v in inner if t not in reachable_from(view.without_vertices((v,)), s))


### ----------------------- SCC machinery ----------------------- ###
def scc_decompose(g: GraphLike, removed: Iterable[int] = ()) -> SccPartition:
    """
    Computes the strongly connected components with an iterative Tarjan traversal.

    Args:
        g (GraphLike): Graph or subgraph view.
        removed (Iterable[int]): Edge ids treated as failed.

    Returns:
        SccPartition: Components numbered by ascending smallest vertex.
    """

    parent, active = _resolve(g, removed)
    n = parent.n
    edges = parent.edges
    out_edges = parent.out_edges

    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    found: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, 0)]

        while work:
            v, pos = work[-1]
            out = out_edges[v]
            descended = False
            while pos < len(out):
                e = out[pos]
                pos += 1
                if active is not None and e not in active:
                    continue
                w = edges[e][1]
                if index[w] == -1:
                    work[-1] = (v, pos)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue

            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                found.append(component)

    components = sorted((frozenset(c) for c in found), key=min)
    component_of = [0] * n
    for cid, component in enumerate(components):
        for v in component:
            component_of[v] = cid
    return SccPartition(tuple(component_of), tuple(components))


def certificate(c: Iterable[int], g: GraphLike) -> frozenset[int]:
    """
    Returns `cert(C, H)`: an out-tree plus an in-tree spanning `c` inside `g[c]`, rooted at `min(c)`.

    Args:
        c (Iterable[int]): Vertex set expected to be strongly connected in `g`.
        g (GraphLike): Graph or subgraph view.

    Returns:
        frozenset[int]: Parent edge ids; at most `2(|c| - 1)` of them.

    Raises:
        NotStronglyConnectedError: If `c` is not strongly connected in `g[c]`.
    """

    component = frozenset(c)
    if not component:
        raise NotStronglyConnectedError("Empty vertex set has no certificate")
    parent = parent_graph(g)
    for v in component:
        _check_vertex(parent, v)
    if len(component) == 1:
        return frozenset()

    view = as_subgraph(g).induced(component)
    root = min(component)
    out_tree = bfs_tree(view, root)
    in_tree = bfs_tree(view, root, reverse=True)
    if len(out_tree.depth) != len(component) or len(in_tree.depth) != len(component):
        raise NotStronglyConnectedError(
            f"Vertex set of size {len(component)} rooted at {root} is not strongly connected"
        )
    return out_tree.edge_ids() | in_tree.edge_ids()


### ----------------------- Vertex splitting ----------------------- ###
@dataclass(frozen=True)
class SplitMap:
    """
    Id maps between a graph and its vertex-split graph.

    Attributes:
        - `vertex_in` (tuple[int, ...]): Split vertex receiving the in-edges of each original vertex.
        - `vertex_out` (tuple[int, ...]): Split vertex emitting the out-edges of each original vertex.
        - `original_vertex` (tuple[int, ...]): Original vertex of each split vertex.
        - `gadget_edge` (dict[int, int]): Split edge `(v_in, v_out)` of each non-protected vertex.
        - `edge_map` (dict[int, int]): Split edge id of each original (active) edge id.
    """

    vertex_in: tuple[int, ...]
    vertex_out: tuple[int, ...]
    original_vertex: tuple[int, ...]
    gadget_edge: dict[int, int]
    edge_map: dict[int, int]

    def original_edge(self) -> dict[int, int]:
        """Returns the inverse of `edge_map` (gadget edges have no preimage)."""

        return {split: original for original, split in self.edge_map.items()}


def split_vertices(g: GraphLike, protected: Iterable[int] = ()) -> tuple[DiGraph, SplitMap]:
    """
    Splits every non-protected vertex `v` into `v_in -> v_out`.

    In-edges of `v` enter `v_in` and out-edges leave `v_out`, so failing the gadget edge of `v`
    in the split graph is the same as failing vertex `v` in the original.

    Args:
        g (GraphLike): Graph or subgraph view; only its active edges are carried over.
        protected (Iterable[int]): Vertices kept whole.

    Returns:
        tuple[DiGraph, SplitMap]: The split graph and the id maps.
    """

    parent, active = _resolve(g)
    keep_whole = set(protected)
    for v in keep_whole:
        _check_vertex(parent, v)

    vertex_in: list[int] = []
    vertex_out: list[int] = []
    original_vertex: list[int] = []
    for v in range(parent.n):
        vertex_in.append(len(original_vertex))
        original_vertex.append(v)
        if v not in keep_whole:
            original_vertex.append(v)
        vertex_out.append(len(original_vertex) - 1)

    edge_ids = range(parent.m) if active is None else sorted(active)
    original_edges = {e: (vertex_out[parent.edges[e][0]], vertex_in[parent.edges[e][1]]) for e in edge_ids}
    gadgets = {v: (vertex_in[v], vertex_out[v]) for v in range(parent.n) if v not in keep_whole}

    split = DiGraph(len(original_vertex), list(original_edges.values()) + list(gadgets.values()))
    split_map = SplitMap(
        vertex_in=tuple(vertex_in),
        vertex_out=tuple(vertex_out),
        original_vertex=tuple(original_vertex),
        gadget_edge={v: split.edge_id(*edge) for v, edge in gadgets.items()},
        edge_map={e: split.edge_id(*edge) for e, edge in original_edges.items()},
    )
    logger.debug(f"Split {parent.n} vertices into {split.n} ({len(keep_whole)} protected)")
    return split, split_map


### ----------------------- Paths and pairs ----------------------- ###
def concat_paths(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """
    Concatenates two vertex sequences `P ∘ Q`.

    Raises:
        PathConcatError: If either path is empty or the last vertex of `p` is not the first of `q`.
    """

    if not p or not q:
        raise PathConcatError("Cannot concatenate an empty path")
    if p[-1] != q[0]:
        raise PathConcatError(f"Path ending at {p[-1]} cannot be joined to a path starting at {q[0]}")
    return tuple(p) + tuple(q[1:])


def normalize_pairs(pairs: Iterable[Pair], n: int) -> tuple[Pair, ...]:
    """Validates vertex ids and drops repeated pairs, keeping first-seen order."""

    result: dict[Pair, None] = {}
    for pair in pairs:
        s, t = (int(x) for x in pair)
        if not (0 <= s < n and 0 <= t < n):
            raise GraphError(f"Pair ({s}, {t}) has a vertex outside 0..{n - 1}")
        result.setdefault((s, t), None)
    return tuple(result)
