"""
This module provides generators and checkers for the lower-bound instance families of the preservers toolkit.

Key functionalities:
    - `gen_appendix_a`: binary-tree instance on which every k-FT-SCC preserver keeps every edge.
    - `check_appendix_a_forcing`: certifies that every edge of such an instance is critical.
    - `gen_base_disjoint_paths` / `check_base_properties`: base pair instances with unique, equal-length,
      edge-disjoint shortest paths whose union is the whole graph.
    - `gen_dual_failure_graph`: layered digraph on which dual-fault-tolerant pairwise preservers are dense.
    - `check_forced_paths`: certifies the forced path of every (pair, layer) under its dual failure.

Main dependencies:
    - `graph_core`: a module from this project providing BFS, paths and cut edges.
    - `verify`: a module from this project for the exhaustive criticality check and reports.
"""

import logging
from collections import deque
from dataclasses import dataclass

from errors import PreconditionError
from graph_core import DiGraph, Pair, as_subgraph, cut_edges, find_path, path_vertices, reachable_from
from verify import VerificationReport, make_counterexample, verify_scc_preserver

logger = logging.getLogger(__name__)


### ----------------------- Binary-tree family ----------------------- ###
@dataclass(frozen=True)
class AppendixAInstance:
    """
    A perfect binary out-tree of height `k` whose leaves all point to every vertex of `Y`,
    and every vertex of `Y` points back to the root.

    Attributes:
        - `graph` (DiGraph): The instance.
        - `k` (int): Tree height, which is also the failure budget it is built for.
        - `root` (int): The tree root (vertex 0).
        - `leaves` (tuple[int, ...]): The leaf set `X`, `|X| = 2^k`.
        - `y_vertices` (tuple[int, ...]): The vertex set `Y`.
    """

    graph: DiGraph
    k: int
    root: int
    leaves: tuple[int, ...]
    y_vertices: tuple[int, ...]


def gen_appendix_a(k: int, n_y: int) -> AppendixAInstance:
    """
    Generates the binary-tree instance with `2^(k+1) - 1 + n_y` vertices and
    `2^(k+1) - 2 + 2^k n_y + n_y` edges.

    Tree vertices are numbered in BFS order (children of `i` are `2i + 1`, `2i + 2`), followed by `Y`.

    Raises:
        PreconditionError: If `k < 1` or `n_y < 1`.
    """

    if k < 1 or n_y < 1:
        raise PreconditionError(f"Need k >= 1 and n_y >= 1, got k={k}, n_y={n_y}")

    tree_size = 2 ** (k + 1) - 1
    leaves = tuple(range(2**k - 1, tree_size))
    y_vertices = tuple(range(tree_size, tree_size + n_y))

    edges = [(i, child) for i in range(2**k - 1) for child in (2 * i + 1, 2 * i + 2)]
    edges += [(x, y) for x in leaves for y in y_vertices]
    edges += [(y, 0) for y in y_vertices]

    graph = DiGraph(tree_size + n_y, edges)
    logger.info(f"Generated binary-tree instance k={k}, n_y={n_y}: n={graph.n}, m={graph.m}")
    return AppendixAInstance(graph, k, 0, leaves, y_vertices)


def check_appendix_a_forcing(g: DiGraph, k: int, *, cap: int | None = None) -> VerificationReport:
    """
    Certifies that every edge of `g` is critical for k-FT-SCC preservation, i.e. that
    `verify_scc_preserver(g, g - e, k)` fails for every edge `e`.

    Args:
        g (DiGraph): The instance (typically from `gen_appendix_a`).
        k (int): Failure budget.
        cap (int | None): Enumeration cap.

    Returns:
        VerificationReport: Fails on the first non-critical edge; `details` lists all of them.
    """

    full = as_subgraph(g)
    non_critical = []
    checked = 0
    for e in full.edge_ids():
        report = verify_scc_preserver(full, full.without((e,)), k, cap=cap)
        checked += report.failure_sets_checked
        if report.passed:
            non_critical.append(e)

    details = {
        "edges": full.m,
        "critical_edges": full.m - len(non_critical),
        "non_critical_edges": [list(g.edges[e]) for e in non_critical],
    }
    counterexample = None
    if non_critical:
        first = non_critical[0]
        counterexample = make_counterexample(
            g, (), {"removable_edge": first, "edge": list(g.edges[first])}
        )
        logger.warning(f"{len(non_critical)} of {full.m} edges are not critical at k={k}")
    return VerificationReport(
        counterexample is None,
        "appendix-a-forcing",
        k,
        counterexample,
        failure_sets_checked=checked,
        details=details,
    )


### ----------------------- Base pair instances ----------------------- ###
@dataclass(frozen=True)
class BasePairInstance:
    """
    An undirected unweighted base graph with a pair set.

    Attributes:
        - `h` (DiGraph): The base graph, stored bidirected.
        - `pairs` (tuple[Pair, ...]): Pairs joined by unique shortest paths.
        - `common_length` (int): Length `L` shared by all those paths.
    """

    h: DiGraph
    pairs: tuple[Pair, ...]
    common_length: int

    def undirected_edges(self) -> set[frozenset[int]]:
        return {frozenset(edge) for edge in self.h.edges}


def gen_base_disjoint_paths(p: int, length: int) -> BasePairInstance:
    """
    Generates `p` vertex-disjoint undirected paths of `length` edges; pair `i` joins the ends of path `i`.

    Path `i` uses vertices `i (L + 1), ..., i (L + 1) + L`.
    """

    if p < 1 or length < 1:
        raise PreconditionError(f"Need p >= 1 and L >= 1, got p={p}, L={length}")

    edges = []
    pairs = []
    for i in range(p):
        first = i * (length + 1)
        for j in range(first, first + length):
            edges += [(j, j + 1), (j + 1, j)]
        pairs.append((first, first + length))
    return BasePairInstance(DiGraph(p * (length + 1), edges), tuple(pairs), length)


def _shortest_path_counts(h: DiGraph, s: int) -> tuple[dict[int, int], dict[int, int]]:
    distance = {s: 0}
    count = {s: 1}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for e in h.out_edges[u]:
            w = h.edges[e][1]
            if w not in distance:
                distance[w] = distance[u] + 1
                count[w] = count[u]
                queue.append(w)
            elif distance[w] == distance[u] + 1:
                count[w] += count[u]
    return distance, count


def check_base_properties(inst: BasePairInstance) -> VerificationReport:
    """
    Checks the four base-instance properties by BFS.

    Checked properties:
        - the base graph is symmetric (a valid undirected graph);
        - each pair has a unique shortest path, of length exactly `L`;
        - those paths are pairwise edge-disjoint;
        - their union is the whole edge set.

    Returns:
        VerificationReport: Fails with the first violated property in the order above.
    """

    h = inst.h

    def failure(witness: dict) -> VerificationReport:
        logger.warning(f"Base instance violates {witness['property']}")
        return VerificationReport(
            False, "base-properties", 0, make_counterexample(h, (), witness), details={"pairs": len(inst.pairs)}
        )

    for tail, head in h.edges:
        if not h.has_edge(head, tail):
            return failure({"property": "symmetry", "edge": [tail, head]})

    owner: dict[frozenset[int], int] = {}
    for index, (s, t) in enumerate(inst.pairs):
        distance, count = _shortest_path_counts(h, s)
        if distance.get(t) != inst.common_length:
            return failure(
                {"property": "common-length", "pair": [s, t], "distance": distance.get(t), "expected": inst.common_length}
            )
        if count[t] != 1:
            return failure({"property": "unique-shortest-path", "pair": [s, t], "shortest_paths": count[t]})

        path = find_path(h, s, t)
        vertices = path_vertices(h, path, s)
        for u, v in zip(vertices, vertices[1:]):
            edge = frozenset((u, v))
            if edge in owner:
                return failure(
                    {"property": "edge-disjoint", "pair": [s, t], "edge": [u, v], "shared_with": list(inst.pairs[owner[edge]])}
                )
            owner[edge] = index

    uncovered = inst.undirected_edges() - set(owner)
    if uncovered:
        edge = sorted(sorted(e) for e in uncovered)[0]
        return failure({"property": "coverage", "edge": edge, "uncovered_edges": len(uncovered)})

    return VerificationReport(
        True, "base-properties", 0, details={"pairs": len(inst.pairs), "covered_edges": len(owner)}
    )


### ----------------------- Layered dual-failure family ----------------------- ###
@dataclass(frozen=True)
class LayeredInstance:
    """
    The layered digraph built from a base pair instance.

    Vertex ids: copy `u_i` is `u * 2K + i - 1`; the left chains follow all copies, then the right
    chains, then the terminals `s_j = T + 2j`, `t_j = T + 2j + 1` of base pair `j`.

    Attributes:
        - `g` (DiGraph): The layered graph.
        - `pairs` (tuple[Pair, ...]): The terminal pairs `(s_{x,y}, t_{x,y})`, in base pair order.
        - `K` (int): Layer parameter; every base vertex gets `2K` copies.
        - `base_n` (int): Number of base vertices.
        - `base_edges` (int): Number of undirected base edges.
        - `base_pairs` (tuple[Pair, ...]): The base pairs.
    """

    g: DiGraph
    pairs: tuple[Pair, ...]
    K: int
    base_n: int
    base_edges: int
    base_pairs: tuple[Pair, ...]

    @property
    def layers(self) -> int:
        return 2 * self.K

    def copy(self, u: int, i: int) -> int:
        self._check_index(i)
        return u * self.layers + i - 1

    def left(self, u: int, i: int) -> int:
        self._check_index(i)
        return self.base_n * self.layers + u * self.layers + i - 1

    def right(self, u: int, i: int) -> int:
        self._check_index(i)
        return 2 * self.base_n * self.layers + u * self.layers + i - 1

    def terminals(self, j: int) -> Pair:
        first = 3 * self.base_n * self.layers
        return first + 2 * j, first + 2 * j + 1

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.layers:
            raise IndexError(f"Layer index {i} outside 1..{self.layers}")

    def expected_vertex_count(self) -> int:
        return 2 * len(self.base_pairs) + 2 * self.K * self.base_n + 4 * self.K * self.base_n

    def expected_edge_count(self) -> int:
        layers = self.layers
        return (
            2 * (layers - 1) * self.base_edges
            + self.base_n * (2 * (layers - 1) + 2 * layers)
            + 4 * len(self.base_pairs)
        )

    def forced_window(self, length: int) -> range:
        """Layer indices `i` whose forced path fits the chains: `1 <= i <= min(K, 2K - L)`."""

        return range(1, min(self.K, self.layers - length) + 1)


def gen_dual_failure_graph(inst: BasePairInstance, K: int) -> LayeredInstance:
    """
    Builds the layered digraph of a base pair instance.

    Every base vertex gets copies `u_1..u_2K`; every base edge `{u, v}` gives `u_i -> v_{i-1}` and
    `v_i -> u_{i-1}` for `i >= 2`; every base vertex gets a left chain feeding its copies and a right
    chain fed by them; every base pair `(x, y)` gets terminals `s -> x_left,1`, `s -> y_right,1`,
    `x_left,2K -> t`, `y_right,2K -> t`.

    Args:
        inst (BasePairInstance): The base instance.
        K (int): Layer parameter, at least 1.

    Returns:
        LayeredInstance: The layered instance; the structural counts are checked before returning.
    """

    if K < 1:
        raise PreconditionError(f"Layer parameter K must be at least 1, got {K}")
    if K < inst.common_length:
        logger.warning(
            f"K={K} is below the path length L={inst.common_length}; the forced window shrinks to "
            f"1..{max(0, 2 * K - inst.common_length)}"
        )

    base = inst.h
    undirected = sorted(tuple(sorted(e)) for e in inst.undirected_edges())
    layout = LayeredInstance(
        DiGraph(0), (), K, base.n, len(undirected), tuple(inst.pairs)
    )
    layers = layout.layers

    edges: list[tuple[int, int]] = []
    for u, v in undirected:
        for i in range(2, layers + 1):
            edges.append((layout.copy(u, i), layout.copy(v, i - 1)))
            edges.append((layout.copy(v, i), layout.copy(u, i - 1)))
    for v in range(base.n):
        for i in range(1, layers):
            edges.append((layout.left(v, i), layout.left(v, i + 1)))
            edges.append((layout.right(v, i), layout.right(v, i + 1)))
        for i in range(1, layers + 1):
            edges.append((layout.left(v, i), layout.copy(v, i)))
            edges.append((layout.copy(v, i), layout.right(v, i)))
    terminal_pairs = []
    for j, (x, y) in enumerate(inst.pairs):
        s, t = layout.terminals(j)
        edges += [(s, layout.left(x, 1)), (s, layout.right(y, 1)), (layout.left(x, layers), t), (layout.right(y, layers), t)]
        terminal_pairs.append((s, t))

    g = DiGraph(3 * base.n * layers + 2 * len(inst.pairs), edges)
    instance = LayeredInstance(g, tuple(terminal_pairs), K, base.n, len(undirected), tuple(inst.pairs))
    if g.n != instance.expected_vertex_count() or g.m != instance.expected_edge_count():
        raise PreconditionError("Layered instance does not match its structural counts")
    logger.info(f"Generated layered instance K={K}: n={g.n}, m={g.m}, pairs={len(terminal_pairs)}")
    return instance


def forced_path(li: LayeredInstance, inst: BasePairInstance, j: int, i: int) -> tuple[list[int], tuple[int, int]]:
    """
    Returns the predicted forced path of base pair `j` at layer `i` and the two failed edges.

    The path runs `s -> x_left,1..x_left,i+L -> x_{i+L} -> ... -> y_i -> y_right,i..y_right,2K -> t`.
    The source terminal stands in for `y_right,0` and the sink for `x_left,2K+1`, so the failures at
    the chain ends are `s -> y_right,1` and `x_left,2K -> t`.
    """

    g = li.g
    x, y = inst.pairs[j]
    s, t = li.terminals(j)
    length = inst.common_length
    top = i + length
    base_path = path_vertices(inst.h, find_path(inst.h, x, y), x)

    vertices = [s] + [li.left(x, a) for a in range(1, top + 1)]
    vertices += [li.copy(w, top - step) for step, w in enumerate(base_path)]
    vertices += [li.right(y, a) for a in range(i, li.layers + 1)] + [t]
    path = [g.edge_id(u, v) for u, v in zip(vertices, vertices[1:])]

    left_cut = (li.left(x, top), li.left(x, top + 1)) if top < li.layers else (li.left(x, li.layers), t)
    right_cut = (li.right(y, i - 1), li.right(y, i)) if i > 1 else (s, li.right(y, 1))
    return path, (g.edge_id(*left_cut), g.edge_id(*right_cut))


def check_forced_paths(li: LayeredInstance, inst: BasePairInstance) -> VerificationReport:
    """
    Certifies the forced paths of the layered instance.

    For every base pair and every layer `i` in the forced window, the two designated chain edges are
    failed; then `t` must stay reachable from `s` and every edge of the predicted path must be an
    `(s,t)`-cut edge. The distinct anti-diagonal edges forced this way are counted and compared to
    `window * L * |P_H|`.

    Returns:
        VerificationReport: Fails on the first (pair, layer) whose path is not forced.
    """

    g = li.g
    full = as_subgraph(g)
    length = inst.common_length
    window = li.forced_window(length)
    first_copy_id, last_copy_id = 0, li.base_n * li.layers
    forced: set[int] = set()
    checked = 0

    for j, (s, t) in enumerate(li.pairs):
        for i in window:
            checked += 1
            path, failed = forced_path(li, inst, j, i)
            surviving = full.without(failed)
            if t not in reachable_from(surviving, s):
                reason = "unreachable"
            else:
                missing = set(path) - cut_edges(surviving, s, t)
                reason = None if not missing else "not-forced"
            if reason is not None:
                witness = {"pair": [s, t], "base_pair": list(inst.pairs[j]), "layer": i, "reason": reason}
                return VerificationReport(
                    False, "forced-paths", 2, make_counterexample(g, failed, witness), failure_sets_checked=checked
                )
            forced.update(
                e for e in path
                if first_copy_id <= g.edges[e][0] < last_copy_id and first_copy_id <= g.edges[e][1] < last_copy_id
            )

    expected = len(window) * length * len(li.pairs)
    details = {"forced_edges": len(forced), "expected_forced_edges": expected, "window": len(window)}
    if len(forced) != expected:
        witness = {"reason": "forced-edge-count", **details}
        return VerificationReport(
            False, "forced-paths", 2, make_counterexample(g, (), witness), failure_sets_checked=checked, details=details
        )
    logger.info(f"Forced {len(forced)} anti-diagonal edges over {checked} (pair, layer) queries")
    return VerificationReport(True, "forced-paths", 2, failure_sets_checked=checked, details=details)


def forced_edges(li: LayeredInstance, inst: BasePairInstance) -> list[int]:
    """Returns the sorted ids of all anti-diagonal edges on forced paths."""

    result: set[int] = set()
    last_copy_id = li.base_n * li.layers
    for j in range(len(li.pairs)):
        for i in li.forced_window(inst.common_length):
            path, _ = forced_path(li, inst, j, i)
            result.update(e for e in path if li.g.edges[e][0] < last_copy_id and li.g.edges[e][1] < last_copy_id)
    return sorted(result)
