"""
This module provides the exhaustive failure-enumeration and flow-based oracles of the preservers toolkit.

Every builder certifies its output with these functions, and the test-suite uses them as ground truth.

Failure sets range over every `F ⊆ E(G)` with `|F| <= k`, ordered by size and then lexicographically by
sorted edge ids; the first counterexample in that order is the one reported.

Key functionalities:
    - `verify_ftrs`: reachability agreement of `G - F` and `H - F` on a pair set.
    - `verify_scc_preserver`: SCC-partition agreement of `G - F` and `H - F`.
    - `is_minimal`: checks that no single edge of a verified preserver can be dropped.
    - Unit-capacity augmenting-path flows for edge and vertex connectivity (Menger).
    - `verify_connectivity_certificate`: k-edge / k-vertex connectivity certificates.

Two enumeration strategies report identical counterexamples:
    - `"brute"` evaluates every failure set in the order above.
    - `"pruned"` (default) searches level by level and only extends a passing set `F` by edges of its
      witness structure in `H - F` (one BFS path per reachable pair, or the certificates of the SCCs).
      A failure set that misses the witness structure of one of its passing subsets behaves like that
      subset, so every minimal counterexample is reached through a chain of witness edges.

Main dependencies:
    - `math.comb` / `itertools.combinations`: for the enumeration budget and the brute-force order.
    - `graph_core`: a module from this project providing reachability and SCC primitives.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import settings
from errors import EnumerationBudgetError, NotASubgraphError, PreconditionError
from graph_core import (
    GraphLike,
    Pair,
    Subgraph,
    as_subgraph,
    bfs_tree,
    certificate,
    normalize_pairs,
    reachable_from,
    scc_decompose,
    split_vertices,
)

logger = logging.getLogger(__name__)

STRATEGIES = ("pruned", "brute")
MODES = ("ftrs", "scc")


### ----------------------- Reports ----------------------- ###
@dataclass(frozen=True)
class Counterexample:
    """
    A failure set under which `H` disagrees with `G`.

    Attributes:
        - `failure_set` (tuple[int, ...]): Failed parent edge ids, ascending.
        - `failed_edges` (tuple[tuple[int, int], ...]): The same edges as `(tail, head)` pairs.
        - `witness` (dict[str, Any]): The violated pair, or the first SCC-partition difference.
    """

    failure_set: tuple[int, ...]
    failed_edges: tuple[tuple[int, int], ...]
    witness: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "failure_set": list(self.failure_set),
            "failed_edges": [list(edge) for edge in self.failed_edges],
            "witness": self.witness,
        }


@dataclass
class VerificationReport:
    """
    Outcome of a verification or checker run.

    Attributes:
        - `passed` (bool): True iff no counterexample was found.
        - `mode` (str): What was verified (`ftrs`, `scc`, `cert`, or a checker name).
        - `k` (int): Failure budget.
        - `counterexample` (Counterexample | None): First counterexample in the enumeration order.
        - `failure_sets_checked` (int): Failure sets actually evaluated.
        - `failure_sets_total` (int): Failure sets in the full enumeration `sum_{j<=k} C(m, j)`.
        - `strategy` (str): Enumeration strategy used.
        - `details` (dict[str, Any]): Checker-specific statistics.
    """

    passed: bool
    mode: str
    k: int
    counterexample: Counterexample | None = None
    failure_sets_checked: int = 0
    failure_sets_total: int = 0
    strategy: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed != (self.counterexample is None):
            raise ValueError("A report passes exactly when it carries no counterexample")

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "mode": self.mode,
            "k": self.k,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
            "failure_sets_checked": self.failure_sets_checked,
            "failure_sets_total": self.failure_sets_total,
            "strategy": self.strategy,
            "details": self.details,
        }


def make_counterexample(g: GraphLike, failure_set: Iterable[int], witness: dict[str, Any]) -> Counterexample:
    """Builds a `Counterexample`, resolving edge ids to `(tail, head)` pairs."""

    parent = as_subgraph(g).parent
    ids = tuple(sorted(failure_set))
    return Counterexample(ids, tuple(parent.edges[e] for e in ids), witness)


### ----------------------- Enumeration ----------------------- ###
def enumeration_size(m: int, k: int) -> int:
    """Returns `sum_{j=0}^{min(k, m)} C(m, j)`, the number of failure sets with `|F| <= k`."""

    return sum(math.comb(m, j) for j in range(min(k, m) + 1))


def _check_budget(m: int, k: int, cap: int | None) -> int:
    if k < 0:
        raise PreconditionError(f"Failure budget must be non-negative, got {k}")
    cap = settings.resolve_cap(cap)
    total = enumeration_size(m, k)
    if total > cap:
        logger.warning(f"Enumeration of {total} failure sets exceeds the cap of {cap}")
        raise EnumerationBudgetError(total, cap)
    return total


def _check_contained(g: GraphLike, h: GraphLike) -> tuple[Subgraph, Subgraph]:
    base, sub = as_subgraph(g), as_subgraph(h)
    if base.parent != sub.parent:
        raise NotASubgraphError("The preserver is not taken over the same parent graph")
    if not sub.edge_mask <= base.edge_mask:
        extra = sorted(sub.edge_mask - base.edge_mask)
        raise NotASubgraphError(f"The preserver contains edges outside the base graph: {extra[:10]}")
    return base, sub


class _Evaluation(NamedTuple):
    witness: dict[str, Any] | None
    branch: frozenset[int]


Evaluator = Callable[[tuple[int, ...]], _Evaluation]


def _search(
    base: Subgraph,
    k: int,
    evaluate: Evaluator,
    strategy: str,
) -> tuple[tuple[int, ...] | None, dict[str, Any] | None, int]:
    """Returns the first failing set, its witness and the number of sets evaluated."""

    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown enumeration strategy {strategy!r}; expected one of {STRATEGIES}")

    max_size = min(k, base.m)
    checked = 0

    if strategy == "brute":
        edge_ids = base.edge_ids()
        for size in range(max_size + 1):
            for failure_set in combinations(edge_ids, size):
                checked += 1
                outcome = evaluate(failure_set)
                if outcome.witness is not None:
                    return failure_set, outcome.witness, checked
        return None, None, checked

    level: set[tuple[int, ...]] = {()}
    for size in range(max_size + 1):
        next_level: set[tuple[int, ...]] = set()
        # Sorted tuples of equal length compare in the same order `combinations` yields them.
        for failure_set in sorted(level):
            checked += 1
            outcome = evaluate(failure_set)
            if outcome.witness is not None:
                return failure_set, outcome.witness, checked
            if size < max_size:
                for e in outcome.branch:
                    if e not in failure_set:
                        next_level.add(tuple(sorted(failure_set + (e,))))
        logger.debug(f"Failure sets of size {size} passed; {len(next_level)} candidates of size {size + 1}")
        level = next_level
        if not level:
            break
    return None, None, checked


### ----------------------- Preserver verification ----------------------- ###
def _ftrs_evaluator(base: Subgraph, sub: Subgraph, pairs: Sequence[Pair]) -> Evaluator:
    sources = sorted({s for s, _ in pairs})
    targets = sorted({t for _, t in pairs})
    by_target = len(targets) < len(sources)
    edges = base.parent.edges

    def evaluate(failure_set: tuple[int, ...]) -> _Evaluation:
        g_view = base.without(failure_set)
        h_view = sub.without(failure_set)
        reach_g: dict[int, frozenset[int]] = {}
        trees = {}
        roots = targets if by_target else sources
        for root in roots:
            reach_g[root] = reachable_from(g_view, root, reverse=by_target)
            trees[root] = bfs_tree(h_view, root, reverse=by_target)

        branch: set[int] = set()
        for s, t in pairs:
            root, other = (t, s) if by_target else (s, t)
            tree = trees[root]
            if other not in tree.depth:
                if other in reach_g[root]:
                    witness = {"pair": [s, t], "reachable_in_g": True, "reachable_in_h": False}
                    return _Evaluation(witness, frozenset())
                continue
            v = other
            while v != root:
                e = tree.parent_edge[v]
                branch.add(e)
                v = edges[e][1] if by_target else edges[e][0]
        return _Evaluation(None, frozenset(branch))

    return evaluate


def verify_ftrs(
    g: GraphLike,
    h: GraphLike,
    pairs: Iterable[Pair],
    k: int,
    *,
    cap: int | None = None,
    strategy: str = "pruned",
) -> VerificationReport:
    """
    Checks that `h` is a k-fault-tolerant reachability preserver of `g` for `pairs`.

    Args:
        g (GraphLike): The base graph; failure sets range over its edges.
        h (GraphLike): Candidate preserver, a subgraph of `g`.
        pairs (Iterable[Pair]): The pair set `P`.
        k (int): Failure budget; every `|F| <= k` is checked.
        cap (int | None): Enumeration cap; defaults to the configured cap.
        strategy (str): `"pruned"` or `"brute"`; both report the same counterexample.

    Returns:
        VerificationReport: Pass/fail with the first counterexample in enumeration order.

    Raises:
        NotASubgraphError: If `h` is not contained in `g`.
        EnumerationBudgetError: If the full enumeration exceeds the cap.
    """

    base, sub = _check_contained(g, h)
    pair_list = normalize_pairs(pairs, base.n)
    total = _check_budget(base.m, k, cap)

    if not pair_list:
        return VerificationReport(True, "ftrs", k, None, 0, total, strategy)

    failure_set, witness, checked = _search(base, k, _ftrs_evaluator(base, sub, pair_list), strategy)
    counterexample = None if failure_set is None else make_counterexample(base, failure_set, witness)
    report = VerificationReport(counterexample is None, "ftrs", k, counterexample, checked, total, strategy)
    logger.debug(f"verify_ftrs k={k} pairs={len(pair_list)}: passed={report.passed}, checked={checked}/{total}")
    return report


def _scc_evaluator(base: Subgraph, sub: Subgraph) -> Evaluator:
    def evaluate(failure_set: tuple[int, ...]) -> _Evaluation:
        h_view = sub.without(failure_set)
        expected = scc_decompose(base, removed=failure_set)
        actual = scc_decompose(h_view)
        if expected != actual:
            return _Evaluation(expected.describe_difference(actual), frozenset())
        branch: set[int] = set()
        for component in actual.non_singletons():
            branch.update(certificate(component, h_view))
        return _Evaluation(None, frozenset(branch))

    return evaluate


def verify_scc_preserver(
    g: GraphLike,
    h: GraphLike,
    k: int,
    *,
    cap: int | None = None,
    strategy: str = "pruned",
) -> VerificationReport:
    """
    Checks that `h` is a k-fault-tolerant SCC preserver of `g`.

    The agreement predicate is equality of the full SCC partitions of `g - F` and `h - F`.
    Arguments, errors and ordering are as for `verify_ftrs`.
    """

    base, sub = _check_contained(g, h)
    total = _check_budget(base.m, k, cap)
    failure_set, witness, checked = _search(base, k, _scc_evaluator(base, sub), strategy)
    counterexample = None if failure_set is None else make_counterexample(base, failure_set, witness)
    report = VerificationReport(counterexample is None, "scc", k, counterexample, checked, total, strategy)
    logger.debug(f"verify_scc_preserver k={k}: passed={report.passed}, checked={checked}/{total}")
    return report


def verify_preserver(
    g: GraphLike,
    h: GraphLike,
    mode: str,
    k: int,
    pairs: Iterable[Pair] | None = None,
    **options,
) -> VerificationReport:
    """Dispatches to `verify_ftrs` (mode `"ftrs"`) or `verify_scc_preserver` (mode `"scc"`)."""

    if mode == "ftrs":
        if pairs is None:
            raise PreconditionError("Mode 'ftrs' needs a pair set")
        return verify_ftrs(g, h, pairs, k, **options)
    if mode == "scc":
        return verify_scc_preserver(g, h, k, **options)
    raise ValueError(f"Unknown verification mode {mode!r}; expected one of {MODES}")


class MinimalityResult(NamedTuple):
    minimal: bool
    removable_edge: int | None


def is_minimal(
    g: GraphLike,
    h: GraphLike,
    mode: str,
    k: int,
    pairs: Iterable[Pair] | None = None,
    **options,
) -> MinimalityResult:
    """
    Checks that removing any single edge of `h` breaks verification.

    Args:
        g (GraphLike): The base graph.
        h (GraphLike): A preserver that verifies under `mode`.
        mode (str): `"ftrs"` or `"scc"`.
        k (int): Failure budget.
        pairs (Iterable[Pair] | None): Pair set for mode `"ftrs"`.

    Returns:
        MinimalityResult: `(True, None)`, or `(False, e)` with the smallest removable edge id `e`.

    Raises:
        PreconditionError: If `h` itself does not verify.
    """

    pair_list = None if pairs is None else list(pairs)
    sub = as_subgraph(h)
    if not verify_preserver(g, sub, mode, k, pair_list, **options).passed:
        raise PreconditionError(f"The subgraph is not a {k}-fault-tolerant {mode} preserver")

    for e in sub.edge_ids():
        if verify_preserver(g, sub.without((e,)), mode, k, pair_list, **options).passed:
            logger.debug(f"Edge {e} {sub.parent.edges[e]} is removable")
            return MinimalityResult(False, e)
    return MinimalityResult(True, None)


### ----------------------- Flows and connectivity ----------------------- ###
def edge_disjoint_path_count(g: GraphLike, x: int, y: int, limit: int | None = None) -> int:
    """
    Counts edge-disjoint `x -> y` paths with unit-capacity augmenting paths.

    Args:
        g (GraphLike): Graph or subgraph view.
        x (int): Source vertex.
        y (int): Sink vertex, different from `x`.
        limit (int | None): Stop as soon as this many paths are found.

    Returns:
        int: The maximum number of edge-disjoint paths (capped at `limit`).
    """

    if x == y:
        raise PreconditionError("Disjoint path counts need two distinct vertices")
    view = as_subgraph(g)
    parent, active = view.parent, view.edge_mask
    edges = parent.edges
    used: set[int] = set()
    count = 0

    while limit is None or count < limit:
        # Residual arcs: unused edges forwards, used edges backwards.
        arrived_by: dict[int, tuple[int, bool]] = {x: (-1, True)}
        queue = deque([x])
        while queue and y not in arrived_by:
            u = queue.popleft()
            for e in parent.out_edges[u]:
                if e in active and e not in used and edges[e][1] not in arrived_by:
                    arrived_by[edges[e][1]] = (e, True)
                    queue.append(edges[e][1])
            for e in parent.in_edges[u]:
                if e in used and edges[e][0] not in arrived_by:
                    arrived_by[edges[e][0]] = (e, False)
                    queue.append(edges[e][0])
        if y not in arrived_by:
            break

        v = y
        while v != x:
            e, forward = arrived_by[v]
            if forward:
                used.add(e)
                v = edges[e][0]
            else:
                used.discard(e)
                v = edges[e][1]
        count += 1
    return count


def vertex_disjoint_path_count(g: GraphLike, x: int, y: int, limit: int | None = None) -> int:
    """Counts internally vertex-disjoint `x -> y` paths on the split graph with `x`, `y` kept whole."""

    if x == y:
        raise PreconditionError("Disjoint path counts need two distinct vertices")
    split, split_map = split_vertices(g, protected=(x, y))
    return edge_disjoint_path_count(split, split_map.vertex_out[x], split_map.vertex_in[y], limit)


def k_edge_connected(g: GraphLike, x: int, y: int, k: int) -> bool:
    """True iff at least `k` edge-disjoint paths exist from `x` to `y` and from `y` to `x`."""

    if x == y:
        raise PreconditionError("k_edge_connected needs two distinct vertices")
    return edge_disjoint_path_count(g, x, y, k) >= k and edge_disjoint_path_count(g, y, x, k) >= k


def k_vertex_connected(g: GraphLike, x: int, y: int, k: int) -> bool:
    """True iff at least `k` internally vertex-disjoint paths exist from `x` to `y` and back."""

    if x == y:
        raise PreconditionError("k_vertex_connected needs two distinct vertices")
    return vertex_disjoint_path_count(g, x, y, k) >= k and vertex_disjoint_path_count(g, y, x, k) >= k


def verify_connectivity_certificate(
    g: GraphLike, h: GraphLike, k: int, vertex_mode: bool = False
) -> VerificationReport:
    """
    Checks that every vertex pair k-connected in `g` is k-connected in `h`.

    Args:
        g (GraphLike): The base graph.
        h (GraphLike): Candidate certificate, a subgraph of `g`.
        k (int): Connectivity to preserve.
        vertex_mode (bool): Check k-vertex connectivity instead of k-edge connectivity.

    Returns:
        VerificationReport: Fails with the first pair `(x, y)`, `x < y`, that loses connectivity.
    """

    base, sub = _check_contained(g, h)
    connected = k_vertex_connected if vertex_mode else k_edge_connected
    label = "vertex" if vertex_mode else "edge"
    checked = 0
    connected_pairs = 0

    for x in range(base.n):
        for y in range(x + 1, base.n):
            checked += 1
            if not connected(base, x, y, k):
                continue
            connected_pairs += 1
            if not connected(sub, x, y, k):
                witness = {"pair": [x, y], "connectivity": label, "k": k}
                return VerificationReport(
                    False,
                    "cert",
                    k,
                    make_counterexample(base, (), witness),
                    details={"pairs_checked": checked, "connected_pairs": connected_pairs},
                )

    return VerificationReport(
        True, "cert", k, details={"pairs_checked": checked, "connected_pairs": connected_pairs, "connectivity": label}
    )

