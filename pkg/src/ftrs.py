"""
This module provides the fault-tolerant reachability preserver (FTRS) builders of the preservers toolkit.

Key functionalities:
    - `Preserver`: a subgraph handle with builder provenance, shared by every builder.
    - `build_anchored_ftrs`: single-source / single-destination k-FTRS by verified minimal pruning.
    - `build_pairwise_ftrs_minimal`: pairwise 1-FTRS by the cut-edge preserving removal rule.
    - `decompose_pair_ftrs`: splits a minimal single-pair 1-FTRS into its two s-t paths.
    - `build_pairwise_ftrs_greedy`: pairwise 1-FTRS by high-frequency vertex selection.

Main dependencies:
    - `verify`: a module from this project used to certify every output.
    - `graph_core`: a module from this project providing the graph primitives.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import logging_utils
from errors import DecompositionError, InvariantViolationError, PreconditionError, VerificationFailedError
from graph_core import (
    GraphLike,
    Pair,
    Subgraph,
    as_subgraph,
    cut_edges,
    cut_vertices,
    normalize_pairs,
    path_vertices,
    reachable_from,
)
from verify import verify_ftrs

logger = logging.getLogger(__name__)

DIRECTIONS = ("out", "in")


### ----------------------- Result types ----------------------- ###
@dataclass
class Preserver:
    """
    A preserver produced by one of the builders.

    Attributes:
        - `subgraph` (Subgraph): The retained edges, as parent edge ids.
        - `builder` (str): Name of the builder that produced it.
        - `params` (dict[str, Any]): Builder parameters.
        - `seed` (int | None): RNG seed for randomized builders.
        - `verified` (bool | None): Outcome of self-certification; None when it was skipped.
        - `provenance` (dict[str, Any]): Builder-specific detail (sampling, anchors, retries...).
    """

    subgraph: Subgraph
    builder: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    verified: bool | None = None
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.subgraph.m

    def edge_ids(self) -> tuple[int, ...]:
        return self.subgraph.edge_ids()

    def to_dict(self) -> dict[str, Any]:
        return {
            "builder": self.builder,
            "params": self.params,
            "seed": self.seed,
            "verified": self.verified,
            "n": self.subgraph.n,
            "size": self.size,
            "edge_ids": list(self.edge_ids()),
            "edges": [list(edge) for edge in self.subgraph.edge_list()],
            "provenance": self.provenance,
        }


@dataclass
class AnchoredFtrs:
    """
    A k-FTRS for the pair set `{w} x V` (direction `out`) or `V x {w}` (direction `in`).

    Attributes:
        - `anchor` (int): The anchor vertex `w`.
        - `direction` (str): `"out"` or `"in"`.
        - `k` (int): Failure budget.
        - `preserver` (Preserver): The retained edges and provenance.
    """

    anchor: int
    direction: str
    k: int
    preserver: Preserver

    @property
    def edges(self) -> Subgraph:
        return self.preserver.subgraph


@dataclass
class PairFtrs:
    """
    A minimal 1-FTRS for a single pair together with its two-path decomposition.

    Attributes:
        - `pair` (Pair): The pair `(s, t)`.
        - `preserver` (Preserver): The minimal single-pair preserver `H_p`.
        - `paths` (tuple[list[int], list[int]] | None): Edge-id paths `(Q, Q~)`, None when `t` is unreachable.
    """

    pair: Pair
    preserver: Preserver
    paths: tuple[list[int], list[int]] | None = None

    @property
    def edges(self) -> Subgraph:
        return self.preserver.subgraph


def anchored_pairs(n: int, anchor: int, direction: str) -> list[Pair]:
    """Returns `{w} x (V - w)` for direction `out` or `(V - w) x {w}` for direction `in`."""

    if direction not in DIRECTIONS:
        raise ValueError(f"Direction must be one of {DIRECTIONS}, got {direction!r}")
    if direction == "out":
        return [(anchor, v) for v in range(n) if v != anchor]
    return [(v, anchor) for v in range(n) if v != anchor]


### ----------------------- Anchored FTRS ----------------------- ###
def build_anchored_ftrs(
    g: GraphLike,
    anchor: int,
    direction: str,
    k: int,
    *,
    cap: int | None = None,
    strategy: str = "pruned",
) -> AnchoredFtrs:
    """
    Builds a minimal k-FTRS for `{w} x V` or `V x {w}` by pruning.

    Edges are scanned in descending id order and dropped whenever the remainder still verifies against `g`.
    A single pass suffices: if an edge could still be dropped at the end, it could also be dropped when it
    was scanned, because any supergraph of a preserver is a preserver.

    Args:
        g (GraphLike): The base graph (or view) to preserve.
        anchor (int): The anchor vertex `w`.
        direction (str): `"out"` for `{w} x V`, `"in"` for `V x {w}`.
        k (int): Failure budget.
        cap (int | None): Enumeration cap for each verification.
        strategy (str): Enumeration strategy for each verification.

    Returns:
        AnchoredFtrs: The minimal preserver; its size is reported, not bounded.

    Raises:
        EnumerationBudgetError: If a verification exceeds the cap.
    """

    base = as_subgraph(g)
    if not (0 <= anchor < base.n):
        raise PreconditionError(f"Anchor {anchor} is outside 0..{base.n - 1}")
    if k < 0:
        raise PreconditionError(f"Failure budget must be non-negative, got {k}")
    pairs = anchored_pairs(base.n, anchor, direction)

    h = base
    for e in reversed(base.edge_ids()):
        candidate = h.without((e,))
        if verify_ftrs(base, candidate, pairs, k, cap=cap, strategy=strategy).passed:
            h = candidate

    reference = (2**k) * base.n
    logger.debug(f"Anchored {direction}-FTRS at {anchor}, k={k}: {h.m} of {base.m} edges (2^k n = {reference})")
    preserver = Preserver(
        h,
        "anchored",
        {"anchor": anchor, "direction": direction, "k": k},
        verified=True,
        provenance={"pruned_edges": base.m - h.m, "reference_size": reference},
    )
    return AnchoredFtrs(anchor, direction, k, preserver)


### ----------------------- Pairwise 1-FTRS ----------------------- ###
def build_pairwise_ftrs_minimal(
    g: GraphLike,
    pairs: Iterable[Pair],
    *,
    certify: bool = True,
    cap: int | None = None,
) -> Preserver:
    """
    Builds a minimal pairwise 1-FTRS.

    Starting from `h = g`, each edge `e` in descending id order is removed iff for every pair `(s, t)`
    reachability and the `(s,t)`-cut edges are the same in `h - e` as in `h`. A final `verify_ftrs`
    against `g` at budget 1 certifies the output.

    Args:
        g (GraphLike): The base graph (or view).
        pairs (Iterable[Pair]): The pair set.
        certify (bool): Run the final verification.
        cap (int | None): Enumeration cap for the final verification.

    Returns:
        Preserver: The minimal preserver.

    Raises:
        VerificationFailedError: If the final certification fails.
    """

    base = as_subgraph(g)
    pair_list = [(s, t) for s, t in normalize_pairs(pairs, base.n) if s != t]

    h = base
    status = {pair: _pair_status(h, *pair) for pair in pair_list}
    for e in reversed(base.edge_ids()):
        candidate = h.without((e,))
        candidate_status = {}
        for pair in pair_list:
            candidate_status[pair] = _pair_status(candidate, *pair)
            if candidate_status[pair] != status[pair]:
                break
        else:
            h = candidate
            status = candidate_status

    verified = None
    if certify:
        report = verify_ftrs(base, h, pair_list, 1, cap=cap)
        if not report.passed:
            raise VerificationFailedError("Pairwise minimal preserver failed certification", report)
        verified = True

    reference = base.n + len(pair_list) * math.sqrt(base.n)
    logger.info(f"Pairwise minimal 1-FTRS: {h.m} of {base.m} edges for {len(pair_list)} pairs")
    return Preserver(
        h,
        "minimal",
        {"k": 1, "pairs": len(pair_list)},
        verified=verified,
        provenance={"reference_size": reference},
    )


def _pair_status(h: Subgraph, s: int, t: int) -> tuple[bool, frozenset[int]]:
    return t in reachable_from(h, s), cut_edges(h, s, t)


def _dfs_path(h: Subgraph, s: int, t: int) -> list[int] | None:
    """Returns the first simple `s -> t` path of a DFS that tries lower edge ids first."""

    if s == t:
        return []
    parent = h.parent
    edges = parent.edges
    visited = {s}
    path: list[int] = []
    stack = [iter(parent.out_edges[s])]
    while stack:
        for e in stack[-1]:
            if e not in h.edge_mask:
                continue
            head = edges[e][1]
            if head in visited:
                continue
            visited.add(head)
            path.append(e)
            if head == t:
                return path
            stack.append(iter(parent.out_edges[head]))
            break
        else:
            stack.pop()
            if path:
                path.pop()
    return None


def decompose_pair_ftrs(h_p: GraphLike, s: int, t: int) -> tuple[list[int], list[int]]:
    """
    Splits a minimal single-pair 1-FTRS into two `s -> t` paths `(Q, Q~)`.

    `Q` is the first path of a DFS preferring the lowest edge id; `Q~` is found the same way after
    removing the edges of `Q` that are not `(s,t)`-cut edges.

    Args:
        h_p (GraphLike): A minimal 1-FTRS for `(s, t)`.
        s (int): Source.
        t (int): Target, reachable from `s` in `h_p`.

    Returns:
        tuple[list[int], list[int]]: The two paths as edge-id lists.

    Raises:
        PreconditionError: If `s == t` or `t` is unreachable.
        DecompositionError: If the edges are not the union of two such paths meeting only at cut
            edges and cut vertices (a non-minimal or corrupt input).
    """

    h = as_subgraph(h_p)
    if s == t:
        raise PreconditionError("Decomposition needs two distinct endpoints")
    q = _dfs_path(h, s, t)
    if q is None:
        raise PreconditionError(f"Vertex {t} is not reachable from {s}")

    cuts = cut_edges(h, s, t)
    q_tilde = _dfs_path(h.without(e for e in q if e not in cuts), s, t)
    if q_tilde is None:
        raise DecompositionError(f"No second {s}-{t} path avoids the non-cut edges of the first")

    union = set(q) | set(q_tilde)
    if union != set(h.edge_mask):
        raise DecompositionError(
            f"{len(h.edge_mask - union)} edges lie on neither extracted {s}-{t} path; input is not minimal"
        )
    shared_edges = set(q) & set(q_tilde)
    if not shared_edges <= cuts:
        raise DecompositionError(f"Paths share non-cut edges {sorted(shared_edges - cuts)}")
    shared_vertices = set(path_vertices(h, q, s)) & set(path_vertices(h, q_tilde, s))
    allowed = cut_vertices(h, s, t) | {s, t}
    if not shared_vertices <= allowed:
        raise DecompositionError(f"Paths share non-cut vertices {sorted(shared_vertices - allowed)}")
    return q, q_tilde


def build_pair_ftrs(g: GraphLike, s: int, t: int) -> PairFtrs:
    """Builds the minimal 1-FTRS of a single pair and, when `t` is reachable, its two-path decomposition."""

    base = as_subgraph(g)
    preserver = build_pairwise_ftrs_minimal(base, [(s, t)], certify=False)
    paths = None
    if s != t and t in reachable_from(preserver.subgraph, s):
        paths = decompose_pair_ftrs(preserver.subgraph, s, t)
    return PairFtrs((s, t), preserver, paths)


@dataclass
class _CollectedPath:
    pair: Pair
    edges: list[int]
    vertices: frozenset[int]


def build_pairwise_ftrs_greedy(
    g: GraphLike,
    pairs: Iterable[Pair],
    *,
    certify: bool = True,
    cap: int | None = None,
) -> Preserver:
    """
    Builds a pairwise 1-FTRS by selecting high-frequency vertices.

    Every pair contributes the two paths of its minimal 1-FTRS to a collection. While some vertex lies
    on more than `sqrt(|P|)` collected paths, the smallest such vertex id is selected
    and the paths through it are discarded. The output is the anchored out- and in-1-FTRS of every
    selected vertex plus the remaining paths.

    Args:
        g (GraphLike): The base graph (or view).
        pairs (Iterable[Pair]): The pair set.
        certify (bool): Verify the output against `g` at budget 1.
        cap (int | None): Enumeration cap for the verifications.

    Returns:
        Preserver: The preserver; provenance lists the selected vertices.

    Raises:
        InvariantViolationError: If more than `2 sqrt(|P|)` vertices are selected.
        VerificationFailedError: If certification fails.
    """

    base = as_subgraph(g)
    pair_list = list(normalize_pairs(pairs, base.n))
    threshold = math.sqrt(len(pair_list))

    collection: list[_CollectedPath] = []
    for s, t in pair_list:
        if s == t:
            continue
        pair_ftrs = build_pair_ftrs(base, s, t)
        if pair_ftrs.paths is None:
            continue
        for path in pair_ftrs.paths:
            collection.append(_CollectedPath((s, t), path, frozenset(path_vertices(base, path, s))))
    logger.debug(f"Collected {len(collection)} paths for {len(pair_list)} pairs")

    selected: list[int] = []
    while True:
        frequency = _frequencies(collection)
        candidates = [v for v, count in frequency.items() if count > threshold]
        if not candidates:
            break
        w = min(candidates)
        selected.append(w)
        collection = [path for path in collection if w not in path.vertices]
        logger.debug(f"Selected vertex {w}; {len(collection)} paths remain")

    max_frequency = max(_frequencies(collection).values(), default=0)
    if len(selected) > 2 * threshold or max_frequency > threshold:
        raise InvariantViolationError(
            f"Greedy selection broke its bounds: |W|={len(selected)}, max freq={max_frequency}, sqrt|P|={threshold:.3f}"
        )

    mask: set[int] = set()
    for w in selected:
        for direction in DIRECTIONS:
            mask.update(build_anchored_ftrs(base, w, direction, 1, cap=cap).edges.edge_mask)
    for path in collection:
        mask.update(path.edges)
    h = Subgraph(base.parent, frozenset(mask))

    verified = None
    if certify:
        report = verify_ftrs(base, h, pair_list, 1, cap=cap)
        if not report.passed:
            raise VerificationFailedError("Greedy pairwise preserver failed certification", report)
        verified = True

    provenance = {
        "selected_vertices": selected,
        "remaining_paths": len(collection),
        "max_frequency": max_frequency,
        "threshold": threshold,
        "reference_size": base.n * threshold,
    }
    logging_utils.format_and_log_data_for_debug(logger, provenance)
    logger.info(f"Greedy 1-FTRS: {h.m} of {base.m} edges, {len(selected)} selected vertices")
    return Preserver(h, "greedy", {"k": 1, "pairs": len(pair_list)}, verified=verified, provenance=provenance)


def _frequencies(collection: list[_CollectedPath]) -> dict[int, int]:
    frequency: dict[int, int] = {}
    for path in collection:
        for v in path.vertices:
            frequency[v] = frequency.get(v, 0) + 1
    return frequency
