"""
This module provides the fault-tolerant SCC preserver builders of the preservers toolkit.

A k-FT-SCC preserver `H` of `G` is a subgraph such that `G - F` and `H - F` have the same strongly
connected components for every set `F` of at most `k` failed edges.

Key functionalities:
    - `build_h0`: prefix-SCC preserving subgraph with at most `2n` edges for an ordered vertex list.
    - `build_certificate_preserver`: exact 0-FT-SCC preserver from SCC certificates.
    - `build_1ft_scc`: deterministic 1-FT-SCC preserver (anchored FTRS plus two prefix subgraphs).
    - `build_procedure_b`: randomized lift of an r-FT-SCC builder to budget k + r.
    - `build_kft_scc`: k-FT-SCC preserver with verify-and-retry.
    - `build_connectivity_certificate`: k-edge / k-vertex connectivity certificates from FT-SCC preservers.

Main dependencies:
    - `numpy`: for seeded random streams (`SeedSequence`, `default_rng`).
    - `ftrs`: a module from this project providing anchored FTRS and the `Preserver` type.
    - `verify`: a module from this project used to certify outputs.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Callable, Iterable, Mapping

import numpy as np

import logging_utils
import settings
from errors import (
    EnumerationBudgetError,
    InvalidOrderError,
    InvariantViolationError,
    PreconditionError,
    VerificationFailedError,
)
from ftrs import DIRECTIONS, Preserver, build_anchored_ftrs
from graph_core import (
    DiGraph,
    GraphLike,
    Subgraph,
    as_subgraph,
    bfs_tree,
    certificate,
    scc_decompose,
    split_vertices,
)
from verify import verify_connectivity_certificate, verify_scc_preserver

logger = logging.getLogger(__name__)

InnerBuilder = Callable[[Subgraph], Preserver]


### ----------------------- Ordered lists and H0 ----------------------- ###
@dataclass(frozen=True)
class OrderedList:
    """
    A permutation `(v_1, ..., v_n)` of the vertex set.

    Attributes:
        - `order` (tuple[int, ...]): The vertices in list order.
    """

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        order = tuple(int(v) for v in self.order)
        object.__setattr__(self, "order", order)
        if sorted(order) != list(range(len(order))):
            raise InvalidOrderError(f"Order of length {len(order)} is not a permutation of 0..{len(order) - 1}")

    def __len__(self) -> int:
        return len(self.order)

    @classmethod
    def by_decreasing_depth(cls, depth: Mapping[int, int]) -> "OrderedList":
        """Orders vertices by decreasing depth, ties by ascending vertex id."""

        return cls(tuple(sorted(depth, key=lambda v: (-depth[v], v))))


def build_h0(g: GraphLike, order: OrderedList | Iterable[int]) -> Subgraph:
    """
    Builds `H_0(L)`: for every prefix `V_i`, `H_0[V_i]` has the same SCCs as `G[V_i]`.

    In round `i` the SCC `C_i` of `v_i` in `G[V_i]` is spanned by an out-tree and an in-tree rooted at
    `v_i` over the supernodes formed by the SCCs of `G[V_{i-1}]` inside `C_i`. Tree links use the
    smallest edge id realizing them.

    Args:
        g (GraphLike): The graph (or view).
        order (OrderedList | Iterable[int]): The list `L`.

    Returns:
        Subgraph: `H_0(L)`, with at most `2n` edges.

    Raises:
        InvalidOrderError: If `order` is not a permutation of the vertices.
        InvariantViolationError: If more than `2n` edges were added.
    """

    base = as_subgraph(g)
    if not isinstance(order, OrderedList):
        order = OrderedList(tuple(order))
    if len(order) != base.n:
        raise InvalidOrderError(f"Order has {len(order)} vertices, graph has {base.n}")

    edges = base.parent.edges
    mask: set[int] = set()
    prefix: set[int] = set()
    previous = scc_decompose(base.induced(prefix))

    for v in order.order:
        prefix.add(v)
        current = scc_decompose(base.induced(prefix))
        component = current.components[current.component_of[v]]
        if len(component) > 1:
            supernode = {u: previous.component_of[u] for u in component if u != v}
            supernode[v] = -1
            span = base.induced(component)
            for reverse in (False, True):
                mask.update(_supernode_tree(span, v, supernode, edges, reverse))
        previous = current

    if len(mask) > 2 * base.n:
        raise InvariantViolationError(f"H_0 has {len(mask)} edges, more than 2n = {2 * base.n}")
    return Subgraph(base.parent, frozenset(mask))


def _supernode_tree(
    span: Subgraph, root: int, supernode: dict[int, int], edges: tuple, reverse: bool
) -> list[int]:
    """BFS over contracted supernodes from `root`; returns one smallest-id edge per reached supernode."""

    members: dict[int, list[int]] = {}
    for u, label in supernode.items():
        members.setdefault(label, []).append(u)
    adjacency = span.parent.in_edges if reverse else span.parent.out_edges
    far = 0 if reverse else 1

    reached = {supernode[root]}
    frontier = [supernode[root]]
    tree: list[int] = []
    while frontier:
        next_frontier = []
        for label in frontier:
            candidate_edges = sorted(
                e for u in members[label] for e in adjacency[u] if e in span.edge_mask
            )
            for e in candidate_edges:
                target = supernode[edges[e][far]]
                if target not in reached:
                    reached.add(target)
                    tree.append(e)
                    next_frontier.append(target)
        frontier = next_frontier

    if len(reached) != len(members):
        raise InvariantViolationError(f"Supernode tree from {root} reached {len(reached)} of {len(members)} supernodes")
    return tree


### ----------------------- 0- and 1-FT-SCC preservers ----------------------- ###
def build_certificate_preserver(g: GraphLike) -> Preserver:
    """Builds the exact 0-FT-SCC preserver: the union of the certificates of all SCCs."""

    base = as_subgraph(g)
    mask: set[int] = set()
    for component in scc_decompose(base).non_singletons():
        mask.update(certificate(component, base))
    return Preserver(Subgraph(base.parent, frozenset(mask)), "certificate", {"k": 0}, verified=True)


def _build_1ft_strongly_connected(graph: DiGraph) -> tuple[frozenset[int], dict[str, int]]:
    """1-FT-SCC preserver edge ids of a strongly connected graph, rooted at vertex 0."""

    out_tree = bfs_tree(graph, 0)
    in_tree = bfs_tree(graph, 0, reverse=True)
    h1: set[int] = set()
    for direction in DIRECTIONS:
        h1.update(build_anchored_ftrs(graph, 0, direction, 1).edges.edge_mask)
    h0_out = build_h0(graph, OrderedList.by_decreasing_depth(out_tree.depth))
    h0_in = build_h0(graph, OrderedList.by_decreasing_depth(in_tree.depth))

    mask = frozenset(h1 | h0_out.edge_mask | h0_in.edge_mask)
    if len(mask) > len(h1) + 4 * graph.n:
        raise InvariantViolationError(f"1-FT-SCC preserver has {len(mask)} edges, above |H1| + 4n")
    sizes = {"h1": len(h1), "h0_out": h0_out.m, "h0_in": h0_in.m}
    return mask, sizes


def build_1ft_scc(
    g: GraphLike,
    *,
    whole_graph: bool = False,
    certify: bool = True,
    cap: int | None = None,
) -> Preserver:
    """
    Builds a deterministic 1-FT-SCC preserver.

    Each non-trivial SCC `C` of `g` is handled on its own: with `s = min(C)`, the output contains the
    anchored out- and in-1-FTRS of `s` and `H_0(L)`, `H_0(L')` for the BFS out-tree and in-tree of `s`
    listed by decreasing depth (ties by ascending id).

    Args:
        g (GraphLike): The graph (or view).
        whole_graph (bool): Also keep one smallest-id edge per linked pair of SCCs (not fault tolerant).
        certify (bool): Verify the output at budget 1.
        cap (int | None): Enumeration cap for certification.

    Returns:
        Preserver: The preserver with per-component sizes in its provenance.

    Raises:
        VerificationFailedError: If certification fails.
    """

    base = as_subgraph(g)
    partition = scc_decompose(base)
    mask: set[int] = set()
    components = []
    for component in partition.non_singletons():
        local = base.induced_digraph(component)
        local_mask, sizes = _build_1ft_strongly_connected(local.graph)
        mask.update(local.edge_map[e] for e in local_mask)
        components.append({"root": local.vertices[0], "size": len(component), **sizes})

    if whole_graph:
        mask.update(_condensation_skeleton(base, partition.component_of))

    h = Subgraph(base.parent, frozenset(mask))
    verified = None
    if certify:
        report = verify_scc_preserver(base, h, 1, cap=cap)
        if not report.passed:
            raise VerificationFailedError("1-FT-SCC preserver failed certification", report)
        verified = True

    logger.debug(f"1-FT-SCC preserver: {h.m} of {base.m} edges over {len(components)} components")
    return Preserver(
        h,
        "1ft-scc",
        {"k": 1, "whole_graph": whole_graph},
        verified=verified,
        provenance={"components": components},
    )


def _condensation_skeleton(base: Subgraph, component_of: tuple[int, ...]) -> set[int]:
    edges = base.parent.edges
    chosen: dict[tuple[int, int], int] = {}
    for e in base.edge_ids():
        link = (component_of[edges[e][0]], component_of[edges[e][1]])
        if link[0] != link[1]:
            chosen.setdefault(link, e)
    return set(chosen.values())


### ----------------------- Procedure B ----------------------- ###
@dataclass(frozen=True)
class ProcedureBParams:
    """
    Parameters of the randomized (k + r)-FT-SCC lift.

    Unset counts and probabilities are filled by `resolve(n)`:
        - iterations = ceil(c_L * n^(k alpha) * ln n)
        - edge_sample_prob = min(1, c_p / n^alpha)
        - anchor_count = ceil(c_q * (k + r) * n^(1 - alpha) * ln n)

    Attributes:
        - `k` (int): Failure budget added by the lift.
        - `r` (int): Failure budget of the inner builder.
        - `alpha` (float): Balance between sampled rounds and anchors, in [0, 1].
        - `iterations` (int | None): Number of sampled rounds.
        - `edge_sample_prob` (float | None): Probability that an edge joins a round's sample `J`.
        - `anchor_count` (int | None): Number of anchor vertices `|W|`.
        - `c_L`, `c_p`, `c_q` (float): Constants of the default formulas.
        - `seed` (int): Root seed of all random streams.
    """

    k: int
    r: int = 0
    alpha: float = 0.5
    iterations: int | None = None
    edge_sample_prob: float | None = None
    anchor_count: int | None = None
    c_L: float = settings.DESK_CONSTANTS["c_L"]
    c_p: float = settings.DESK_CONSTANTS["c_p"]
    c_q: float = settings.DESK_CONSTANTS["c_q"]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 0 or self.r < 0:
            raise ValueError(f"Budgets must be non-negative, got k={self.k}, r={self.r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.edge_sample_prob is not None and not 0.0 <= self.edge_sample_prob <= 1.0:
            raise ValueError(f"edge_sample_prob must lie in [0, 1], got {self.edge_sample_prob}")
        for name in ("iterations", "anchor_count"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        for name in ("c_L", "c_p", "c_q"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def resolve(self, n: int) -> "ProcedureBParams":
        """Returns a copy with every unset count or probability computed for an `n`-vertex graph."""

        log_n = math.log(n) if n > 1 else 0.0
        iterations = self.iterations
        if iterations is None:
            iterations = math.ceil(self.c_L * n ** (self.k * self.alpha) * log_n)
        edge_sample_prob = self.edge_sample_prob
        if edge_sample_prob is None:
            edge_sample_prob = min(1.0, self.c_p / n**self.alpha) if n > 0 else 0.0
        anchor_count = self.anchor_count
        if anchor_count is None:
            anchor_count = math.ceil(self.c_q * (self.k + self.r) * n ** (1 - self.alpha) * log_n)
        return replace(
            self, iterations=iterations, edge_sample_prob=edge_sample_prob, anchor_count=anchor_count
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def build_procedure_b(
    g: GraphLike,
    params: ProcedureBParams,
    inner: InnerBuilder,
    *,
    cap: int | None = None,
) -> Preserver:
    """
    Lifts an r-FT-SCC builder to a (k + r)-FT-SCC preserver with high probability.

    `H_1` is the union over the sampled rounds of `inner(g - J)`, where every edge joins `J`
    independently with probability `edge_sample_prob`. `H_2` is the union of the anchored out- and
    in-(k + r)-FTRS of a uniform sample `W` of `anchor_count` vertices drawn without replacement.
    Round `i` draws from its own stream spawned from `seed`, so the output is determined by the seed.

    Args:
        g (GraphLike): The graph (or view).
        params (ProcedureBParams): Lift parameters; unset values are resolved for `g`.
        inner (InnerBuilder): Builder of verified r-FT-SCC preservers of a subgraph view.
        cap (int | None): Enumeration cap for the anchored FTRS verifications.

    Returns:
        Preserver: `H_1 ∪ H_2` with full sampling provenance. Not verified here.
    """

    base = as_subgraph(g)
    resolved = params.resolve(base.n)
    anchor_count = resolved.anchor_count
    if anchor_count > base.n:
        logger.warning(f"anchor_count {anchor_count} exceeds n = {base.n}; clamping to n")
        anchor_count = base.n

    streams = np.random.SeedSequence(resolved.seed).spawn(resolved.iterations + 1)
    anchor_rng = np.random.default_rng(streams[0])
    edge_ids = np.array(base.edge_ids(), dtype=np.int64)

    h1: set[int] = set()
    rounds = []
    for index, stream in enumerate(streams[1:]):
        rng = np.random.default_rng(stream)
        sampled = edge_ids[rng.random(len(edge_ids)) < resolved.edge_sample_prob]
        inner_result = inner(base.without(sampled.tolist()))
        h1.update(inner_result.subgraph.edge_mask)
        rounds.append({"round": index, "sampled_edges": int(len(sampled)), "inner_size": inner_result.size})
        logger.debug(f"Round {index}: |J|={len(sampled)}, inner preserver {inner_result.size} edges")

    anchors = sorted(int(w) for w in anchor_rng.choice(base.n, size=anchor_count, replace=False))
    h2: set[int] = set()
    for w in anchors:
        for direction in DIRECTIONS:
            h2.update(build_anchored_ftrs(base, w, direction, resolved.k + resolved.r, cap=cap).edges.edge_mask)

    h = Subgraph(base.parent, frozenset(h1 | h2))
    provenance = {
        "rounds": rounds,
        "anchors": anchors,
        "h1_size": len(h1),
        "h2_size": len(h2),
    }
    logging_utils.format_and_log_data_for_debug(logger, {"preserver": h, "anchors": anchors})
    logger.info(
        f"Procedure B (k={resolved.k}, r={resolved.r}): {h.m} of {base.m} edges, "
        f"{resolved.iterations} rounds, {len(anchors)} anchors"
    )
    return Preserver(h, "procedure-b", resolved.to_dict(), seed=resolved.seed, provenance=provenance)


def derive_seed(seed: int, attempt: int) -> int:
    """Returns the seed of retry `attempt`; attempt 0 keeps `seed`."""

    if attempt == 0:
        return seed
    state = np.random.SeedSequence([seed, attempt]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def build_kft_scc(
    g: GraphLike,
    k: int,
    seed: int = 0,
    *,
    alpha: float | None = None,
    constants: Mapping[str, float] | None = None,
    certify: bool = True,
    max_retries: int | None = None,
    cap: int | None = None,
) -> Preserver:
    """
    Builds a k-FT-SCC preserver.

    `k = 1` is the deterministic `build_1ft_scc`. For `k >= 2`, Procedure B lifts `build_1ft_scc`
    (`r = 1`) by `k - 1` with `alpha = 1/k`; the output is verified at budget `k` and rebuilt with a
    derived seed until it passes.

    Args:
        g (GraphLike): The graph (or view).
        k (int): Failure budget, at least 1.
        seed (int): Root seed.
        alpha (float | None): Overrides `1/k`.
        constants (Mapping[str, float] | None): Overrides for `c_L`, `c_p`, `c_q`.
        certify (bool): Verify and retry; when False the first build is returned unverified.
        max_retries (int | None): Retry limit; defaults to the configured limit.
        cap (int | None): Enumeration cap.

    Returns:
        Preserver: The preserver. When verification exceeds the enumeration cap, it is returned with
        `verified=None` and the reason recorded in its provenance.

    Raises:
        PreconditionError: If `k < 1`.
        VerificationFailedError: If no attempt verified within the retry limit.
    """

    if k < 1:
        raise PreconditionError(f"k-FT-SCC preservers need k >= 1, got {k}")
    base = as_subgraph(g)
    if k == 1:
        return build_1ft_scc(base, certify=certify, cap=cap)

    max_retries = settings.get_settings().max_retries if max_retries is None else max_retries
    options = dict(constants or {})
    unknown = set(options) - set(settings.DESK_CONSTANTS)
    if unknown:
        raise ValueError(f"Unknown constants {sorted(unknown)}; expected c_L, c_p, c_q")

    def inner(view: Subgraph) -> Preserver:
        return build_1ft_scc(view, certify=False)

    seeds = []
    report = None
    for attempt in range(max_retries + 1):
        attempt_seed = derive_seed(seed, attempt)
        seeds.append(attempt_seed)
        params = ProcedureBParams(k=k - 1, r=1, alpha=1 / k if alpha is None else alpha, seed=attempt_seed, **options)
        preserver = build_procedure_b(base, params, inner, cap=cap)
        preserver.builder = "kft-scc"
        preserver.params = {**preserver.params, "target_k": k}
        preserver.seed = seed
        preserver.provenance.update({"attempt_seeds": list(seeds), "retries": attempt})
        if not certify:
            return preserver

        try:
            report = verify_scc_preserver(base, preserver.subgraph, k, cap=cap)
        except EnumerationBudgetError as exc:
            logger.warning(f"Returning unverified {k}-FT-SCC preserver: {exc}")
            preserver.provenance["unverified_reason"] = str(exc)
            return preserver

        if report.passed:
            preserver.verified = True
            logger.info(f"{k}-FT-SCC preserver verified after {attempt} retries ({preserver.size} edges)")
            return preserver
        logger.warning(f"Attempt {attempt} (seed {attempt_seed}) failed verification; retrying")

    raise VerificationFailedError(f"No {k}-FT-SCC preserver verified within {max_retries} retries", report)


### ----------------------- Connectivity certificates ----------------------- ###
def build_connectivity_certificate(
    g: GraphLike,
    k: int,
    seed: int = 0,
    *,
    vertex_mode: bool = False,
    certify: bool = True,
    **options,
) -> Preserver:
    """
    Builds a k-edge (or k-vertex) connectivity certificate from a (k - 1)-FT-SCC preserver.

    In vertex mode the preserver is built on the vertex-split graph and projected back to the
    original edges, so vertex failures become gadget-edge failures.

    Args:
        g (GraphLike): The graph (or view).
        k (int): Connectivity to preserve, at least 1.
        seed (int): Root seed for `build_kft_scc`.
        vertex_mode (bool): Certify vertex connectivity instead of edge connectivity.
        certify (bool): Check the certificate with `verify_connectivity_certificate`.
        **options: Passed on to `build_kft_scc`.

    Returns:
        Preserver: The certificate.

    Raises:
        VerificationFailedError: If the certificate check fails.
    """

    if k < 1:
        raise PreconditionError(f"Connectivity certificates need k >= 1, got {k}")
    base = as_subgraph(g)

    def preserver_of(view: GraphLike) -> Preserver:
        if k == 1:
            return build_certificate_preserver(view)
        return build_kft_scc(view, k - 1, seed, **options)

    if vertex_mode:
        split, split_map = split_vertices(base)
        inner = preserver_of(split)
        kept = inner.subgraph.edge_mask
        mask = frozenset(e for e, image in split_map.edge_map.items() if image in kept)
        provenance = {"split_vertices": split.n, "split_preserver_size": inner.size, **inner.provenance}
    else:
        inner = preserver_of(base)
        mask = inner.subgraph.edge_mask
        provenance = dict(inner.provenance)

    h = Subgraph(base.parent, mask)
    verified = None
    if certify:
        report = verify_connectivity_certificate(base, h, k, vertex_mode=vertex_mode)
        if not report.passed:
            raise VerificationFailedError("Connectivity certificate failed its check", report)
        verified = True

    return Preserver(
        h,
        "connectivity-certificate",
        {"k": k, "vertex_mode": vertex_mode},
        seed=seed,
        verified=verified,
        provenance=provenance,
    )
