"""
This module provides random instance generation and the benchmark harness of the preservers toolkit.

Key functionalities:
    - `gen_random_digraph`: uniform simple digraphs with an exact edge count, optionally strongly connected.
    - `ExperimentConfig`: a sweep description that round-trips through JSON and is validated on load.
    - `run_experiment`: builds (and optionally verifies) a preserver per sweep job, in parallel workers,
      and writes an append-only CSV plus a JSON sidecar.
    - `summarize_records`: size-vs-reference summary table.

Main dependencies:
    - `numpy`: for seeded random streams (`default_rng`, `SeedSequence`).
    - `pandas`: for report tables.
    - `concurrent.futures`: for running sweep jobs in worker processes.
"""

import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Tuple

import numpy as np
import pandas as pd

import settings
from errors import EnumerationBudgetError, InfeasibleGraphError, VerificationFailedError
from file_handler import FileHandler
from ftrs import anchored_pairs, build_anchored_ftrs, build_pairwise_ftrs_greedy, build_pairwise_ftrs_minimal
from graph_core import DiGraph, Pair
from lowerbound_gen import gen_appendix_a, gen_base_disjoint_paths, gen_dual_failure_graph
from scc_preserver import build_1ft_scc, build_certificate_preserver, build_connectivity_certificate, build_kft_scc
from verify import verify_connectivity_certificate, verify_ftrs, verify_scc_preserver

logger = logging.getLogger(__name__)

FAMILIES = ("random", "appendix-a", "dual-failure", "file")
METHODS = ("anchored", "minimal", "greedy", "1ft-scc", "kft-scc", "certificate", "connectivity")
PAIR_METHODS = ("minimal", "greedy")

RECORD_COLUMNS = [
    "name",
    "family",
    "value",
    "instance",
    "n",
    "m",
    "pairs",
    "k",
    "method",
    "seed",
    "config_hash",
    "size",
    "reference",
    "ratio",
    "verified",
    "retries",
    "build_seconds",
    "verify_seconds",
]
TIMING_COLUMNS = ("build_seconds", "verify_seconds")


### ----------------------- Random instances ----------------------- ###
def _decode_edge(index: int, n: int) -> tuple[int, int]:
    tail, rest = divmod(index, n - 1)
    return tail, rest if rest < tail else rest + 1


def _encode_edge(tail: int, head: int, n: int) -> int:
    return tail * (n - 1) + (head if head < tail else head - 1)


def gen_random_digraph(n: int, m: int, seed: int, strongly_connected: bool = False) -> DiGraph:
    """
    Generates a uniform simple digraph with exactly `m` edges.

    In strongly connected mode a random Hamiltonian cycle is planted first and the remaining
    `m - n` edges are drawn uniformly from the other ordered pairs.

    Args:
        n (int): Number of vertices.
        m (int): Number of edges, at most `n (n - 1)`.
        seed (int): Seed; the same `(n, m, seed, strongly_connected)` gives the same edge list.
        strongly_connected (bool): Plant a Hamiltonian cycle.

    Returns:
        DiGraph: The graph.

    Raises:
        InfeasibleGraphError: If `m` is negative, exceeds `n (n - 1)`, or is below `n` in strongly connected mode.
    """

    if n < 0:
        raise InfeasibleGraphError(f"Vertex count must be non-negative, got {n}")
    slots = n * (n - 1)
    if not 0 <= m <= slots:
        raise InfeasibleGraphError(f"Cannot place {m} edges on {n} vertices (at most {slots})")
    if strongly_connected and n >= 2 and m < n:
        raise InfeasibleGraphError(f"A strongly connected graph on {n} vertices needs at least {n} edges, got {m}")

    rng = np.random.default_rng(seed)
    chosen: list[int] = []
    if strongly_connected and n >= 2:
        cycle = rng.permutation(n).tolist()
        chosen = [_encode_edge(cycle[i], cycle[(i + 1) % n], n) for i in range(n)]

    if m > len(chosen):
        available = np.setdiff1d(np.arange(slots), np.array(chosen, dtype=np.int64))
        chosen += rng.choice(available, size=m - len(chosen), replace=False).tolist()

    return DiGraph(n, (_decode_edge(index, n) for index in chosen))


def random_pairs(n: int, count: int, rng: np.random.Generator) -> list[Pair]:
    """Draws `count` distinct ordered pairs `(s, t)` with `s != t` (fewer when the graph is too small)."""

    slots = n * (n - 1)
    count = min(count, slots)
    if count <= 0:
        return []
    return [_decode_edge(index, n) for index in rng.choice(slots, size=count, replace=False).tolist()]


### ----------------------- Configuration ----------------------- ###
@dataclass
class ExperimentConfig:
    """
    A benchmark sweep.

    Attributes:
        - `name` (str): Label written into every record.
        - `family` (str): Instance family; one of `FAMILIES`.
        - `n_values` (list[int]): Sweep values: `n` for `random`, `n_y` for `appendix-a`, `K` for `dual-failure`.
        - `m_factor` (float): Random family edge count `m = round(m_factor * n)`, clamped to `[n, n (n - 1)]`.
        - `strongly_connected` (bool): Random family plants a Hamiltonian cycle.
        - `instances_per_n` (int): Jobs per sweep value.
        - `method` (str): Builder; one of `METHODS`.
        - `k` (int): Failure budget (tree height for `appendix-a`, connectivity for `connectivity`).
        - `pair_count` (int): Random pairs for pair-based methods.
        - `seed` (int): Root seed of the sweep.
        - `verify` (bool): Verify every preserver exhaustively.
        - `cap` (int | None): Enumeration cap; None uses the configured default.
        - `constants` (dict[str, float]): Procedure B constants.
        - `workers` (int): Worker processes; 1 runs in-process.
        - `csv_path` (str | None): Append-only CSV report.
        - `json_path` (str | None): JSON sidecar with the config and full records.
        - `params` (dict[str, Any]): Family and method extras (`p`, `L`, `graph_path`, `pairs_path`, `direction`, `vertex_mode`).
    """

    name: str = "experiment"
    family: str = "random"
    n_values: list[int] = field(default_factory=lambda: [6, 8, 10])
    m_factor: float = 2.0
    strongly_connected: bool = True
    instances_per_n: int = 1
    method: str = "1ft-scc"
    k: int = 1
    pair_count: int = 4
    seed: int = 0
    verify: bool = True
    cap: int | None = None
    constants: dict[str, float] = field(default_factory=lambda: dict(settings.DESK_CONSTANTS))
    workers: int = 1
    csv_path: str | None = "bench.csv"
    json_path: str | None = "bench.json"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.method not in METHODS:
            raise ValueError(f"Unknown method {self.method!r}; expected one of {METHODS}")
        if self.instances_per_n < 1 or self.workers < 1:
            raise ValueError("instances_per_n and workers must be at least 1")
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        """
        Builds a config from its dictionary form; missing keys take their defaults.

        Raises:
            ValueError: If the dictionary does not match the expected structure.
        """

        is_valid, message = validate_config_dict(data)
        if not is_valid:
            raise ValueError(message)
        return cls(**data)

    def config_hash(self) -> str:
        """SHA-256 over every field that can change a record (output paths and worker count excluded)."""

        relevant = {k: v for k, v in self.to_dict().items() if k not in ("csv_path", "json_path", "workers")}
        return hashlib.sha256(json.dumps(relevant, sort_keys=True).encode()).hexdigest()[:16]


EXPECTED_CONFIG_STRUCTURE: dict[str, Any] = {
    "name": str,
    "family": str,
    "n_values": list,
    "m_factor": (int, float),
    "strongly_connected": bool,
    "instances_per_n": int,
    "method": str,
    "k": int,
    "pair_count": int,
    "seed": int,
    "verify": bool,
    "cap": (int, type(None)),
    "constants": dict,
    "workers": int,
    "csv_path": (str, type(None)),
    "json_path": (str, type(None)),
    "params": dict,
}


def validate_config_dict(
    loaded_data: dict[str, Any], expected_data: dict[str, Any] = EXPECTED_CONFIG_STRUCTURE
) -> Tuple[bool, str]:
    """
    Validates a loaded config against the expected structure.

    Handles unexpected variables and incorrect variable types; missing variables fall back to defaults.

    Args:
        loaded_data (dict[str, Any]): The loaded config. A dictionary of variable names to values.
        expected_data (dict[str, Any]): A dictionary of variable names to types.

    Returns:
        Tuple[bool, str]: A boolean indicating success or failure, and a message detailing the outcome.
    """

    logger.debug("Validating experiment config")

    if not loaded_data:
        return False, "Loaded experiment config is empty"

    # Unexpected variables
    if unexpected_keys := set(loaded_data.keys()) - set(expected_data.keys()):
        return False, f"Unexpected variables loaded: {', '.join(sorted(unexpected_keys))}"

    for key, value in loaded_data.items():
        expected_type = expected_data[key]
        # bool is an int subclass
        wrong_bool = isinstance(value, bool) and expected_type is not bool
        if wrong_bool or not isinstance(value, expected_type):
            logger.debug(f"Expected {key}:{expected_type}\nReceived {key}:{type(value)}")
            return False, f"Variable '{key}' in loaded config is not of the expected type"

    if "n_values" in loaded_data and not all(
        isinstance(v, int) and not isinstance(v, bool) for v in loaded_data["n_values"]
    ):
        return False, "Variable 'n_values' must be a list of integers"

    logger.debug("Experiment config validated successfully")
    return True, "Loaded config validated successfully"


### ----------------------- Records ----------------------- ###
@dataclass
class BenchRecord:
    """
    One row of a benchmark report. Every field except the two timings is determined by the config.

    Attributes:
        - `value` (int): The sweep value the instance was generated from.
        - `instance` (int): Index of the instance within its sweep value.
        - `size` (int | None): Preserver edge count; None when the build failed verification.
        - `reference` (float): Theoretical reference value for the method.
        - `ratio` (float | None): `size / reference`.
        - `verified` (bool | None): Verification outcome; None when verification was off or over the cap.
        - `retries` (int): Verify-and-retry rounds used by randomized builders.
    """

    name: str
    family: str
    value: int
    instance: int
    n: int
    m: int
    pairs: int
    k: int
    method: str
    seed: int
    config_hash: str
    size: int | None
    reference: float
    ratio: float | None
    verified: bool | None
    retries: int
    build_seconds: float
    verify_seconds: float

    def to_dict(self) -> dict[str, Any]:
        return {column: getattr(self, column) for column in RECORD_COLUMNS}


def reference_size(method: str, n: int, k: int, pair_count: int) -> float:
    """Returns the theoretical size reference of a method on an instance with `n` vertices."""

    if method == "anchored":
        return float(2**k * n)
    if method == "minimal":
        return n + pair_count * math.sqrt(n)
    if method == "greedy":
        return n * math.sqrt(pair_count)
    if method == "certificate" or (method == "connectivity" and k <= 1):
        return float(2 * n)
    budget = k - 1 if method == "connectivity" else max(k, 1)
    return budget * 2**budget * n ** (2 - 1 / budget)


def job_seed(seed: int, value: int, index: int) -> int:
    """Derives the seed of one sweep job from the root seed."""

    return int(np.random.SeedSequence([seed, value, index]).generate_state(1, dtype=np.uint32)[0])


### ----------------------- Harness ----------------------- ###
def _instance(cfg: ExperimentConfig, value: int, seed: int) -> tuple[DiGraph, list[Pair]]:
    if cfg.family == "random":
        n = value
        m = min(n * (n - 1), max(n if cfg.strongly_connected else 0, round(cfg.m_factor * n)))
        return gen_random_digraph(n, m, seed, cfg.strongly_connected), []
    if cfg.family == "appendix-a":
        return gen_appendix_a(cfg.k, value).graph, []
    if cfg.family == "dual-failure":
        base = gen_base_disjoint_paths(cfg.params.get("p", 2), cfg.params.get("L", 2))
        layered = gen_dual_failure_graph(base, value)
        return layered.g, list(layered.pairs)

    file_handler = FileHandler()
    graph = file_handler.read_graph(cfg.params["graph_path"])
    pairs_path = cfg.params.get("pairs_path")
    return graph, [] if pairs_path is None else file_handler.read_pairs(pairs_path, graph.n)


def _build_and_verify(cfg: ExperimentConfig, graph: DiGraph, pairs: list[Pair], seed: int) -> dict[str, Any]:
    method, k, cap = cfg.method, cfg.k, cfg.cap
    outcome: dict[str, Any] = {"verified": None, "retries": 0, "verify_seconds": 0.0}

    start = time.perf_counter()
    if method == "anchored":
        preserver = build_anchored_ftrs(graph, 0, cfg.params.get("direction", "out"), k, cap=cap).preserver
    elif method == "minimal":
        preserver = build_pairwise_ftrs_minimal(graph, pairs, certify=False, cap=cap)
    elif method == "greedy":
        preserver = build_pairwise_ftrs_greedy(graph, pairs, certify=False, cap=cap)
    elif method == "1ft-scc":
        preserver = build_1ft_scc(graph, certify=False, cap=cap)
    elif method == "kft-scc":
        # The retry loop verifies every attempt itself.
        preserver = build_kft_scc(graph, k, seed, constants=cfg.constants, certify=cfg.verify, cap=cap)
        outcome["verified"] = preserver.verified
        outcome["retries"] = preserver.provenance.get("retries", 0)
    elif method == "certificate":
        preserver = build_certificate_preserver(graph)
    else:
        preserver = build_connectivity_certificate(
            graph, k, seed, vertex_mode=cfg.params.get("vertex_mode", False), certify=False, constants=cfg.constants, cap=cap
        )
    outcome["build_seconds"] = time.perf_counter() - start
    outcome["size"] = preserver.size

    if cfg.verify and method != "kft-scc":
        start = time.perf_counter()
        if method == "anchored":
            anchored = anchored_pairs(graph.n, 0, cfg.params.get("direction", "out"))
            report = verify_ftrs(graph, preserver.subgraph, anchored, k, cap=cap)
        elif method in PAIR_METHODS:
            report = verify_ftrs(graph, preserver.subgraph, pairs, 1, cap=cap)
        elif method == "connectivity":
            report = verify_connectivity_certificate(
                graph, preserver.subgraph, k, vertex_mode=cfg.params.get("vertex_mode", False)
            )
        else:
            report = verify_scc_preserver(graph, preserver.subgraph, 1 if method == "1ft-scc" else 0, cap=cap)
        outcome["verify_seconds"] = time.perf_counter() - start
        outcome["verified"] = report.passed
    return outcome


def run_job(cfg: ExperimentConfig, value: int, index: int) -> BenchRecord:
    """
    Runs one sweep job: generates the instance, builds and verifies the preserver.

    Raises:
        EnumerationBudgetError: If verification exceeds the enumeration cap.
    """

    seed = job_seed(cfg.seed, value, index)
    rng = np.random.default_rng(seed)
    graph, pairs = _instance(cfg, value, seed)
    if cfg.method in PAIR_METHODS and not pairs:
        pairs = random_pairs(graph.n, cfg.pair_count, rng)

    try:
        outcome = _build_and_verify(cfg, graph, pairs, seed)
    except VerificationFailedError as exc:
        logger.error(f"{cfg.name}: value={value} instance={index} failed verification: {exc}")
        outcome = {"size": None, "verified": False, "retries": 0, "build_seconds": 0.0, "verify_seconds": 0.0}
    except EnumerationBudgetError:
        logger.exception(f"{cfg.name}: value={value} instance={index} method={cfg.method} k={cfg.k} n={graph.n}")
        raise

    reference = reference_size(cfg.method, graph.n, cfg.k, len(pairs))
    size = outcome["size"]
    return BenchRecord(
        name=cfg.name,
        family=cfg.family,
        value=value,
        instance=index,
        n=graph.n,
        m=graph.m,
        pairs=len(pairs),
        k=cfg.k,
        method=cfg.method,
        seed=seed,
        config_hash=cfg.config_hash(),
        size=size,
        reference=reference,
        ratio=None if size is None or reference == 0 else size / reference,
        verified=outcome["verified"],
        retries=outcome["retries"],
        build_seconds=outcome["build_seconds"],
        verify_seconds=outcome["verify_seconds"],
    )


def records_to_dataframe(records: list[BenchRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.to_dict() for record in records], columns=RECORD_COLUMNS)


def run_experiment(cfg: ExperimentConfig, file_handler: FileHandler | None = None) -> list[BenchRecord]:
    """
    Runs every job of a sweep and writes the reports.

    Jobs are `(value, index)` for every sweep value and `index < instances_per_n`; with `workers > 1`
    they run in a process pool. Records are returned in job order regardless of completion order.

    Args:
        cfg (ExperimentConfig): The sweep.
        file_handler (FileHandler | None): Used for the CSV and JSON reports.

    Returns:
        list[BenchRecord]: One record per job.

    Raises:
        EnumerationBudgetError: If a verification exceeds the cap.
    """

    values = [0] if cfg.family == "file" else list(cfg.n_values)
    jobs = [(value, index) for value in values for index in range(cfg.instances_per_n)]
    logger.info(f"Running experiment '{cfg.name}': {len(jobs)} jobs, method={cfg.method}, workers={cfg.workers}")

    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(run_job, cfg, value, index) for value, index in jobs]
            records = [future.result() for future in futures]
    else:
        records = [run_job(cfg, value, index) for value, index in jobs]

    file_handler = file_handler or FileHandler()
    if cfg.csv_path:
        file_handler.export_dataframe_to_csv(cfg.csv_path, records_to_dataframe(records), append=True, allow_empty=True)
    if cfg.json_path:
        sidecar = {
            "config": cfg.to_dict(),
            "config_hash": cfg.config_hash(),
            "records": [record.to_dict() for record in records],
        }
        file_handler.save_data_to_json(cfg.json_path, sidecar)

    failed = sum(1 for record in records if record.verified is False)
    logger.info(f"Experiment '{cfg.name}' finished: {len(records)} records, {failed} failed verification")
    return records


def summarize_records(records: list[BenchRecord]) -> pd.DataFrame:
    """
    Summarizes records per (method, n): mean preserver size, reference, ratio, and whether all verified.
    """

    df = records_to_dataframe(records)
    if df.empty:
        return pd.DataFrame(columns=["method", "n", "instances", "mean_size", "reference", "mean_ratio", "all_verified"])

    df["size"] = pd.to_numeric(df["size"])
    df["ratio"] = pd.to_numeric(df["ratio"])
    df["verified_flag"] = df["verified"].map(lambda v: v is True)
    summary = (
        df.groupby(["method", "n"], sort=True)
        .agg(
            instances=("size", "size"),
            mean_size=("size", "mean"),
            reference=("reference", "mean"),
            mean_ratio=("ratio", "mean"),
            all_verified=("verified_flag", "all"),
        )
        .reset_index()
    )
    return summary
