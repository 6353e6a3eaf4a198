"""
This module provides a `Controller` class for the preservers toolkit.

Serves as the command-line front end: it parses arguments, delegates the work to the builders, verifiers,
generators and the benchmark harness, writes results through the file handler, and maps outcomes to exit codes.

Key functionalities:
    - `gen`: writes lower-bound or random instances (graph, pairs and provenance JSON).
    - `build-ftrs`: builds anchored or pairwise fault-tolerant reachability preservers.
    - `build-scc`: builds fault-tolerant SCC preservers and connectivity certificates.
    - `verify`: exhaustively verifies a candidate subgraph.
    - `bench`: runs a benchmark sweep from a JSON config or inline flags.

Exit codes: 0 when everything passed, 1 on a verification failure or an error, 2 when an exhaustive
verification would exceed the enumeration cap.

Main dependencies:
    - `argparse`: for the command-line surface.
    - `file_handler`, `bench`, `ftrs`, `scc_preserver`, `lowerbound_gen`, `verify`: modules from this project.
"""

import argparse
import json
import logging
import sys
from typing import Any, Sequence

import logging_utils
import settings
from bench import ExperimentConfig, gen_random_digraph, run_experiment, summarize_records
from errors import EnumerationBudgetError, InvariantViolationError, VerificationFailedError
from file_handler import FileHandler
from ftrs import DIRECTIONS, build_anchored_ftrs, build_pairwise_ftrs_greedy, build_pairwise_ftrs_minimal
from lowerbound_gen import (
    check_appendix_a_forcing,
    check_base_properties,
    check_forced_paths,
    gen_appendix_a,
    gen_base_disjoint_paths,
    gen_dual_failure_graph,
)
from scc_preserver import build_1ft_scc, build_connectivity_certificate, build_kft_scc
from verify import STRATEGIES, verify_connectivity_certificate, verify_ftrs, verify_scc_preserver

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BUDGET = 2


class Controller:
    """
    The command-line controller. It parses arguments and dispatches each subcommand to its handler.

    Attributes:
        - `file_handler`: An instance of the `FileHandler` class for all file I/O.
        - `parser`: The `argparse` parser with one subparser per subcommand.

    Methods:
        - `build_parser`: Builds the argument parser.
        - `run`: Parses arguments, runs a subcommand and returns its exit code.
        - `gen`: Handles the `gen` subcommand.
        - `build_ftrs`: Handles the `build-ftrs` subcommand.
        - `build_scc`: Handles the `build-scc` subcommand.
        - `verify`: Handles the `verify` subcommand.
        - `bench`: Handles the `bench` subcommand.
    """

    def __init__(self, file_handler: FileHandler | None = None) -> None:
        logger.info("Initializing controller")

        self.file_handler = file_handler or FileHandler()
        self.parser = self.build_parser()

    ### ----------------------- Parser ----------------------- ###
    def build_parser(self) -> argparse.ArgumentParser:
        """Builds the parser; every subcommand shares `--seed`, `--graph`, `--out`, `--cap` and `--log-level`."""

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--seed", type=int, default=0, help="Root seed for randomized steps")
        common.add_argument("--graph", help="Input graph file ('n m' header, then 'tail head' lines)")
        common.add_argument("--out", help="Output path")
        common.add_argument("--cap", type=int, default=None, help="Enumeration cap (overrides FTPRES_ENUM_CAP)")
        common.add_argument("--log-level", default=None, help="Logging level (overrides FTPRES_LOG_LEVEL)")

        parser = argparse.ArgumentParser(prog="ftpres", description="Fault-tolerant reachability and SCC preservers")
        commands = parser.add_subparsers(dest="command", required=True)

        gen = commands.add_parser("gen", parents=[common], help="Generate an instance")
        gen.add_argument("--family", choices=("appendix-a", "dual-failure", "random"), required=True)
        gen.add_argument("--k", type=int, default=1, help="Tree height (appendix-a)")
        gen.add_argument("--n-y", type=int, default=2, help="Size of Y (appendix-a)")
        gen.add_argument("--p", type=int, default=2, help="Number of base pairs (dual-failure)")
        gen.add_argument("--L", type=int, default=2, help="Base path length (dual-failure)")
        gen.add_argument("--K", type=int, default=None, help="Layer parameter (dual-failure)")
        gen.add_argument("--r", type=int, default=1, help="K = L^r when --K is not given (dual-failure)")
        gen.add_argument("--n", type=int, default=8, help="Vertices (random)")
        gen.add_argument("--m", type=int, default=16, help="Edges (random)")
        gen.add_argument("--strongly-connected", action="store_true", help="Plant a Hamiltonian cycle (random)")
        gen.add_argument("--check", action="store_true", help="Run the family's structural checker")
        gen.set_defaults(handler=self.gen)

        ftrs = commands.add_parser("build-ftrs", parents=[common], help="Build a fault-tolerant reachability preserver")
        ftrs.add_argument("--method", choices=("anchored", "minimal", "greedy"), required=True)
        ftrs.add_argument("--pairs", help="Pair file (minimal, greedy)")
        ftrs.add_argument("--anchor", type=int, default=0, help="Anchor vertex (anchored)")
        ftrs.add_argument("--direction", choices=DIRECTIONS, default="out", help="Anchor direction (anchored)")
        ftrs.add_argument("--k", type=int, default=1, help="Failure budget (anchored)")
        ftrs.add_argument("--no-verify", action="store_true", help="Skip self-certification (pairwise)")
        ftrs.set_defaults(handler=self.build_ftrs)

        scc = commands.add_parser("build-scc", parents=[common], help="Build a fault-tolerant SCC preserver")
        scc.add_argument("--k", type=int, default=1, help="Failure budget, or connectivity with --connectivity")
        scc.add_argument("--alpha", type=float, default=None, help="Sampling balance (defaults to 1/k)")
        scc.add_argument("--cL", type=float, default=None, help="Iteration constant")
        scc.add_argument("--cp", type=float, default=None, help="Edge sampling constant")
        scc.add_argument("--cq", type=float, default=None, help="Anchor count constant")
        scc.add_argument("--max-retries", type=int, default=None, help="Verify-and-retry limit")
        scc.add_argument("--no-verify", action="store_true", help="Skip verification")
        scc.add_argument("--whole-graph", action="store_true", help="Keep a condensation skeleton (k = 1)")
        scc.add_argument("--connectivity", action="store_true", help="Build a k-connectivity certificate")
        scc.add_argument("--vertex-mode", action="store_true", help="Vertex instead of edge connectivity")
        scc.set_defaults(handler=self.build_scc)

        verify = commands.add_parser("verify", parents=[common], help="Verify a candidate preserver")
        verify.add_argument("--sub", required=True, help="Candidate subgraph file")
        verify.add_argument("--pairs", help="Pair file (mode ftrs)")
        verify.add_argument("--k", type=int, default=1)
        verify.add_argument("--mode", choices=("ftrs", "scc", "cert"), default="scc")
        verify.add_argument("--strategy", choices=STRATEGIES, default="pruned")
        verify.add_argument("--vertex-mode", action="store_true", help="Vertex connectivity (mode cert)")
        verify.set_defaults(handler=self.verify)

        bench = commands.add_parser("bench", parents=[common], help="Run a benchmark sweep")
        bench.add_argument("--config", help="JSON experiment config; inline flags are ignored when given")
        bench.add_argument("--name", default="experiment")
        bench.add_argument("--family", choices=("random", "appendix-a", "dual-failure", "file"), default="random")
        bench.add_argument("--n-values", type=int, nargs="*", default=[6, 8, 10])
        bench.add_argument("--m-factor", type=float, default=2.0)
        bench.add_argument("--instances", type=int, default=1)
        bench.add_argument("--method", default="1ft-scc")
        bench.add_argument("--k", type=int, default=1)
        bench.add_argument("--pair-count", type=int, default=4)
        bench.add_argument("--workers", type=int, default=1)
        bench.add_argument("--no-verify", action="store_true")
        bench.set_defaults(handler=self.bench)

        return parser

    def run(self, argv: Sequence[str] | None = None) -> int:
        """
        Parses `argv`, runs the chosen subcommand and returns its exit code.

        Library errors are logged and reported on stderr; they never escape as tracebacks.
        """

        args = self.parser.parse_args(argv)
        if args.log_level:
            current = settings.get_settings()
            logging_utils.setup_logging(args.log_level, current.log_file)
        logger.info(f"Running command '{args.command}'")

        try:
            return args.handler(args)

        except EnumerationBudgetError as exc:
            logger.exception("")
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET

        except VerificationFailedError as exc:
            logger.exception("")
            print(f"verification failed: {exc}", file=sys.stderr)
            if exc.report is not None:
                self._emit(exc.report.to_dict())
            return EXIT_FAILED

        except InvariantViolationError as exc:
            logger.exception("")
            print(f"internal error: {exc}", file=sys.stderr)
            return EXIT_FAILED

        except (ValueError, KeyError, OSError) as exc:
            logger.exception("")
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAILED

    @staticmethod
    def _emit(payload: dict[str, Any]) -> None:
        print(json.dumps(payload, indent=2, default=str))

    def _require_graph(self, args: argparse.Namespace):
        if not args.graph:
            raise ValueError(f"'{args.command}' needs --graph")
        return self.file_handler.read_graph(args.graph)

    ### ----------------------- Subcommands ----------------------- ###
    def gen(self, args: argparse.Namespace) -> int:
        """
        Generates an instance and writes `<out>` (graph), `<out>.pairs` (when the family has pairs)
        and `<out>.json` (provenance). Prints the provenance to stdout.
        """

        provenance: dict[str, Any] = {"family": args.family, "seed": args.seed}
        pairs = []
        report = None

        if args.family == "appendix-a":
            instance = gen_appendix_a(args.k, args.n_y)
            graph = instance.graph
            provenance.update(k=args.k, n_y=args.n_y, leaves=list(instance.leaves), y_vertices=list(instance.y_vertices))
            if args.check:
                report = check_appendix_a_forcing(graph, args.k, cap=args.cap)

        elif args.family == "dual-failure":
            K = args.K if args.K is not None else args.L**args.r
            base = gen_base_disjoint_paths(args.p, args.L)
            layered = gen_dual_failure_graph(base, K)
            graph, pairs = layered.g, list(layered.pairs)
            provenance.update(
                p=args.p,
                L=args.L,
                K=K,
                base_pairs=[list(pair) for pair in base.pairs],
                expected_vertex_count=layered.expected_vertex_count(),
                expected_edge_count=layered.expected_edge_count(),
            )
            if args.check:
                report = check_base_properties(base)
                if report.passed:
                    report = check_forced_paths(layered, base)

        else:
            graph = gen_random_digraph(args.n, args.m, args.seed, args.strongly_connected)
            provenance.update(strongly_connected=args.strongly_connected)

        provenance.update(n=graph.n, m=graph.m, pairs=len(pairs))
        if report is not None:
            provenance["check"] = report.to_dict()

        if args.out:
            self.file_handler.write_graph(args.out, graph)
            if pairs:
                self.file_handler.write_pairs(f"{args.out}.pairs", pairs)
            self.file_handler.save_data_to_json(f"{args.out}.json", provenance)

        self._emit(provenance)
        return EXIT_OK if report is None or report.passed else EXIT_FAILED

    def build_ftrs(self, args: argparse.Namespace) -> int:
        graph = self._require_graph(args)

        if args.method == "anchored":
            preserver = build_anchored_ftrs(graph, args.anchor, args.direction, args.k, cap=args.cap).preserver
        else:
            if not args.pairs:
                raise ValueError(f"Method '{args.method}' needs --pairs")
            pairs = self.file_handler.read_pairs(args.pairs, graph.n)
            builder = build_pairwise_ftrs_minimal if args.method == "minimal" else build_pairwise_ftrs_greedy
            preserver = builder(graph, pairs, certify=not args.no_verify, cap=args.cap)

        return self._finish_build(args, preserver)

    def build_scc(self, args: argparse.Namespace) -> int:
        graph = self._require_graph(args)
        constants = {
            name: value
            for name, value in (("c_L", args.cL), ("c_p", args.cp), ("c_q", args.cq))
            if value is not None
        }

        if args.connectivity:
            preserver = build_connectivity_certificate(
                graph,
                args.k,
                args.seed,
                vertex_mode=args.vertex_mode,
                certify=not args.no_verify,
                alpha=args.alpha,
                constants=constants,
                max_retries=args.max_retries,
                cap=args.cap,
            )
        elif args.k == 1 and args.whole_graph:
            preserver = build_1ft_scc(graph, whole_graph=True, certify=not args.no_verify, cap=args.cap)
        else:
            preserver = build_kft_scc(
                graph,
                args.k,
                args.seed,
                alpha=args.alpha,
                constants=constants,
                certify=not args.no_verify,
                max_retries=args.max_retries,
                cap=args.cap,
            )

        return self._finish_build(args, preserver)

    def _finish_build(self, args: argparse.Namespace, preserver) -> int:
        if args.out:
            self.file_handler.write_preserver(args.out, preserver, f"{args.out}.json")
        summary = preserver.to_dict()
        summary.pop("edges")
        self._emit(summary)
        return EXIT_FAILED if preserver.verified is False else EXIT_OK

    def verify(self, args: argparse.Namespace) -> int:
        graph = self._require_graph(args)
        sub = self.file_handler.read_subgraph(args.sub, graph)

        if args.mode == "ftrs":
            if not args.pairs:
                raise ValueError("Mode 'ftrs' needs --pairs")
            pairs = self.file_handler.read_pairs(args.pairs, graph.n)
            report = verify_ftrs(graph, sub, pairs, args.k, cap=args.cap, strategy=args.strategy)
        elif args.mode == "scc":
            report = verify_scc_preserver(graph, sub, args.k, cap=args.cap, strategy=args.strategy)
        else:
            report = verify_connectivity_certificate(graph, sub, args.k, vertex_mode=args.vertex_mode)

        if args.out:
            self.file_handler.save_data_to_json(args.out, report.to_dict())
        self._emit(report.to_dict())
        return EXIT_OK if report.passed else EXIT_FAILED

    def bench(self, args: argparse.Namespace) -> int:
        """
        Runs a sweep. `--out` names the CSV report; the JSON sidecar goes next to it.
        """

        if args.config:
            cfg = ExperimentConfig.from_dict(self.file_handler.load_json(args.config))
        else:
            params = {"graph_path": args.graph} if args.family == "file" else {}
            cfg = ExperimentConfig(
                name=args.name,
                family=args.family,
                n_values=list(args.n_values),
                m_factor=args.m_factor,
                instances_per_n=args.instances,
                method=args.method,
                k=args.k,
                pair_count=args.pair_count,
                seed=args.seed,
                verify=not args.no_verify,
                cap=args.cap,
                workers=args.workers,
                params=params,
            )
        if args.out:
            cfg.csv_path = args.out
            cfg.json_path = f"{args.out.removesuffix('.csv')}.json"

        records = run_experiment(cfg, self.file_handler)
        summary = summarize_records(records)
        logging_utils.format_and_log_data_for_debug(logger, {"summary": summary})
        print(summary.to_string(index=False))
        return EXIT_FAILED if any(record.verified is False for record in records) else EXIT_OK
