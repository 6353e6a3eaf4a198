"""
Fault-tolerant preservers toolkit

This package builds and verifies sparse subgraphs that keep reachability or strongly connected components
intact under up to k edge failures, and generates the instance families on which such subgraphs must be dense.

Key features:
    - Reachability preservers: anchored k-fault-tolerant preservers for one source (or sink) and all vertices,
      and two pairwise 1-fault-tolerant builders (edge pruning, and high-frequency vertex selection).
    - SCC preservers: exact certificates, a deterministic 1-fault-tolerant builder, a randomized lift to any k
      with verify-and-retry, and k-edge / k-vertex connectivity certificates.
    - Verification: exhaustive failure enumeration with an enumeration cap, minimality checks and flow-based connectivity.
    - Lower-bound instances: binary-tree instances where every edge is critical, and layered dual-failure instances
      with forced paths.
    - Benchmarks: parameter sweeps with CSV and JSON reports.

Modules:
    - `main`: The entry point of the application, setting up logging and running the controller.
    - `controller`: The command-line surface (`gen`, `build-ftrs`, `build-scc`, `verify`, `bench`).
    - `graph_core`: Digraphs, subgraph views, traversals, cut edges, SCCs and vertex splitting.
    - `verify`: Exhaustive verifiers and connectivity oracles.
    - `ftrs`: Reachability preserver builders.
    - `scc_preserver`: SCC preserver builders and connectivity certificates.
    - `lowerbound_gen`: Lower-bound instance generators and checkers.
    - `bench`: Random graphs and the benchmark harness.
    - `file_handler`: Provides functionalities for reading and writing graphs, pairs, preservers, JSON and CSV files.
    - `settings`: Environment-driven configuration.
    - `errors`: The exception hierarchy.
    - `logging_utils`: Configures logging for the application and provides utility functions for formatting logs.
"""
