"""
This module provides a `FileHandler` class for the preservers toolkit.

Key functionalities:
    - Reading and writing graphs in the edge-list text format (first line "n m", then "tail head" lines).
    - Reading and writing pair files ("s t" lines).
    - Writing preservers as an edge list, an edge-id sidecar and an optional provenance JSON.
    - Loading data from JSON files and saving data to JSON files.
    - Exporting pandas DataFrames to CSV files, optionally appending.

Main dependencies:
    - `pandas`: for benchmark tables.
    - `chardet`: for detecting the character encoding of graph and pair files.
    - `json`: for parsing and saving JSON files.
"""

import logging
import os
import chardet
import pandas as pd
import json
from typing import Any

from errors import GraphError, GraphFormatError
from graph_core import DiGraph, Pair, Subgraph

logger = logging.getLogger(__name__)


class FileHandler:
    """
    Reads and writes the graph, pair, preserver, report and table files of the toolkit.

    Methods:
        - `__init__`: Initializes the `FileHandler` object.
        - `read_graph`: Reads a graph file and returns a `DiGraph`.
        - `read_pairs`: Reads a pair file and returns the pairs in file order.
        - `read_subgraph`: Reads an edge-list file as a subgraph of a parent graph.
        - `write_graph`: Writes a graph in the edge-list format.
        - `write_pairs`: Writes a pair file.
        - `write_preserver`: Writes a preserver with its edge ids and provenance.
        - `load_json`: Reads a config, provenance record or report.
        - `export_dataframe_to_csv`: Writes or appends a sweep table.
        - `save_data_to_json`: Writes a provenance record, report or config.
    """

    def __init__(self) -> None:
        logger.info("Initializing file handler")

    def _read_lines(self, file_path: str) -> list[str]:
        with open(file_path, "rb") as file:
            raw = file.read()
        encoding = chardet.detect(raw)["encoding"] or "utf-8"  # Detect encoding
        return raw.decode(encoding).splitlines()

    @staticmethod
    def _parse_ints(line: str, line_number: int, expected: int) -> list[int]:
        fields = line.split()
        if len(fields) != expected:
            raise GraphFormatError(f"expected {expected} integers, got {line.strip()!r}", line_number)
        try:
            return [int(field) for field in fields]
        except ValueError:
            raise GraphFormatError(f"expected integers, got {line.strip()!r}", line_number) from None

    def read_graph(self, file_path: str) -> DiGraph:
        """
        Reads a graph file and returns it as a `DiGraph`.

        Blank lines are ignored. The header gives the vertex count `n` and the edge count `m`,
        followed by exactly `m` edge lines with 0-based vertex ids.

        Args:
            file_path (str): The path of the graph file to be read.

        Returns:
            DiGraph: The graph, with canonical edge ids.

        Raises:
            GraphFormatError: If a line is malformed, an id is out of range, an edge is a self-loop or
                a duplicate, or the edge count does not match the header.
        """

        try:
            logger.info('Reading graph file: "%s"', file_path)
            numbered = [(i, line) for i, line in enumerate(self._read_lines(file_path), start=1) if line.strip()]
            if not numbered:
                raise GraphFormatError("missing header 'n m'", 1)

            header_number, header = numbered[0]
            n, m = self._parse_ints(header, header_number, 2)
            if n < 0 or m < 0:
                raise GraphFormatError(f"negative header values n={n}, m={m}", header_number)
            body = numbered[1:]
            if len(body) != m:
                raise GraphFormatError(f"header announces {m} edges but the file has {len(body)}", header_number)

            edges = []
            seen = set()
            for line_number, line in body:
                tail, head = self._parse_ints(line, line_number, 2)
                if not (0 <= tail < n and 0 <= head < n):
                    raise GraphFormatError(f"edge ({tail}, {head}) has a vertex outside 0..{n - 1}", line_number)
                if tail == head:
                    raise GraphFormatError(f"self-loop at vertex {tail}", line_number)
                if (tail, head) in seen:
                    raise GraphFormatError(f"duplicate edge ({tail}, {head})", line_number)
                seen.add((tail, head))
                edges.append((tail, head))

            graph = DiGraph(n, edges)
            logger.info(f"Graph read successfully: n={graph.n}, m={graph.m}")
            return graph

        except Exception:
            logger.exception("")
            raise

    def read_pairs(self, file_path: str, n: int) -> list[Pair]:
        """
        Reads a pair file with one "s t" pair per line.

        Args:
            file_path (str): The path of the pair file.
            n (int): Vertex count of the graph the pairs refer to.

        Returns:
            list[Pair]: The pairs in file order.

        Raises:
            GraphFormatError: If a line is malformed or an id is out of range.
        """

        try:
            logger.info('Reading pair file: "%s"', file_path)
            pairs = []
            for line_number, line in enumerate(self._read_lines(file_path), start=1):
                if not line.strip():
                    continue
                s, t = self._parse_ints(line, line_number, 2)
                if not (0 <= s < n and 0 <= t < n):
                    raise GraphFormatError(f"pair ({s}, {t}) has a vertex outside 0..{n - 1}", line_number)
                pairs.append((s, t))

            logger.info(f"Read {len(pairs)} pairs")
            return pairs

        except Exception:
            logger.exception("")
            raise

    def read_subgraph(self, file_path: str, parent: DiGraph) -> Subgraph:
        """
        Reads an edge-list file and maps it onto the edge ids of `parent`.

        Raises:
            GraphFormatError: If the file is malformed or its vertex count differs from the parent's.
            GraphError: If an edge is not an edge of `parent`.
        """

        graph = self.read_graph(file_path)
        try:
            if graph.n != parent.n:
                raise GraphFormatError(f"subgraph has {graph.n} vertices, parent has {parent.n}", 1)
            return parent.subgraph(parent.edge_id(tail, head) for tail, head in graph.edges)

        except GraphError:
            logger.exception("")
            raise

    def write_graph(self, file_path: str, graph: DiGraph | Subgraph) -> None:
        """
        Writes a graph (or the edges of a subgraph) in the edge-list format.

        Args:
            file_path (str): The path where the graph file will be saved.
            graph (DiGraph | Subgraph): The graph to write; edges in ascending id order.
        """

        try:
            edges = graph.edge_list() if isinstance(graph, Subgraph) else list(graph.edges)
            logger.info('Writing graph to: "%s"', file_path)
            with open(file_path, "w", encoding="utf-8") as f:
                f.write(f"{graph.n} {len(edges)}\n")
                f.writelines(f"{tail} {head}\n" for tail, head in edges)

        except Exception:
            logger.exception("")
            raise

    def write_pairs(self, file_path: str, pairs: list[Pair]) -> None:
        try:
            logger.info('Writing %d pairs to: "%s"', len(pairs), file_path)
            with open(file_path, "w", encoding="utf-8") as f:
                f.writelines(f"{s} {t}\n" for s, t in pairs)

        except Exception:
            logger.exception("")
            raise

    def write_preserver(self, file_path: str, preserver: Any, provenance_path: str | None = None) -> list[str]:
        """
        Writes a preserver as an edge list, its parent edge ids to `<file_path>.ids`, and optionally
        its full `to_dict()` record to a JSON file.

        Args:
            file_path (str): Path of the edge-list file.
            preserver (Preserver): The preserver to write.
            provenance_path (str | None): Path of the provenance JSON, or None to skip it.

        Returns:
            list[str]: The paths written.
        """

        self.write_graph(file_path, preserver.subgraph)
        ids_path = f"{file_path}.ids"
        try:
            with open(ids_path, "w", encoding="utf-8") as f:
                f.writelines(f"{e}\n" for e in preserver.edge_ids())
        except Exception:
            logger.exception("")
            raise

        written = [file_path, ids_path]
        if provenance_path is not None:
            self.save_data_to_json(provenance_path, preserver.to_dict())
            written.append(provenance_path)
        return written

    def load_json(self, file_path: str) -> dict[str, Any]:
        """
        Reads an experiment config, provenance record or verification report.

        Args:
            file_path (str): A `.json` path.

        Returns:
            dict[str, Any]: The parsed object; a JSON `null` gives `{}`.

        Raises:
            ValueError: If the path does not end in `.json` or the content is not valid JSON.
        """

        try:
            if not file_path.endswith(".json"):
                raise ValueError(f"Expected a .json file, got {file_path!r}")

            logger.info('Reading json: "%s"', file_path)
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f) or {}

            logger.debug(f"Read {len(data)} top-level keys")
            return data

        except Exception:
            logger.exception("")
            raise

    def export_dataframe_to_csv(
        self, file_path: str, export_df: pd.DataFrame, append: bool = False, allow_empty: bool = False
    ) -> None:
        """
        Writes a sweep table as CSV.

        Args:
            file_path (str): A `.csv` path.
            export_df (pd.DataFrame): Rows to write; the index is not written.
            append (bool): Append rows to an existing file; the header is written only for a new file.
            allow_empty (bool): Write a header-only file for an empty DataFrame instead of raising.

        Raises:
            pd.errors.EmptyDataError: If the DataFrame is empty and `allow_empty` is False.
            ValueError: If the path does not end in `.csv`.
        """

        try:
            if export_df.empty and not allow_empty:
                logger.error(f"Refusing to write an empty table to {file_path}")
                raise pd.errors.EmptyDataError("Dataframe is empty")

            if not file_path.endswith(".csv"):
                raise ValueError(f"Expected a .csv file, got {file_path!r}")

            exists = append and os.path.exists(file_path) and os.path.getsize(file_path) > 0
            export_df.to_csv(file_path, index=False, mode="a" if exists else "w", header=not exists)
            logger.info('%s %d rows to "%s"', "Appended" if exists else "Wrote", len(export_df), file_path)

        except Exception:
            logger.exception("")
            raise

    def save_data_to_json(self, file_path: str, data_to_save: dict[str, Any], handler=None) -> None:
        """
        Writes a provenance record, report or config as indented JSON.

        Args:
            file_path (str): A `.json` path.
            data_to_save (dict[str, Any]): A non-empty JSON-serializable mapping.
            handler (optional): `default=` hook for objects `json` cannot encode.

        Raises:
            ValueError: If `data_to_save` is empty or the path does not end in `.json`.
        """

        try:
            if not data_to_save:
                logger.error(f"Nothing to write to {file_path}")
                raise ValueError("Data to save is empty")

            if not file_path.endswith(".json"):
                raise ValueError(f"Expected a .json file, got {file_path!r}")

            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(data_to_save, f, default=handler, indent=2)

            logger.info('Wrote json: "%s"', file_path)

        except Exception:
            logger.exception("")
            raise
