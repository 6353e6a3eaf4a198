"""
This module provides utility functions for logging and debugging within the preservers toolkit.

By default logs are written to 'app.log' in the working directory.

Functions:
    - setup_logging: Configures the logging settings for the application.
    - format_and_log_data_for_debug: Formats and logs attributes based on their data types for improved readability in debugging.

Main dependencies:
    - pandas: for summarizing report tables
    - inspect: for formatting log messages
"""

import logging
from typing import Any
import pandas as pd
import inspect


def setup_logging(level: str | int = logging.INFO, log_file: str | None = "app.log") -> None:
    """
    Initializes logging with a specified format, log level, and output file.
    Also supresses noisy libraries.

    Args:
        level (str | int): Logging level name or number.
        log_file (str | None): File to write logs to (overwritten on each run). None logs to stderr.
    """

    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    options: dict[str, Any] = {
        "level": level,
        "format": "%(asctime)s - %(filename)s:%(lineno)d - %(levelname)s - %(message)s",
        "force": True,
    }
    if log_file:
        options.update(filename=log_file, filemode="w")
    logging.basicConfig(**options)

    # Suppressing noisy libraries
    logging.getLogger("chardet").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)

    logging.info("Logging initialized")


def format_and_log_data_for_debug(logger: logging.Logger, attributes: dict[str, Any]) -> None:
    """
    Formats various types of attributes and logs them for debugging purposes.

    Args:
        logger (logging.Logger): The logger instance used to log the messages.
        attributes (dict[str, Any]): A dictionary containing attribute names and their values.

    The method inspects each attribute and decides on a logging format based on its data type:
        - For graphs and subgraphs, it logs vertex and edge counts.
        - For pandas DataFrames, it logs the head of the DataFrame.
        - For dictionaries whose values are large collections, it logs keys and value counts.
        - For other dictionaries, it logs the first 5 items.
        - For collections with more than 10 items, it logs their length.
        - For other data types, it logs the value directly.

    Usage:
        `logging_utils.format_and_log_data_for_debug(logger, {"preserver": preserver.subgraph})`
    """

    if not logger.isEnabledFor(logging.DEBUG):
        return

    log_messages = ["Attributes:\n"]
    for name, obj in attributes.items():
        if hasattr(obj, "edge_mask") and hasattr(obj, "parent"):
            log_message = f"{name} (subgraph): n={obj.n}, edges={len(obj.edge_mask)}"
        elif hasattr(obj, "out_edges") and hasattr(obj, "m"):
            log_message = f"{name} (graph): n={obj.n}, m={obj.m}"
        elif isinstance(obj, pd.DataFrame):
            log_message = f"{name} (head):\n{obj.head()}"
        elif isinstance(obj, dict):
            if any(len(v) > 10 for v in obj.values() if isinstance(v, (list, set, tuple, dict))):
                summarized_dict = {
                    k: len(v) if isinstance(v, (list, set, tuple, dict)) else "Non-collection"
                    for k, v in obj.items()
                }
                log_message = f"{name} (some keys have many values, showing keys and counts):\n{summarized_dict}"
            else:
                limit = 5
                dict_head = dict(list(obj.items())[:limit])
                log_message = f"{name} (first {limit} items):\n{dict_head}"
        elif isinstance(obj, (list, set, tuple, frozenset)) and len(obj) > 10:
            log_message = f"{name} ({type(obj).__name__} of {len(obj)} items)"
        else:
            log_message = f"{name}:\n{obj}"

        log_messages.append(inspect.cleandoc(log_message) + "\n")

    logger.debug("\n".join(log_messages))
