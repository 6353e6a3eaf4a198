"""
This module provides the runtime configuration for the preservers toolkit.

Values come from, in increasing priority: the defaults below, `FTPRES_*` environment variables,
and command-line flags (applied by the `controller`).

Environment variables:
    - `FTPRES_ENUM_CAP`: maximum number of failure sets an exhaustive verification may enumerate.
    - `FTPRES_MAX_RETRIES`: verify-and-retry attempts for randomized SCC preservers.
    - `FTPRES_LOG_LEVEL`: logging level name.
    - `FTPRES_LOG_FILE`: log file path, empty for stderr.
"""

import logging
import os
from dataclasses import dataclass
from typing import Mapping

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 5_000_000
DEFAULT_MAX_RETRIES = 25

# Procedure B constants. The asymptotic set gives huge iteration counts on small graphs.
# At k = 2, c_q = 0.5 keeps the anchor count below n for every n >= 2; c_q = 1 reaches n up to n ~ 100.
DESK_CONSTANTS = {"c_L": 4.0, "c_p": 2.0, "c_q": 0.5}
ASYMPTOTIC_CONSTANTS = {"c_L": 16.0, "c_p": 2.0, "c_q": 16.0}


@dataclass(frozen=True)
class Settings:
    """
    Immutable bundle of configuration values.

    Attributes:
        - `enumeration_cap` (int): Cap on failure sets per exhaustive verification.
        - `max_retries` (int): Maximum verify-and-retry attempts in `build_kft_scc`.
        - `log_level` (str): Logging level name.
        - `log_file` (str | None): Log file path, or None to log to stderr.
    """

    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    max_retries: int = DEFAULT_MAX_RETRIES
    log_level: str = "INFO"
    log_file: str | None = "app.log"

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "Settings":
        """
        Builds settings from `FTPRES_*` environment variables, falling back to defaults.

        Args:
            environ (Mapping[str, str] | None): Environment to read. Defaults to `os.environ`.

        Returns:
            Settings: The resolved settings.

        Raises:
            ValueError: If a numeric variable is not a positive integer.
        """

        environ = os.environ if environ is None else environ
        log_file = environ.get("FTPRES_LOG_FILE", "app.log")
        return cls(
            enumeration_cap=_positive_int(environ, "FTPRES_ENUM_CAP", DEFAULT_ENUMERATION_CAP),
            max_retries=_positive_int(environ, "FTPRES_MAX_RETRIES", DEFAULT_MAX_RETRIES),
            log_level=environ.get("FTPRES_LOG_LEVEL", "INFO").upper(),
            log_file=log_file or None,
        )


def _positive_int(environ: Mapping[str, str], name: str, default: int) -> int:
    raw = environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def get_settings() -> Settings:
    """Returns settings read from the current environment."""

    return Settings.from_env()


def resolve_cap(cap: int | None) -> int:
    """Returns `cap`, or the environment/default enumeration cap when `cap` is None."""

    if cap is not None:
        if cap <= 0:
            raise ValueError(f"Enumeration cap must be positive, got {cap}")
        return cap
    return get_settings().enumeration_cap
