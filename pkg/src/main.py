"""
This is the main entry point of the preservers toolkit.

The script sets up logging from the environment settings, initializes the controller
and runs the requested subcommand.

Main dependencies:
    - `settings`: Resolves the log level, log file and enumeration defaults from `FTPRES_*` variables.
    - `controller`: Parses the command line and dispatches to builders, verifiers, generators and the benchmark harness.
    - `logging_utils`: Initializes logging and provides log formatting functionality.
"""

import logging
import sys
from controller import Controller
from logging_utils import setup_logging
from settings import get_settings


def main(argv: list[str] | None = None) -> int:
    logger = logging.getLogger(__name__)
    logger.info("Application starting")
    exit_code = Controller().run(argv)
    logger.info(f"Application terminated with exit code {exit_code}")
    return exit_code


if __name__ == "__main__":
    current = get_settings()
    setup_logging(current.log_level, current.log_file)
    sys.exit(main())
