"""
This module is the process entry point of the speaker identification toolkit.

Functions:
    - main: Check constants, initialize logging and run one command.
    - run: Console-script wrapper that exits with main's code.
"""

import sys
from typing import List, Optional

from cli.cli import run as run_cli
from shared.constants import check_variables
from utils.logger import LogHandler


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point for checking constants, initializing logging and dispatching the command.

    Args:
        argv (Optional[List[str]]): Command-line arguments without the program name.

    Returns:
        int: The process exit code.
    """
    check_variables()
    LogHandler()
    return run_cli(argv)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
