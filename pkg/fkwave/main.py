import sys

from fkwave.cli import main as cli_main
from fkwave.core.config import get_settings
from fkwave.core.logging import setup_logging


def main() -> None:
    # Set up logging configuration
    setup_logging(get_settings().LOG_LEVEL)
    sys.exit(cli_main())
