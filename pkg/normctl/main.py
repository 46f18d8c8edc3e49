"""Main normctl entry point."""

import logging
import sys
from typing import List, Optional

from normctl.cli.commands import build_parser, dispatch
from normctl.cli.error_handlers import handle_exception
from normctl.config import settings
from normctl.core.exceptions import UsageError

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None) -> None:
    """Log to stderr so that JSON and CSV on stdout stay clean."""
    name = (level or settings.log_level).upper()
    if not isinstance(logging.getLevelName(name), int):
        raise UsageError(f"Unknown log level {name!r}", errors={"log_level": name})
    logging.basicConfig(
        level=name,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr
    )


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 after --help
        return e.code if isinstance(e.code, int) else 2

    try:
        configure_logging(args.log_level)
        logger.debug(f"normctl {args.command} (threads={settings.threads})")
        return dispatch(parser, args)
    except Exception as e:
        return handle_exception(e)


def main() -> None:
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        sys.exit(130)


if __name__ == "__main__":
    main()
