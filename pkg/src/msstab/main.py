"""
msstab - command line entry point

Subcommands:
- classify: mean-square stability verdict per scheme on the scalar test equation
- region: stability rasters in the (x, Y) plane or over complex x
- h0: step-size bounds for AB2 and AM2
- spectral: spectral radius of the stability matrix on a test system
- simulate: Monte Carlo mean-square traces
- check: cross-validation of every stability criterion

Data goes to stdout (or --out); diagnostics go to stderr.
"""

import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from .cli import build_parser, dispatch
from .config import get_settings
from .core.errors import MsStabError, NumericalFailure

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def configure_logging(level: str) -> None:
    """Configure root logging on stderr"""
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level.upper())


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Returns:
        0 on success, 2 on usage or validation errors, 3 on numerical failure
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    configure_logging(args.log_level or settings.log_level)

    try:
        return dispatch(args, sys.stdout)
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE
    except NumericalFailure as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except (MsStabError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
