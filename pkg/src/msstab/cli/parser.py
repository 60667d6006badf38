"""Argument parser for the msstab command line"""

import argparse
from pathlib import Path

from ..core.simulate import ONE_STEP_METHODS, SCHEME_TOKENS

EPILOG = """
Examples:
  %(prog)s classify --scheme bdf2 --lambda -5 --mu 2 --h 1
  %(prog)s classify --scheme ab2 --lambda=-5,1 --mu 2 --h 0.1 --json
  %(prog)s region --scheme ab2 --scheme am2 --grid 400 --out region.csv
  %(prog)s region --domain --y-value 1 --grid 200
  %(prog)s h0 --lambda -5 --mu 2
  %(prog)s spectral --example two --lambda -1.6 --sigma 1 --eps 1.18 --h 0.5
  %(prog)s simulate --lambda -5 --mu 2 --h 0.125 --t-end 1 --out traces.csv
  %(prog)s check --lambda -5 --mu 2 --h 1
"""


def parse_number(text: str) -> complex:
    """'re' or 're,im'"""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a number or 're,im', got {text!r}")


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _scheme_option(parser: argparse.ArgumentParser, choices=SCHEME_TOKENS) -> None:
    parser.add_argument(
        "--scheme",
        action="append",
        choices=choices,
        type=str.lower,
        help="Scheme to evaluate (repeatable; default: all)",
    )


def _scalar_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--lambda", dest="lam", type=parse_number, required=True,
        help="Drift coefficient, real or 're,im'",
    )
    parser.add_argument(
        "--mu", type=parse_number, required=True,
        help="Diffusion coefficient, real or 're,im'",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msstab",
        description="Mean-square stability of stochastic two-step Maruyama methods",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument(
        "--log-level",
        default=None,
        help="Logging level on stderr (default: settings, WARNING)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    classify = commands.add_parser("classify", help="Verdict per scheme")
    _scheme_option(classify)
    _scalar_options(classify)
    classify.add_argument("--h", type=positive_float, required=True, help="Step size")
    classify.add_argument("--json", action="store_true", help="Emit JSON")
    classify.add_argument(
        "--check",
        action="store_true",
        help="Cross-validate against the Schur-Cohn and root criteria",
    )

    region = commands.add_parser("region", help="Stability raster as CSV")
    _scheme_option(region)
    region.add_argument("--grid", type=positive_int, default=400, help="Cells per axis")
    region.add_argument(
        "--x-range", nargs=2, type=float, default=(-8.0, 0.0), metavar=("LO", "HI"),
        help="Range of x = lam h (or Re x with --domain)",
    )
    region.add_argument(
        "--y-range", nargs=2, type=float, default=(0.0, 16.0), metavar=("LO", "HI"),
        help="Range of Y = mu^2 h",
    )
    region.add_argument(
        "--domain", action="store_true",
        help="Scan complex x at fixed Y instead of the real (x, Y) plane",
    )
    region.add_argument("--y-value", type=float, default=1.0, help="Y for --domain")
    region.add_argument(
        "--im-range", nargs=2, type=float, default=(-4.0, 4.0), metavar=("LO", "HI"),
        help="Range of Im x for --domain",
    )
    region.add_argument("--workers", type=positive_int, default=None)
    region.add_argument("--out", type=Path, default=None, help="CSV file")

    h0 = commands.add_parser("h0", help="Step-size bounds for AB2 and AM2")
    _scheme_option(h0, choices=("ab2", "am2"))
    _scalar_options(h0)
    h0.add_argument("--json", action="store_true", help="Emit JSON")

    spectral = commands.add_parser("spectral", help="Spectral radius on a test system")
    _scheme_option(spectral)
    spectral.add_argument("--h", type=positive_float, required=True, help="Step size")
    source = spectral.add_mutually_exclusive_group(required=True)
    source.add_argument("--system", type=Path, help='JSON file {"F": .., "G": ..}')
    source.add_argument("--example", choices=("single", "two"))
    spectral.add_argument("--lambda", dest="lam", type=float, default=None)
    spectral.add_argument("--sigma", type=float, default=None)
    spectral.add_argument("--eps", type=float, default=None)
    spectral.add_argument("--cross-check", action="store_true")
    spectral.add_argument("--json", action="store_true", help="Emit JSON")

    simulate = commands.add_parser("simulate", help="Monte Carlo mean-square traces")
    _scheme_option(simulate, choices=SCHEME_TOKENS + ONE_STEP_METHODS)
    simulate.add_argument("--config", type=Path, help="JSON run configuration")
    simulate.add_argument("--lambda", dest="lam", type=float, default=None)
    simulate.add_argument("--mu", type=float, default=None)
    simulate.add_argument("--system", type=Path, default=None)
    simulate.add_argument("--h", type=positive_float, default=None)
    simulate.add_argument("--t-end", type=positive_float, default=None)
    simulate.add_argument("--theta", type=float, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--batches", type=positive_int, default=None)
    simulate.add_argument("--paths", type=positive_int, default=None)
    simulate.add_argument("--workers", type=positive_int, default=None)
    simulate.add_argument("--out", type=Path, default=None, help="CSV file")
    simulate.add_argument(
        "--dump-config", type=Path, default=None,
        help="Also write the resolved configuration as JSON",
    )

    check = commands.add_parser("check", help="Cross-validate every criterion")
    _scheme_option(check)
    _scalar_options(check)
    check.add_argument("--h", type=positive_float, required=True, help="Step size")
    check.add_argument("--json", action="store_true", help="Emit JSON")

    return parser
