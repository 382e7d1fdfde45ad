"""
nsceval Command Line Interface (CLI)

Output from `nsceval --help`:
```
usage: nsceval [-h] [--version] [--log-level LOG_LEVEL]
               {budget,compensate,estimate,kcurve,simulate,stats} ...

Estimates frequency sensitivity coefficients of noise independent variables from
synchronized clock records via Allan covariance.

positional arguments:
  {budget,compensate,estimate,kcurve,simulate,stats}
                        Action to perform
    budget              Combine sensitivity coefficients into a type-B budget
    compensate          Search delay and integral mean between y and x
    estimate            Extract a scalar sensitivity from a K curve
    kcurve              Compute the sensitivity curve K(tau)
    simulate            Simulate clock records from a preset or scenario file
    stats               Tabulate the Allan deviation of a column

options:
  -h, --help            show this help message and exit
  --version             show program's version number and exit
  --log-level LOG_LEVEL
                        Minimal level of log messages on stderr (default: INFO)
```

Exit status is 0 on success, 1 for computation errors, 2 for usage errors and 3 for
input/output errors. Errors are reported as a single line
`error: <category>: <message>` on stderr.

See `nsceval.commands` for sub-commands.
"""

import argparse
import sys

from loguru import logger

from nsceval import __version__
from nsceval.commands import budget, compensate, estimate, kcurve, simulate, stats
from nsceval.errors import NscError, OutputError, ParseError
from nsceval.util import command_line

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def build_parser():
    """Return the argument parser with all sub-commands."""
    parser = argparse.ArgumentParser(
        prog="nsceval",
        description="Estimates frequency sensitivity coefficients of noise independent"
        " variables from synchronized clock records via Allan covariance.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )

    # global arguments
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        type=str.upper,
        choices=["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"],
        help="Minimal level of log messages on stderr",
    )

    subparsers = parser.add_subparsers(help="Action to perform", required=True)

    # commands
    budget.add_parser(subparsers)
    compensate.add_parser(subparsers)
    estimate.add_parser(subparsers)
    kcurve.add_parser(subparsers)
    simulate.add_parser(subparsers)
    stats.add_parser(subparsers)
    return parser


def _fail(error, status):
    category = getattr(error, "category", "io")
    message = str(error).splitlines()[0] if str(error) else type(error).__name__
    print(f"error: {category}: {message}", file=sys.stderr)
    return status


def main(argv=None):
    """
    Main entry point for the nsceval command-line tool.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name, by default `sys.argv[1:]`

    Returns
    -------
    int
        Exit status
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()

    if not argv:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logger.remove()
    logger.add(sys.stderr, level=args.log_level)
    args.command_line = command_line(argv)

    try:
        args.func(args)
    except (ParseError, OutputError) as e:
        return _fail(e, EXIT_IO)
    except NscError as e:
        return _fail(e, EXIT_COMPUTATION)
    except OSError as e:
        return _fail(OutputError(f"{e.strerror or e}: {e.filename or ''}"), EXIT_IO)
    return EXIT_OK
