"""
nsceval CLI command: stats

```
usage: nsceval stats [-h] --in INPUT_FILE --col COL
                     [--style {normal,overlap,both}] [--tau0 TAU0]

options:
  -h, --help            show this help message and exit
  --in INPUT_FILE       Input CSV file (default: None)
  --col COL             Column to analyse (default: None)
  --style {normal,overlap,both}
                        Allan deviation estimator (default: overlap)
  --tau0 TAU0           Base period overriding the '# tau0' line (default: None)
```

Prints a CSV table `m,tau,adev_<style>` over the default averaging grid.
"""

import argparse
from pathlib import Path

from nsceval.allan import STYLES, deviation_table
from nsceval.commands import read_input
from nsceval.io import series


def run(args):
    """
    Run stats command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    record = series(read_input(args.input_file, args.tau0), args.col)
    styles = STYLES if args.style == "both" else (args.style,)
    print(deviation_table(record, styles=styles).to_csv(index=False), end="")


def add_parser(subparsers):
    """
    Add an argparse parser for the 'stats' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "stats",
        help="Tabulate the Allan deviation of a column",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    parser.add_argument(
        "--in", dest="input_file", type=Path, required=True, help="Input CSV file"
    )
    parser.add_argument("--col", required=True, help="Column to analyse")
    parser.add_argument(
        "--style",
        choices=[*STYLES, "both"],
        default="overlap",
        help="Allan deviation estimator",
    )
    parser.add_argument(
        "--tau0", type=float, help="Base period overriding the '# tau0' line"
    )

    parser.set_defaults(func=run)
