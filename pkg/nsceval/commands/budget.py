"""
nsceval CLI command: budget

```
usage: nsceval budget [-h] --spec SPEC

options:
  -h, --help   show this help message and exit
  --spec SPEC  Budget TOML file with one table per effect (default: None)
```

Prints one CSV row per effect (`name,k,sigma_x,contribution`) followed by `u_B`.
"""

import argparse
from pathlib import Path

import pandas as pd

from nsceval.budget import budget
from nsceval.errors import ParseError
from nsceval.io import read_budget


def run(args):
    """
    Run budget command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    if not args.spec.is_file():
        raise ParseError(f"budget file {args.spec} does not exist")
    result = budget(read_budget(args.spec))
    print(pd.DataFrame(result.as_rows()).to_csv(index=False), end="")
    print(f"u_B = {result.u_b!r}")


def add_parser(subparsers):
    """
    Add an argparse parser for the 'budget' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "budget",
        help="Combine sensitivity coefficients into a type-B budget",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    parser.add_argument(
        "--spec",
        type=Path,
        required=True,
        help="Budget TOML file with one table per effect",
    )

    parser.set_defaults(func=run)
