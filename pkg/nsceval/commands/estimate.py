"""
nsceval CLI command: estimate

```
usage: nsceval estimate [-h] --curve CURVE [--min-decades MIN_DECADES]
                        [--n-sigma N_SIGMA]

options:
  -h, --help            show this help message and exit
  --curve CURVE         Curve CSV file written by 'kcurve' (default: None)
  --min-decades MIN_DECADES
                        Minimal span of the window in decades (default: 1.0)
  --n-sigma N_SIGMA     Allowed deviation of a window point from the window mean
                        in error bars (default: 3.0)
```

Prints one row: K, its scatter, the largest error bar, the total
uncertainty and the selected window.
"""

import argparse
from pathlib import Path

from nsceval.errors import ParseError
from nsceval.io import read_curve
from nsceval.sensitivity import EXTRACT_N_SIGMA, extract_estimate

ROW_FORMAT = "{:>24} {:>24} {:>24} {:>24} {:>10} {:>10}"


def run(args):
    """
    Run estimate command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    if not args.curve.is_file():
        raise ParseError(f"curve file {args.curve} does not exist")
    estimate = extract_estimate(
        read_curve(args.curve), args.min_decades, args.n_sigma
    )
    print(
        ROW_FORMAT.format(
            "k_bar", "sigma_bar", "sigma_max", "sigma_total", "m_lo", "m_hi"
        )
    )
    print(
        ROW_FORMAT.format(
            repr(estimate.k_bar),
            repr(estimate.sigma_bar),
            repr(estimate.sigma_max),
            repr(estimate.sigma_total),
            *estimate.interval,
        )
    )


def add_parser(subparsers):
    """
    Add an argparse parser for the 'estimate' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "estimate",
        help="Extract a scalar sensitivity from a K curve",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    parser.add_argument(
        "--curve", type=Path, required=True, help="Curve CSV file written by 'kcurve'"
    )
    parser.add_argument(
        "--min-decades",
        type=float,
        default=1.0,
        help="Minimal span of the window in decades",
    )
    parser.add_argument(
        "--n-sigma",
        type=float,
        default=EXTRACT_N_SIGMA,
        help="Allowed deviation of a window point from the window mean in error bars",
    )

    parser.set_defaults(func=run)
