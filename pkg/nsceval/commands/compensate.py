"""
nsceval CLI command: compensate

```
usage: nsceval compensate [-h] [--config CONFIG] [--print-config] --in INPUT_FILE
                          --y Y --x X [--tau0 TAU0] [--out OUT] [--dmin DMIN]
                          [--dmax DMAX] [--imax IMAX] [--probes PROBES [PROBES ...]]
                          [--style {normal,overlap}] [--noise {auto,wfn,ffn,rwn}]
                          [--n-jobs N_JOBS] [--progressbar]

options:
  -h, --help            show this help message and exit
  --config CONFIG       Configuration file (default: None)
  --print-config        Print current config as TOML and exit (default: False)

Input:
  --in INPUT_FILE       Input CSV file (default: None)
  --y Y                 Column of the frequency record (default: None)
  --x X                 Column of the noise independent variable (default: None)
  --tau0 TAU0           Base period overriding the '# tau0' line (default: None)

Output:
  --out OUT             Output CSV file for the compensated curve (default: None)

Run parameters:
  --dmin DMIN           Smallest delay candidate, defaults to -dmax (default: None)
  --dmax DMAX           Largest delay candidate (default: 32)
  --imax IMAX           Largest integral window candidate (default: 32)
  --probes PROBES [PROBES ...]
                        Averaging factors of the score (default: (1, 2, 4, 8))
  --style {normal,overlap}
                        Estimator style (default: overlap)
  --noise {auto,wfn,ffn,rwn}
                        Noise kind of x for the error bars (default: auto)
  --n-jobs N_JOBS       Number of parallel workers (default: 1)
  --progressbar         Show progress bar (default: False)
```

Prints the best delay `D` and integral window `I` in base periods.
"""

import argparse
from pathlib import Path

from nsceval.allan import STYLES
from nsceval.asynchrony import CompensationConfig, compensate
from nsceval.commands import add_config_argument, config_values, provenance, read_input
from nsceval.commands.kcurve import NOISE_CHOICES
from nsceval.io import series, write_curve


def run(args):
    """
    Run compensate command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    config = CompensationConfig(**config_values(args, CompensationConfig))
    config.probes = tuple(config.probes)

    if args.print_config:
        print(config.to_toml())
        return

    dataset = read_input(config.input_file, config.tau0)
    dmin = -config.dmax if config.dmin is None else config.dmin
    result = compensate(
        series(dataset, config.y),
        series(dataset, config.x),
        range(dmin, config.dmax + 1),
        range(1, config.imax + 1),
        probes=config.probes,
        style=config.style,
        noise_kind=config.noise,
        n_jobs=config.n_jobs,
        progressbar=config.progressbar,
    )
    print(f"delay = {result.delay}")
    print(f"integral = {result.integral}")
    print(f"score = {result.score!r}")
    if config.out is not None:
        write_curve(
            result.curve,
            config.out,
            provenance(args, delay=result.delay, integral=result.integral),
        )
        print(f"curve = {config.out}")


def add_parser(subparsers):
    """
    Add an argparse parser for the 'compensate' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "compensate",
        help="Search delay and integral mean between y and x",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    add_config_argument(parser)
    fields = CompensationConfig.__dataclass_fields__

    # input
    group = parser.add_argument_group(title="Input")
    group.add_argument(
        "--in", dest="input_file", type=Path, required=True, help="Input CSV file"
    )
    group.add_argument("--y", required=True, help="Column of the frequency record")
    group.add_argument(
        "--x", required=True, help="Column of the noise independent variable"
    )
    group.add_argument(
        "--tau0", type=float, help="Base period overriding the '# tau0' line"
    )

    # output
    group = parser.add_argument_group(title="Output")
    group.add_argument(
        "--out", type=Path, help="Output CSV file for the compensated curve"
    )

    # run parameters
    group = parser.add_argument_group(title="Run parameters")
    group.add_argument(
        "--dmin", type=int, help="Smallest delay candidate, defaults to -dmax"
    )
    group.add_argument(
        "--dmax",
        type=int,
        default=fields["dmax"].default,
        help="Largest delay candidate",
    )
    group.add_argument(
        "--imax",
        type=int,
        default=fields["imax"].default,
        help="Largest integral window candidate",
    )
    group.add_argument(
        "--probes",
        type=int,
        nargs="+",
        default=fields["probes"].default,
        help="Averaging factors of the score",
    )
    group.add_argument(
        "--style",
        choices=STYLES,
        default=fields["style"].default,
        help="Estimator style",
    )
    group.add_argument(
        "--noise",
        choices=NOISE_CHOICES,
        default=fields["noise"].default,
        help="Noise kind of x for the error bars",
    )
    group.add_argument(
        "--n-jobs",
        type=int,
        default=fields["n_jobs"].default,
        help="Number of parallel workers",
    )
    group.add_argument("--progressbar", action="store_true", help="Show progress bar")

    parser.set_defaults(func=run)
