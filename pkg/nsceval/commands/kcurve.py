"""
nsceval CLI command: kcurve

```
usage: nsceval kcurve [-h] [--config CONFIG] [--print-config] --in INPUT_FILE
                      --y Y --x X --out OUT [--style {normal,overlap}]
                      [--variant {nsc,nscd}] [--noise {auto,wfn,ffn,rwn}]
                      [--tau0 TAU0] [--max-factor MAX_FACTOR]

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
  --out OUT             Output CSV file for the curve (default: None)

Run parameters:
  --style {normal,overlap}
                        Estimator style (default: overlap)
  --variant {nsc,nscd}  Difference both series first with 'nscd' (default: nsc)
  --noise {auto,wfn,ffn,rwn}
                        Noise kind of x for the error bars (default: auto)
  --max-factor MAX_FACTOR
                        Largest averaging factor (default: None)
```
"""

import argparse
from pathlib import Path

from nsceval.allan import STYLES, TauGrid
from nsceval.commands import add_config_argument, config_values, provenance, read_input
from nsceval.io import series, write_curve
from nsceval.sensitivity import VARIANTS, CurveConfig, k_curve

NOISE_CHOICES = ["auto", "wfn", "ffn", "rwn"]


def run(args):
    """
    Run kcurve command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    config = CurveConfig(**config_values(args, CurveConfig))

    if args.print_config:
        print(config.to_toml())
        return

    dataset = read_input(config.input_file, config.tau0)
    y = series(dataset, config.y)
    x = series(dataset, config.x)
    grid = None
    if config.max_factor is not None:
        m0 = y.m0 - (config.variant == "nscd")
        grid = TauGrid.default(m0, config.max_factor)
    curve = k_curve(
        y,
        x,
        grid,
        style=config.style,
        variant=config.variant,
        noise_kind=config.noise,
        provenance={"y": config.y, "x": config.x, "input": str(config.input_file)},
    )
    write_curve(curve, config.out, provenance(args))
    print(f"points = {len(curve)}")
    print(f"curve = {config.out}")


def add_parser(subparsers):
    """
    Add an argparse parser for the 'kcurve' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "kcurve",
        help="Compute the sensitivity curve K(tau)",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    add_config_argument(parser)

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
        "--out", type=Path, required=True, help="Output CSV file for the curve"
    )

    # run parameters
    group = parser.add_argument_group(title="Run parameters")
    group.add_argument(
        "--style",
        choices=STYLES,
        default=CurveConfig.__dataclass_fields__["style"].default,
        help="Estimator style",
    )
    group.add_argument(
        "--variant",
        choices=VARIANTS,
        default=CurveConfig.__dataclass_fields__["variant"].default,
        help="Difference both series first with 'nscd'",
    )
    group.add_argument(
        "--noise",
        choices=NOISE_CHOICES,
        default=CurveConfig.__dataclass_fields__["noise"].default,
        help="Noise kind of x for the error bars",
    )
    group.add_argument("--max-factor", type=int, help="Largest averaging factor")

    parser.set_defaults(func=run)
