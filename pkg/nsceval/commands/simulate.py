"""
nsceval CLI command: simulate

```
usage: nsceval simulate [-h] (--preset NAME | --scenario SCENARIO) [--scale SCALE]
                        [--seed SEED] --out OUT

options:
  -h, --help           show this help message and exit
  --preset NAME        Preset scenario, one of fig3_affs, fig3_osc, fig4_ffn,
                       fig4_rwn, fig4_wfn, fig5_both, fig5_delay, fig5_integral,
                       table1, zeeman_demo (default: None)
  --scenario SCENARIO  Scenario TOML file (default: None)
  --scale SCALE        Share of the preset record length in (0, 1] (default: 1.0)
  --seed SEED          Master seed of a preset (default: 0)
  --out OUT            Output directory (default: None)
```

Writes `data.csv` with the clock record `y` and one column per measured NIV,
`truth.toml` with every injected parameter and `scenario.toml` with the full recipe.
"""

import argparse
from pathlib import Path

from nsceval.commands import provenance
from nsceval.io import read_scenario, write_dataset, write_toml
from nsceval.presets import PRESETS, preset
from nsceval.simulation import simulate


def run(args):
    """
    Run simulate command.

    Parameters
    ----------
    args : argparse.Namespace
        Command-line arguments
    """
    if args.scenario is not None:
        scenario = read_scenario(args.scenario)
    else:
        scenario = preset(args.preset, args.scale, args.seed)
    print(f"seed = {scenario.seed}")

    result = simulate(scenario)
    metadata = provenance(args, seed=scenario.seed, scenario=scenario.name)
    write_dataset(result.to_dataset(), args.out / "data.csv", metadata)
    write_toml(result.truth, args.out / "truth.toml", metadata)
    write_toml(scenario.as_dict(), args.out / "scenario.toml", metadata)
    print(f"data = {args.out / 'data.csv'}")
    print(f"truth = {args.out / 'truth.toml'}")


def add_parser(subparsers):
    """
    Add an argparse parser for the 'simulate' command.

    Parameters
    ----------
    subparsers : argparse._SubParsersAction
        The subparsers object to which the new parser will be added.
    """
    parser = subparsers.add_parser(
        "simulate",
        help="Simulate clock records from a preset or scenario file",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        allow_abbrev=False,
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--preset",
        metavar="NAME",
        choices=sorted(PRESETS),
        help=f"Preset scenario, one of {', '.join(sorted(PRESETS))}",
    )
    source.add_argument("--scenario", type=Path, help="Scenario TOML file")
    parser.add_argument(
        "--scale",
        type=float,
        default=1.0,
        help="Share of the preset record length in (0, 1]",
    )
    parser.add_argument("--seed", type=int, default=0, help="Master seed of a preset")
    parser.add_argument("--out", type=Path, required=True, help="Output directory")

    parser.set_defaults(func=run)
