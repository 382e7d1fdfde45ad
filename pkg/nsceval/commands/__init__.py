"""
nsceval Command Line Interface (CLI) sub-commands.

See also `nsceval.cli`.
"""

import argparse
import tomllib
from pathlib import Path

from nsceval.errors import ParseError
from nsceval.io import read_csv
from nsceval.util import get_data_provenance_metadata


class _LoadConfiguration(argparse.Action):
    """
    Custom argparse action to load configuration from a TOML file.

    The TOML configuration is loaded and the argparse namespace is updated with
    the values from the file. Keys are argument destinations such as `input_file`.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        """
        Load configuration from a TOML file and update the argparse namespace.

        Parameters
        ----------
        parser : argparse.ArgumentParser
            The argument parser instance.
        namespace : argparse.Namespace
            The namespace object that will be updated with the configuration values.
        values : str or pathlib.Path
            The path to the TOML configuration file.
        option_string : str, optional
            The option string that was used to invoke this action, by default None
        """
        try:
            with open(values, "rb") as f:
                config = tomllib.load(f)
        except (OSError, tomllib.TOMLDecodeError) as e:
            parser.error(f"cannot load configuration {values}: {e}")

        destinations = {action.dest: action for action in parser._actions}
        unknown = set(config) - set(destinations)
        if unknown:
            parser.error(f"unknown configuration keys: {', '.join(sorted(unknown))}")

        # set required to False for all arguments that are in the configuration,
        # otherwise argparse would raise an error if the argument is not provided
        for key in config:
            destinations[key].required = False

        # set values from configuration if not already provided on the command line
        for key, value in config.items():
            if getattr(namespace, key, None) in (None, parser.get_default(key)):
                action = destinations[key]
                if action.type is not None and not isinstance(value, list):
                    value = action.type(value)
                setattr(namespace, key, value)


def add_config_argument(parser):
    """
    Adds '--config' and '--print-config' arguments to the argparse parser.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The parser to which the arguments will be added.
    """
    parser.add_argument(
        "--config", type=Path, action=_LoadConfiguration, help="Configuration file"
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="Print current config as TOML and exit",
    )


def config_values(args, config_class):
    """
    Return the entries of `args` that are fields of `config_class`.

    Parameters
    ----------
    args : argparse.Namespace
        Parsed command-line arguments
    config_class : type
        Dataclass holding the configuration

    Returns
    -------
    dict
    """
    return {
        key: value
        for key, value in vars(args).items()
        if key in config_class.__dataclass_fields__
    }


def provenance(args, **other):
    """Provenance metadata of an output written by a sub-command."""
    return get_data_provenance_metadata(
        command=getattr(args, "command_line", None), **other
    )


def read_input(path, tau0=None):
    """Read a record file, reporting missing files as `ParseError`."""
    if not Path(path).is_file():
        raise ParseError(f"input file {path} does not exist")
    return read_csv(path, tau0)
