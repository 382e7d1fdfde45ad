"""
Utility functions for timing, data provenance and seed derivation.
"""

import functools
import platform
import shlex
import time
from datetime import datetime

import numpy as np
from loguru import logger

import nsceval


def get_data_provenance_metadata(**other_metadata):
    """
    Assemble metadata for data provenance

    Parameters
    ----------
    **other_metadata
        Further entries such as the command line or seeds

    Returns
    -------
    dictionary
        Dictionary with provenance information
    """
    res = {
        "nsceval_version": nsceval.__version__,
        "python_version": platform.python_version(),
        "created_at": datetime.now().isoformat(),
    }
    res.update({k: v for k, v in other_metadata.items() if v is not None})
    return res


def command_line(argv):
    """Return the command line `nsceval <argv>` as a single shell-quoted string."""
    return shlex.join(["nsceval", *[str(a) for a in argv]])


def channel_seeds(master_seed, count):
    """
    Derive `count` distinct 64-bit seeds from a master seed.

    Parameters
    ----------
    master_seed : int
        Seed of the whole scenario
    count : int
        Number of channels

    Returns
    -------
    list of int
        Seeds below 2**63, so they fit a signed TOML integer
    """
    state = np.random.SeedSequence(master_seed).generate_state(count, dtype=np.uint64)
    seeds = [int(s) >> 1 for s in state]
    if len(set(seeds)) != len(seeds):  # pragma: no cover
        raise RuntimeError("Seed derivation produced duplicates")
    return seeds


def timeit(func):
    """
    Decorator to time a function during logging.

    Parameters
    ----------
    func : callable
        The function to be wrapped and timed.

    Returns
    -------
    callable
        The wrapped function that logs its execution time.

    See Also
    --------
    `loguru documentation <https://loguru.readthedocs.io/en/stable/resources/recipes.html#logging-entry-and-exit-of-functions-with-a-decorator>`__
    """

    @functools.wraps(func)
    def _wrapped(*args, **kwargs):
        start = time.time()
        result = func(*args, **kwargs)
        logger.info(
            "Function '{}' executed in {:.1f} s", func.__name__, time.time() - start
        )
        return result

    return _wrapped
