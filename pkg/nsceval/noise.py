"""
Seeded power-law frequency noise.

White (WFN), flicker (FFN) and random walk (RWN) frequency noise are generated from a
counter-based Philox stream, so a `NoiseSpec` always yields the same samples on every
machine. Levels are given as the Allan deviation at the base period `tau0`.

Flicker noise is produced by fractional (half) integration of white noise, i.e. by
convolution with the impulse response of `(1 - z**-1)**-0.5`, truncated to
`min(n, 2**16)` taps.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import signal, stats

from nsceval.allan import TauGrid, as_series, overlap_adev2
from nsceval.errors import DomainError, InsufficientDataError, RangeError

FLICKER_TAPS = 2**16

SLOPE_WHITE = -0.25
"""ADEV slopes below this are classified as white frequency noise"""
SLOPE_RANDOM_WALK = 0.25
"""ADEV slopes above this are classified as random walk frequency noise"""


class NoiseKind(StrEnum):
    """Power-law frequency noise kinds."""

    WFN = "wfn"
    FFN = "ffn"
    RWN = "rwn"


K_M = {NoiseKind.WFN: 0.87, NoiseKind.FFN: 0.77, NoiseKind.RWN: 0.75}
"""Noise dependent constant of the K confidence model"""

K_M_MIN = 0.75
"""Conservative constant used when the noise kind is unknown"""


def k_m_for(kind):
    """Return the confidence constant for `kind`, or the minimum for `None`."""
    if kind is None:
        return K_M_MIN
    return K_M[NoiseKind(kind)]


@dataclass(frozen=True)
class NoiseSpec:
    """Recipe for one noise sequence."""

    kind: NoiseKind
    """Noise kind"""
    level: float
    """Allan deviation at tau0"""
    seed: int = 0
    """64-bit seed of the Philox stream"""
    k_m: float | None = None
    """Confidence constant, defaults by kind"""

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.level > 0:
            raise DomainError(f"Noise level must be positive, got {self.level}")
        if not 0 <= int(self.seed) < 2**64:
            raise RangeError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.k_m is None:
            object.__setattr__(self, "k_m", K_M[self.kind])
        elif not 0 < self.k_m <= 1:
            raise DomainError(f"K_M must be in (0, 1], got {self.k_m}")

    def as_dict(self):
        """Return the recipe as a plain dictionary"""
        return {
            "kind": str(self.kind),
            "level": self.level,
            "seed": self.seed,
            "k_m": self.k_m,
        }


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def flicker_filter(taps):
    """
    Impulse response of the half-integration filter.

    Parameters
    ----------
    taps : int
        Filter length

    Returns
    -------
    numpy.ndarray
        `h[0] = 1`, `h[k] = h[k-1] * (k - 0.5) / k`
    """
    k = np.arange(1, taps)
    return np.concatenate(([1.0], np.cumprod((k - 0.5) / k)))


def generate(spec, n):
    """
    Generate `n` samples of the noise described by `spec`.

    Parameters
    ----------
    spec : NoiseSpec
        Kind, level and seed
    n : int
        Number of samples, at least 2

    Returns
    -------
    numpy.ndarray
        Samples with Allan deviation `spec.level` at tau0 in expectation
    """
    if n < 2:
        raise RangeError(f"Noise needs at least 2 samples, got {n}")
    rng = _rng(spec.seed)
    if spec.kind == NoiseKind.WFN:
        return spec.level * rng.standard_normal(n)
    if spec.kind == NoiseKind.RWN:
        # first differences are white with variance 2 * level**2
        return np.cumsum(spec.level * np.sqrt(2) * rng.standard_normal(n))

    h = flicker_filter(min(n, FLICKER_TAPS))
    white = rng.standard_normal(n + len(h) - 1)
    # Allan variance at tau0 of unit innovations filtered by h
    unit_avar = 0.5 * np.sum(np.diff(h, prepend=0.0, append=0.0) ** 2)
    return spec.level / np.sqrt(unit_avar) * signal.fftconvolve(white, h, mode="valid")


def generate_mixture(specs, n):
    """Sum of independent noise sequences, one per spec."""
    specs = list(specs)
    if not specs:
        raise InsufficientDataError("Noise mixture needs at least one component")
    total = generate(specs[0], n)
    for spec in specs[1:]:
        total = total + generate(spec, n)
    return total


def verify_slope(series, tau_lo=1, tau_hi=100):
    """
    Log-log slope of the overlapping Allan deviation.

    Parameters
    ----------
    series : TimeSeries or array_like
        Raw record
    tau_lo, tau_hi : int
        Averaging factor range, `tau_hi <= floor(M0 / 4)`

    Returns
    -------
    float
        Least-squares slope of `log(adev)` against `log(tau)` on the default grid
        restricted to `[tau_lo, tau_hi]`
    """
    series = as_series(series)
    if tau_hi > series.m0 // 4:
        raise RangeError(
            f"Upper averaging factor {tau_hi} exceeds floor(M0/4) = {series.m0 // 4}"
        )
    grid = [m for m in TauGrid.default(series.m0) if tau_lo <= m <= tau_hi]
    adev = np.sqrt([overlap_adev2(series, m) for m in grid])
    usable = adev > 0
    if usable.sum() < 3:
        raise InsufficientDataError(
            f"Slope needs at least 3 grid points with nonzero deviation,"
            f" got {usable.sum()}"
        )
    fit = stats.linregress(
        np.log(np.asarray(grid, dtype=float)[usable]), np.log(adev[usable])
    )
    return float(fit.slope)


def classify(series, tau_hi=100):
    """
    Classify the dominant noise kind of a series by its ADEV slope.

    Returns
    -------
    NoiseKind or None
        `None` if the slope cannot be determined
    """
    series = as_series(series)
    try:
        slope = verify_slope(series, 1, min(tau_hi, series.m0 // 4))
    except (InsufficientDataError, RangeError):
        return None
    if slope < SLOPE_WHITE:
        return NoiseKind.WFN
    if slope > SLOPE_RANDOM_WALK:
        return NoiseKind.RWN
    return NoiseKind.FFN
