"""
Two-sample statistics of uniformly sampled series.

The module provides block averaging, the Allan variance and the Allan covariance in
their normal (non-overlapping) and overlapping forms, together with the effective
degrees of freedom used to attach confidence to overlapping estimates.

Example:
```python
import numpy as np
from nsceval.allan import TimeSeries, block_average, adev2, overlap_acov

y = TimeSeries(np.random.default_rng(0).normal(size=1000), tau0=1.0)
adev2(block_average(y, 10))
overlap_acov(y, y, 10)
```

All functions accept a `TimeSeries`, an `AveragedSeries` where documented, or any
one-dimensional array-like (taken to be sampled at `tau0 = 1`).
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from nsceval.errors import InsufficientDataError, RangeError, ShapeError

STYLES = ("normal", "overlap")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled record at base period `tau0`."""

    values: np.ndarray
    """Samples, fractional frequency or NIV units"""
    tau0: float = 1.0
    """Base sampling period in seconds"""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ShapeError(
                f"Series must be one-dimensional, got shape {values.shape}"
            )
        if len(values) < 2:
            raise InsufficientDataError(
                f"Series needs at least 2 samples, got {len(values)}"
            )
        if not self.tau0 > 0:
            raise RangeError(f"tau0 must be positive, got {self.tau0}")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    @property
    def m0(self):
        """Raw sample count M0"""
        return len(self.values)


@dataclass(frozen=True, eq=False)
class AveragedSeries:
    """Block averages of a `TimeSeries` at averaging factor `m`."""

    values: np.ndarray
    m: int = 1
    tau0: float = 1.0

    def __len__(self):
        return len(self.values)

    @property
    def tau(self):
        """Averaging time m * tau0 in seconds"""
        return self.m * self.tau0

    @property
    def count(self):
        """Averaged sample count M"""
        return len(self.values)


@dataclass(frozen=True)
class TauGrid:
    """Strictly increasing averaging factors of a K or ADEV curve."""

    factors: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        factors = tuple(int(m) for m in self.factors)
        if not factors:
            raise InsufficientDataError("Averaging grid is empty")
        if any(b <= a for a, b in zip(factors, factors[1:])):
            raise RangeError("Averaging factors must be strictly increasing")
        if factors[0] < 1:
            raise RangeError(f"Averaging factors must be >= 1, got {factors[0]}")
        object.__setattr__(self, "factors", factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    @classmethod
    def default(cls, m0, max_factor=None):
        """
        1-2-5 progression per decade up to `floor(m0 / 4)`.

        Parameters
        ----------
        m0 : int
            Raw sample count
        max_factor : int, optional
            Lower upper bound for the factors

        Returns
        -------
        TauGrid
        """
        upper = m0 // 4
        if max_factor is not None:
            upper = min(upper, int(max_factor))
        factors = []
        decade = 1
        while decade <= upper:
            factors.extend(f * decade for f in (1, 2, 5) if f * decade <= upper)
            decade *= 10
        return cls(tuple(factors))

    def check(self, m0):
        """Raise `RangeError` unless every factor is admissible for `m0` samples."""
        if self.factors[-1] > m0 // 2:
            raise RangeError(
                f"Averaging factor {self.factors[-1]} outside [1, {m0 // 2}]"
            )
        return self

    def restrict(self, lo, hi):
        """Return the factors within `[lo, hi]` as a new grid."""
        return TauGrid(tuple(m for m in self.factors if lo <= m <= hi))


def as_series(series, tau0=1.0):
    """Return `series` as a `TimeSeries`, wrapping plain arrays."""
    if isinstance(series, TimeSeries):
        return series
    if isinstance(series, AveragedSeries):
        return TimeSeries(series.values, series.tau)
    return TimeSeries(series, tau0)


def _as_averaged(series):
    if isinstance(series, AveragedSeries):
        return series
    series = as_series(series)
    return AveragedSeries(series.values, 1, series.tau0)


def block_average(series, m):
    """
    Average a series over adjacent non-overlapping blocks of `m` samples.

    Trailing samples that do not fill a block are discarded.

    Parameters
    ----------
    series : TimeSeries or array_like
        Raw record
    m : int
        Averaging factor, `1 <= m <= floor(M0 / 2)`

    Returns
    -------
    AveragedSeries
        `floor(M0 / m)` block means at `tau = m * tau0`
    """
    series = as_series(series)
    m0 = series.m0
    if not 1 <= m <= m0 // 2:
        raise RangeError(f"Averaging factor {m} outside [1, {m0 // 2}]")
    if m == 1:
        return AveragedSeries(series.values.copy(), 1, series.tau0)
    count = m0 // m
    values = series.values[: count * m].reshape(count, m).mean(axis=1)
    return AveragedSeries(values, int(m), series.tau0)


def _two_sample(da, db):
    # pairwise summation in np.sum keeps the error at O(log n) ulps
    return np.sum(da * db) / (2 * len(da))


def adev2(series):
    """
    Allan variance of adjacent averages.

    Parameters
    ----------
    series : AveragedSeries or TimeSeries or array_like
        Averaged values; raw series are taken at `m = 1`

    Returns
    -------
    float
        `sum((y[j+1] - y[j])**2) / (2 * (M - 1))`
    """
    series = _as_averaged(series)
    if series.count < 2:
        raise InsufficientDataError(
            f"Allan variance needs M >= 2 averages, got {series.count}"
        )
    d = np.diff(series.values)
    return float(_two_sample(d, d))


def acov(a, b):
    """
    Allan covariance of two averaged series with equal length and factor.

    `acov(a, a)` is identical to `adev2(a)`.
    """
    a = _as_averaged(a)
    b = _as_averaged(b)
    if a.count != b.count or a.m != b.m:
        raise ShapeError(
            f"Allan covariance needs equal shapes, got M={a.count}, m={a.m}"
            f" and M={b.count}, m={b.m}"
        )
    if a.count < 2:
        raise InsufficientDataError(
            f"Allan covariance needs M >= 2 averages, got {a.count}"
        )
    return float(_two_sample(np.diff(a.values), np.diff(b.values)))


def _window_differences(values, m):
    """Differences of adjacent m-sample window means at every offset."""
    if m == 1:
        means = values
    else:
        # pandas applies compensated summation in rolling means
        means = pd.Series(values).rolling(m).mean().to_numpy()[m - 1 :]
    return means[m:] - means[:-m]


def _check_overlap(m0, m):
    if m < 1:
        raise RangeError(f"Averaging factor must be >= 1, got {m}")
    if m0 < 2 * m + 1:
        raise InsufficientDataError(
            f"Overlapping estimate at m={m} needs M0 >= {2 * m + 1}, got {m0}"
        )


def overlap_adev2(series, m):
    """
    Overlapping Allan variance at averaging factor `m`.

    Parameters
    ----------
    series : TimeSeries or array_like
        Raw record with `M0 >= 2m + 1`
    m : int
        Averaging factor

    Returns
    -------
    float
        Mean over all `M0 - 2m + 1` offsets of half the squared difference of
        adjacent m-sample means
    """
    series = as_series(series)
    _check_overlap(series.m0, m)
    d = _window_differences(series.values, m)
    return float(_two_sample(d, d))


def overlap_acov(a, b, m):
    """Overlapping Allan covariance, the product form of `overlap_adev2`."""
    a = as_series(a)
    b = as_series(b)
    if a.m0 != b.m0:
        raise ShapeError(
            f"Allan covariance needs equal lengths, got {a.m0} and {b.m0}"
        )
    _check_overlap(a.m0, m)
    return float(
        _two_sample(_window_differences(a.values, m), _window_differences(b.values, m))
    )


def allan_variance(series, m, style="overlap"):
    """Allan variance at factor `m` in `normal` or `overlap` style."""
    if style == "normal":
        return adev2(block_average(series, m))
    if style == "overlap":
        return overlap_adev2(series, m)
    raise RangeError(f"Unknown style '{style}', expected one of {STYLES}")


def allan_covariance(a, b, m, style="overlap"):
    """Allan covariance at factor `m` in `normal` or `overlap` style."""
    if style == "normal":
        a = as_series(a)
        b = as_series(b)
        if a.m0 != b.m0:
            raise ShapeError(
                f"Allan covariance needs equal lengths, got {a.m0} and {b.m0}"
            )
        return acov(block_average(a, m), block_average(b, m))
    if style == "overlap":
        return overlap_acov(a, b, m)
    raise RangeError(f"Unknown style '{style}', expected one of {STYLES}")


def _chi2_dof(kind, m, n):
    """Handbook chi-square degrees of freedom of the overlapping Allan variance.

    `n` counts phase points, i.e. one more than the frequency samples.
    """
    if kind == "wfn":
        return ((3 * (n - 1) / (2 * m)) - (2 * (n - 2) / n)) * (
            4 * m**2 / (4 * m**2 + 5)
        )
    if kind == "ffn":
        if m == 1:
            return 2 * (n - 2) ** 2 / (2.3 * n - 4.9)
        return 5 * n**2 / (4 * m * (n + 3 * m))
    if kind == "rwn":
        if n <= 3:
            return 1.0
        return (n - 2) / m * ((n - 1) ** 2 - 3 * m * (n - 1) + 4 * m**2) / (n - 3) ** 2
    raise RangeError(f"Unknown noise kind '{kind}'")


def edf(noise, m, m0):
    """
    Effective degrees of freedom of an overlapping estimate, in sample units.

    The value replaces the averaged sample count `M` in confidence formulas. It is
    the chi-square degrees of freedom of the overlapping estimate divided by that of
    a normal estimate with the same `M = floor(M0 / m)`, times `M`. At `m = 1` it
    therefore equals `M0` for every noise kind.

    Parameters
    ----------
    noise : NoiseKind or str or None
        Dominant noise kind of the series (`wfn`, `ffn` or `rwn`); `None` falls back
        to `M`
    m : int
        Averaging factor, `M0 >= 2m + 1`
    m0 : int
        Raw sample count

    Returns
    -------
    float
        Effective degrees of freedom within `[1, M0]`
    """
    _check_overlap(m0, m)
    count = m0 // m
    if noise is None:
        return float(count)
    kind = str(noise).lower()
    ratio = _chi2_dof(kind, m, m0 + 1) / _chi2_dof(kind, 1, count + 1)
    return float(np.clip(count * ratio, 1.0, m0))


def deviation_table(series, grid=None, styles=STYLES):
    """
    Allan deviation over an averaging grid.

    Parameters
    ----------
    series : TimeSeries or array_like
        Raw record
    grid : TauGrid, optional
        Averaging factors, by default `TauGrid.default(M0)`
    styles : sequence of str
        Estimator styles to tabulate

    Returns
    -------
    pandas.DataFrame
        Columns `m`, `tau` and `adev_<style>` for each style
    """
    series = as_series(series)
    grid = (grid or TauGrid.default(series.m0)).check(series.m0)
    table = pd.DataFrame({"m": list(grid)})
    table["tau"] = table["m"] * series.tau0
    for style in styles:
        table[f"adev_{style}"] = [
            np.sqrt(allan_variance(series, m, style)) for m in grid
        ]
    return table
