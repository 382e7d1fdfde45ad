"""
Frequency sensitivity coefficients from Allan covariance.

For a frequency record `y` and a noise independent variable (NIV) `x` the sensitivity
at averaging time `tau` is the slope minimizing the Allan variance of `y - K x`:

    K(tau) = ACOV(y, x; tau) / AVAR(x; tau)

Computed over a grid of averaging factors this yields a `KCurve`, each point carrying
a confidence bar from

    sigma_K**2 / K**2 = (1 / M) * (0.47 * AVAR(y) / AVAR(y_I) + 1 / K_M)

with `AVAR(y_I) = K**2 AVAR(x)` and `M` replaced by the effective degrees of freedom
for overlapping estimates. `extract_estimate` condenses a curve into a scalar with
decomposed uncertainty.

Example:
```python
from nsceval.sensitivity import CurveConfig, k_curve, extract_estimate

curve = k_curve(y, x, style="overlap", variant="nsc", noise_kind="wfn")
estimate = extract_estimate(curve)
print(estimate.k_bar, estimate.sigma_total)
```

For command line usage, see `nsceval.commands.kcurve` and `nsceval.commands.estimate`.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import tomlkit
from joblib import Parallel, delayed
from loguru import logger

from nsceval.allan import (
    STYLES,
    TauGrid,
    allan_covariance,
    allan_variance,
    as_series,
    edf,
)
from nsceval.errors import (
    ArgumentOrderError,
    DegenerateNivError,
    DomainError,
    ExtractionError,
    NscError,
    RangeError,
    ShapeError,
)
from nsceval.noise import NoiseKind, NoiseSpec, classify, k_m_for

VARIANTS = ("nsc", "nscd")

UNDERFLOW = 1e-300
"""Allan variances of the NIV below this are treated as zero"""

TOTAL_RATIO_WEIGHT = 0.47
"""Weight of the total-to-effect variance ratio in the confidence model"""

EXTRACT_N_SIGMA = 3.0
"""Error bars a point of an estimation window may deviate from the window mean"""


@dataclass
class CurveConfig:
    """Object to hold the configuration of a K curve run."""

    input_file: Path
    """CSV file with the frequency and NIV columns"""
    y: str
    """Column name of the frequency record"""
    x: str
    """Column name of the NIV record"""
    out: Path
    """Output CSV file for the curve"""
    style: str = "overlap"
    """Estimator style, `normal` or `overlap`"""
    variant: str = "nsc"
    """`nsc`, or `nscd` to difference both series first"""
    noise: str = "auto"
    """Noise kind of x (`wfn`, `ffn`, `rwn`) or `auto` to classify"""
    tau0: float | None = None
    """Base period overriding the `# tau0` line of the input"""
    max_factor: int | None = None
    """Largest averaging factor of the grid"""

    def as_dict(self):
        """Return configuration object as dictionary"""
        return vars(self)

    def to_toml(self):
        """Return configuration object as TOML"""
        return tomlkit.dumps(
            {
                k: str(v) if isinstance(v, Path) else v
                for k, v in self.as_dict().items()
                if v is not None
            }
        )


@dataclass(frozen=True)
class KCurvePoint:
    """Sensitivity estimate at one averaging factor."""

    m: int
    tau: float
    k: float
    sigma_k: float
    edf: float


@dataclass(frozen=True)
class OmittedPoint:
    """Averaging factor skipped in a curve, with the error category as reason."""

    m: int
    tau: float
    reason: str


@dataclass(frozen=True)
class KCurve:
    """Sensitivity curve over averaging time."""

    points: tuple[KCurvePoint, ...]
    style: str = "overlap"
    variant: str = "nsc"
    noise_kind: str | None = None
    omitted: tuple[OmittedPoint, ...] = ()
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "omitted", tuple(self.omitted))
        if self.style not in STYLES:
            raise RangeError(f"Unknown style '{self.style}'")
        if self.variant not in VARIANTS:
            raise RangeError(f"Unknown variant '{self.variant}'")
        factors = [p.m for p in self.points]
        if any(b <= a for a, b in zip(factors, factors[1:])):
            raise ShapeError("Curve points must have strictly increasing m")

    def __len__(self):
        return len(self.points)

    @property
    def m(self):
        return np.array([p.m for p in self.points], dtype=int)

    @property
    def tau(self):
        return np.array([p.tau for p in self.points])

    @property
    def k(self):
        return np.array([p.k for p in self.points])

    @property
    def sigma_k(self):
        return np.array([p.sigma_k for p in self.points])

    def to_frame(self):
        """Return the points as a `pandas.DataFrame`"""
        frame = pd.DataFrame(
            {
                "m": self.m,
                "tau": self.tau,
                "k": self.k,
                "sigma_k": self.sigma_k,
                "edf": [p.edf for p in self.points],
            }
        )
        frame["style"] = self.style
        frame["variant"] = self.variant
        return frame


@dataclass(frozen=True)
class KEstimate:
    """Scalar sensitivity with decomposed uncertainty over a window of a curve."""

    k_bar: float
    """Mean of the curve over the window"""
    sigma_bar: float
    """Sample standard deviation of the curve over the window"""
    sigma_max: float
    """Largest point error bar in the window"""
    sigma_total: float
    """`sqrt(sigma_bar**2 + sigma_max**2)`"""
    interval: tuple[int, int]
    """Averaging factors `(m_lo, m_hi)` of the window"""
    tau_interval: tuple[float, float] = (0.0, 0.0)
    n_points: int = 0

    def as_dict(self):
        """Return the estimate as a flat dictionary"""
        return {
            "k_bar": self.k_bar,
            "sigma_bar": self.sigma_bar,
            "sigma_max": self.sigma_max,
            "sigma_total": self.sigma_total,
            "m_lo": self.interval[0],
            "m_hi": self.interval[1],
            "tau_lo": self.tau_interval[0],
            "tau_hi": self.tau_interval[1],
            "n_points": self.n_points,
        }


def difference(series):
    """Adjacent differences of a series, the transform of the NSC-D variant."""
    series = as_series(series)
    return as_series(np.diff(series.values), series.tau0)


def split_segments(series, parts):
    """
    Divide a record into `parts` equal consecutive segments.

    Trailing samples that do not fill the last segment are discarded.
    """
    series = as_series(series)
    length = series.m0 // parts if parts >= 1 else 0
    if length < 2:
        raise RangeError(f"Cannot split {series.m0} samples into {parts} segments")
    return [
        as_series(series.values[i * length : (i + 1) * length], series.tau0)
        for i in range(parts)
    ]


def _check_pair(y, x):
    if y.m0 != x.m0:
        raise ShapeError(f"y and x must have equal lengths, got {y.m0} and {x.m0}")


def k_of_tau(y, x, m, style="overlap"):
    """
    Sensitivity of `y` to `x` at averaging factor `m`.

    Parameters
    ----------
    y, x : TimeSeries or array_like
        Synchronized frequency and NIV records of equal length
    m : int
        Averaging factor
    style : str
        `normal` or `overlap`

    Returns
    -------
    float
        Allan covariance of `y` and `x` over the Allan variance of `x`
    """
    y = as_series(y)
    x = as_series(x)
    _check_pair(y, x)
    var_x = allan_variance(x, m, style)
    if var_x < UNDERFLOW:
        raise DegenerateNivError(
            f"Allan variance of the NIV vanishes at m={m} ({var_x:g})"
        )
    return allan_covariance(y, x, m, style) / var_x


def sigma_k_rel(n_eff, ratio_total_to_effect, k_m):
    """
    Relative standard deviation of a sensitivity estimate.

    Parameters
    ----------
    n_eff : float
        Averaged sample count M, or the effective degrees of freedom
    ratio_total_to_effect : float
        Allan variance of y over the part of it caused by the NIV
    k_m : float
        Noise dependent constant (0.87, 0.77, 0.75 for WFN, FFN, RWN)

    Returns
    -------
    float
        `sqrt((0.47 * ratio + 1 / k_m) / n_eff)`
    """
    if not (n_eff > 0 and ratio_total_to_effect > 0 and k_m > 0):
        raise DomainError(
            "Confidence model needs positive arguments, got"
            f" n={n_eff}, ratio={ratio_total_to_effect}, K_M={k_m}"
        )
    return float(
        np.sqrt((TOTAL_RATIO_WEIGHT * ratio_total_to_effect + 1 / k_m) / n_eff)
    )


def predicted_sigma_k(k, var_y, var_x, n_eff, k_m):
    """
    Absolute error bar of a sensitivity estimate from measured variances.

    Equal to `|k| * sigma_k_rel(n_eff, var_y / (k**2 var_x), k_m)` and finite for
    `k = 0`.
    """
    if not (n_eff > 0 and k_m > 0 and var_x > 0):
        raise DomainError(
            f"Confidence model needs positive n, K_M and var_x, got {n_eff}, {k_m},"
            f" {var_x}"
        )
    return float(
        np.sqrt((TOTAL_RATIO_WEIGHT * var_y / var_x + k**2 / k_m) / n_eff)
    )


def _resolve_noise_kind(x, noise_kind):
    """Noise kind and confidence constant of the analysed NIV."""
    if isinstance(noise_kind, NoiseSpec):
        return noise_kind.kind, noise_kind.k_m
    if noise_kind is None or noise_kind == "auto":
        kind = classify(x)
        logger.info("Classified NIV noise as {}", kind if kind else "unknown")
        return kind, k_m_for(kind)
    kind = NoiseKind(noise_kind)
    return kind, k_m_for(kind)


def k_curve(
    y,
    x,
    grid=None,
    style="overlap",
    variant="nsc",
    noise_kind="auto",
    provenance=None,
):
    """
    Sensitivity curve of `y` to `x` over an averaging grid.

    Points whose computation fails are omitted and recorded with the error
    category in `KCurve.omitted`.

    Parameters
    ----------
    y, x : TimeSeries or array_like
        Synchronized frequency and NIV records of equal length
    grid : TauGrid, optional
        Averaging factors, by default `TauGrid.default(M0)` of the analysed series
    style : str
        `normal` (error bars from `M`) or `overlap` (error bars from the edf)
    variant : str
        `nsc`, or `nscd` to replace both series by their adjacent differences
    noise_kind : NoiseKind or str or NoiseSpec or None
        Noise kind of the analysed x; `auto` or `None` classifies it by slope and
        falls back to `K_M = 0.75` and `edf = M` if that fails. A `NoiseSpec`
        also supplies its own confidence constant `K_M`
    provenance : dict, optional
        Identifiers of the inputs, stored with the curve

    Returns
    -------
    KCurve
    """
    if variant not in VARIANTS:
        raise RangeError(f"Unknown variant '{variant}', expected one of {VARIANTS}")
    if style not in STYLES:
        raise RangeError(f"Unknown style '{style}', expected one of {STYLES}")
    y = as_series(y)
    x = as_series(x)
    _check_pair(y, x)
    if variant == "nscd":
        y = difference(y)
        x = difference(x)
    grid = (grid or TauGrid.default(x.m0)).check(x.m0)
    kind, k_m = _resolve_noise_kind(x, noise_kind)

    points = []
    omitted = []
    first_error = None
    for m in grid:
        tau = m * x.tau0
        try:
            var_x = allan_variance(x, m, style)
            if var_x < UNDERFLOW:
                raise DegenerateNivError(
                    f"Allan variance of the NIV vanishes at m={m} ({var_x:g})"
                )
            k = allan_covariance(y, x, m, style) / var_x
            var_y = allan_variance(y, m, style)
            n_eff = x.m0 // m if style == "normal" else edf(kind, m, x.m0)
            sigma = predicted_sigma_k(k, var_y, var_x, n_eff, k_m)
        except NscError as e:
            logger.warning("Omitting m={} from K curve: {}", m, e)
            omitted.append(OmittedPoint(int(m), tau, e.category))
            first_error = first_error or e
            continue
        points.append(KCurvePoint(int(m), tau, k, sigma, float(n_eff)))

    if not points:
        raise first_error
    logger.info(
        "Computed K curve with {} points ({} omitted), style={}, variant={}",
        len(points),
        len(omitted),
        style,
        variant,
    )
    return KCurve(
        tuple(points),
        style=style,
        variant=variant,
        noise_kind=str(kind) if kind else None,
        omitted=tuple(omitted),
        provenance=dict(provenance or {}),
    )


def _curve_or_error(y, x, grid, style, variant, noise_kind, provenance):
    try:
        return k_curve(y, x, grid, style, variant, noise_kind, provenance)
    except NscError as e:
        logger.warning("K curve for {} failed: {}", provenance, e)
        return e


def parallel_curves(
    y, xs, grid=None, style="overlap", variant="nsc", noise_kind="auto", n_jobs=1
):
    """
    Independent sensitivity curves of `y` to several NIVs.

    Parameters
    ----------
    y : TimeSeries or array_like
        Frequency record
    xs : sequence or mapping of TimeSeries or array_like
        NIV records of the same length as `y`; mapping keys name the curves
    n_jobs : int
        Number of joblib workers

    Returns
    -------
    list of KCurve or NscError
        One entry per NIV in input order; failed NIVs yield their error instead
        of a curve
    """
    y = as_series(y)
    if hasattr(xs, "items"):
        named = list(xs.items())
    else:
        named = [(str(i), x) for i, x in enumerate(xs)]
    for name, x in named:
        if as_series(x).m0 != y.m0:
            raise ShapeError(f"NIV '{name}' length differs from y")
    return Parallel(n_jobs=n_jobs)(
        delayed(_curve_or_error)(
            y, x, grid, style, variant, noise_kind, {"x": name}
        )
        for name, x in named
    )


def dilution_factor(sigma2_x_true, sigma2_x_measured):
    """
    Attenuation of a sensitivity estimate by noise on the measured NIV.

    Returns
    -------
    float
        `sigma2_x_true / sigma2_x_measured`, in `(0, 1]`
    """
    if not sigma2_x_true > 0:
        raise DomainError(f"True NIV variance must be positive, got {sigma2_x_true}")
    if sigma2_x_measured < sigma2_x_true:
        raise ArgumentOrderError(
            f"Measured NIV variance {sigma2_x_measured} is below the true variance"
            f" {sigma2_x_true}"
        )
    return sigma2_x_true / sigma2_x_measured


def in_bar(curve, k_true, n_sigma=1.0):
    """Whether each curve point lies within `n_sigma` of its error bar from `k_true`."""
    return np.abs(curve.k - k_true) <= n_sigma * curve.sigma_k


def in_bar_limit(curve, k_true, n_sigma=1.0):
    """
    Largest averaging time up to which every curve point is in its bar.

    Returns
    -------
    float
        0.0 if the first point is already outside
    """
    flags = in_bar(curve, k_true, n_sigma)
    if flags.all():
        return float(curve.tau[-1])
    first_out = int(np.argmin(flags))
    return float(curve.tau[first_out - 1]) if first_out > 0 else 0.0


def extract_estimate(curve, min_decades=1.0, n_sigma=EXTRACT_N_SIGMA):
    """
    Condense a sensitivity curve into a scalar estimate.

    All contiguous windows spanning at least `min_decades` in averaging time are
    candidates. A window is consistent when every point lies within `n_sigma` of its
    own error bar from the window mean. The consistent window with the smallest total
    uncertainty wins; ties go to the wider window, then to the smaller first factor.

    Parameters
    ----------
    curve : KCurve
        Curve to condense
    min_decades : float
        Minimal span of a window in decades of averaging time
    n_sigma : float
        Consistency threshold in units of each point's error bar

    Returns
    -------
    KEstimate
    """
    if len(curve) < 2:
        raise ExtractionError("Curve needs at least two points")
    if n_sigma <= 0:
        raise DomainError(f"n_sigma must be positive, got {n_sigma}")
    tau = curve.tau
    k = curve.k
    bars = curve.sigma_k
    span = 10**min_decades

    best = None
    best_key = None
    closest = None
    for lo in range(len(tau)):
        for hi in range(lo + 1, len(tau)):
            if tau[hi] < span * tau[lo] * (1 - 1e-12):
                continue
            values = k[lo : hi + 1]
            window_bars = bars[lo : hi + 1]
            violation = np.max(np.abs(values - values.mean()) - n_sigma * window_bars)
            if violation > 0:
                if closest is None or violation < closest[1]:
                    closest = ((int(curve.m[lo]), int(curve.m[hi])), float(violation))
                continue
            total = np.hypot(np.std(values, ddof=1), window_bars.max())
            key = (total, -(hi - lo), lo)
            if best is None or _better(key, best_key):
                best = (lo, hi)
                best_key = key

    if best is None:
        if closest is None:
            raise ExtractionError(
                f"Curve spans less than {min_decades:g} decade(s) in tau"
            )
        raise ExtractionError(
            f"No window qualifies; closest is m={closest[0][0]}..{closest[0][1]}"
            f" exceeding {n_sigma:g} error bars by {closest[1]:g}",
            best_window=closest[0],
            violation=closest[1],
        )

    lo, hi = best
    values = k[lo : hi + 1]
    sigma_bar = float(np.std(values, ddof=1))
    sigma_max = float(bars[lo : hi + 1].max())
    estimate = KEstimate(
        k_bar=float(values.mean()),
        sigma_bar=sigma_bar,
        sigma_max=sigma_max,
        sigma_total=float(np.hypot(sigma_bar, sigma_max)),
        interval=(int(curve.m[lo]), int(curve.m[hi])),
        tau_interval=(float(tau[lo]), float(tau[hi])),
        n_points=hi - lo + 1,
    )
    logger.info(
        "Selected window m={}..{}: K={} +- {}",
        *estimate.interval,
        estimate.k_bar,
        estimate.sigma_total,
    )
    return estimate


def _better(key, other):
    total, width, lo = key
    other_total, other_width, other_lo = other
    if not np.isclose(total, other_total, rtol=1e-12, atol=0):
        return total < other_total
    return (width, lo) < (other_width, other_lo)
