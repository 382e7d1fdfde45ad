"""
Timing mismatch between a frequency record and its NIV record.

Two forms of asynchrony are modelled. In a delay the clock at step `j` responds to
the NIV value measured at step `j + D`. In an integral mean it responds to the mean of
the NIV over a centred window of `I` steps. Both distort the sensitivity curve at
averaging times comparable to `D tau0` or `I tau0`, following the closed forms
`theory_k_delay` and `theory_k_integral`.

`compensate` searches a grid of `(D, I)` candidates for the transformation of the
measured NIV that best explains the frequency record, i.e. that leaves the smallest
residual Allan variance of `y - K x'` at a few small averaging factors.

For command line usage, see `nsceval.commands.compensate`.
"""

from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
import pandas as pd
import tomlkit
from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from nsceval.allan import allan_covariance, allan_variance, as_series
from nsceval.errors import (
    CompensationError,
    DomainError,
    NscError,
    RangeError,
    ShapeError,
)
from nsceval.sensitivity import UNDERFLOW, k_curve
from nsceval.util import timeit

DEFAULT_PROBES = (1, 2, 4, 8)


@dataclass
class CompensationConfig:
    """Object to hold the configuration of an asynchrony compensation run."""

    input_file: Path
    """CSV file with the frequency and NIV columns"""
    y: str
    """Column name of the frequency record"""
    x: str
    """Column name of the NIV record"""
    out: Path | None = None
    """Output CSV file for the compensated curve"""
    dmin: int | None = None
    """Smallest delay candidate in base periods, defaults to `-dmax`"""
    dmax: int = 32
    """Largest delay candidate in base periods"""
    imax: int = 32
    """Largest integral window candidate in base periods"""
    probes: tuple[int, ...] = DEFAULT_PROBES
    """Averaging factors at which candidates are scored"""
    style: str = "overlap"
    """Estimator style, `normal` or `overlap`"""
    noise: str = "auto"
    """Noise kind of x for the error bars of the compensated curve"""
    tau0: float | None = None
    """Base period overriding the `# tau0` line of the input"""
    n_jobs: int = 1
    """Number of parallel workers"""
    progressbar: bool = False
    """Show progress bar"""

    def as_dict(self):
        """Return configuration object as dictionary"""
        return vars(self)

    def to_toml(self):
        """Return configuration object as TOML"""
        values = {k: v for k, v in self.as_dict().items() if v is not None}
        values["probes"] = list(self.probes)
        for key in ("input_file", "out"):
            if key in values:
                values[key] = str(values[key])
        return tomlkit.dumps(values)


@dataclass(frozen=True)
class AsynchronySpec:
    """Integer delay and integral window, in base periods."""

    delay: int = 0
    """Signed delay D"""
    integral: int = 1
    """Integral mean window I"""

    def __post_init__(self):
        if int(self.delay) != self.delay or int(self.integral) != self.integral:
            raise RangeError("Delay and integral window must be integers")
        object.__setattr__(self, "delay", int(self.delay))
        object.__setattr__(self, "integral", int(self.integral))
        if self.integral < 1:
            raise RangeError(f"Integral window must be >= 1, got {self.integral}")

    @property
    def mode(self):
        """`none`, `delay`, `integral` or `both`"""
        if self.delay and self.integral > 1:
            return "both"
        if self.delay:
            return "delay"
        if self.integral > 1:
            return "integral"
        return "none"

    @property
    def padding(self):
        """Extra raw samples needed to realise this asynchrony on a record"""
        return abs(self.delay) + self.integral

    def as_dict(self):
        return {"delay": self.delay, "integral": self.integral}


def apply_delay(x, delay):
    """
    Shift a series by `delay` base periods.

    Parameters
    ----------
    x : TimeSeries or array_like
        Measured record of length M0
    delay : int
        Signed delay, `|delay| < M0`

    Returns
    -------
    values : numpy.ndarray
        `M0 - |delay|` samples, element `k` pairs with partner sample `offset + k`
    offset : int
        Index of the first aligned partner sample
    """
    x = as_series(x)
    m0 = x.m0
    if abs(delay) >= m0:
        raise RangeError(f"Delay {delay} outside (-{m0}, {m0})")
    if delay >= 0:
        return x.values[delay:].copy(), 0
    return x.values[: m0 + delay].copy(), -delay


def apply_integral_mean(x, integral):
    """
    Centred moving average over `integral` base periods.

    Only full windows are kept. For odd windows the output has `M0 - I + 1`
    samples centred on partner samples; for even windows it has `M0 - I` samples,
    each centred half a step after its partner sample.

    Returns
    -------
    values : numpy.ndarray
        Window means
    offset : int
        Index of the first aligned partner sample, `I // 2`
    """
    x = as_series(x)
    m0 = x.m0
    if not 1 <= integral <= m0 / 2:
        raise RangeError(f"Integral window {integral} outside [1, {m0 / 2:g}]")
    if integral == 1:
        return x.values.copy(), 0
    offset = integral // 2
    length = m0 - 2 * offset
    # full windows indexed by their first sample
    means = pd.Series(x.values).rolling(integral).mean().to_numpy()[integral - 1 :]
    start = offset - (integral - 1) // 2
    return means[start : start + length], offset


def align(y, x, spec):
    """
    Transform the measured NIV by `spec` and cut `y` to the aligned samples.

    Returns
    -------
    tuple of numpy.ndarray
        Aligned `(y, x')` of equal length
    """
    y = as_series(y)
    x = as_series(x)
    if y.m0 != x.m0:
        raise ShapeError(f"y and x must have equal lengths, got {y.m0} and {x.m0}")
    delayed_x, offset = apply_delay(x, spec.delay)
    smeared_x, inner = apply_integral_mean(
        as_series(delayed_x, x.tau0), spec.integral
    )
    offset += inner
    return y.values[offset : offset + len(smeared_x)], smeared_x


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("Averaging time must be positive")
    return tau


def _scalar_or_array(values, tau):
    return float(values) if np.ndim(tau) == 0 else values


def theory_k_delay(tau, tau_dly, k):
    """
    Sensitivity curve expected under a pure delay.

    Parameters
    ----------
    tau : float or array_like
        Averaging time in seconds
    tau_dly : float
        Delay in seconds, only its magnitude matters
    k : float
        True sensitivity

    Returns
    -------
    float or numpy.ndarray
        0 below `|tau_dly| / 2`, then `(|tau_dly| / (2 tau) - 1) k` below `|tau_dly|`,
        then `(1 - 3 |tau_dly| / (2 tau)) k`
    """
    t = _check_tau(tau)
    d = abs(tau_dly)
    values = np.select(
        [t < d / 2, t < d],
        [np.zeros_like(t), (d / (2 * t) - 1) * k],
        (1 - 3 * d / (2 * t)) * k,
    )
    return _scalar_or_array(values, tau)


def theory_k_integral(tau, tau_int, k):
    """
    Sensitivity curve expected under an integral mean.

    Returns
    -------
    float or numpy.ndarray
        0 below `tau_int / 4`, then `(tau_int - 4 tau)**2 / (8 tau tau_int) k` below
        `tau_int / 2`, then `(1 - 3 tau_int / (8 tau)) k`
    """
    if not tau_int > 0:
        raise DomainError(f"Integral time must be positive, got {tau_int}")
    t = _check_tau(tau)
    values = np.select(
        [t < tau_int / 4, t < tau_int / 2],
        [np.zeros_like(t), (tau_int - 4 * t) ** 2 / (8 * t * tau_int) * k],
        (1 - 3 * tau_int / (8 * t)) * k,
    )
    return _scalar_or_array(values, tau)


def theory_curve(tau, spec, k, tau0=1.0):
    """
    Expected sensitivity curve for an `AsynchronySpec`.

    Combined delay and integral mean are approximated by the product of the two
    normalised curves.
    """
    values = np.ones_like(_check_tau(tau)) * k
    if spec.delay:
        values = values * theory_k_delay(tau, spec.delay * tau0, 1.0)
    if spec.integral > 1:
        values = values * theory_k_integral(tau, spec.integral * tau0, 1.0)
    return _scalar_or_array(values, tau)


def residual_score(y, x, probes=DEFAULT_PROBES, style="overlap"):
    """
    Summed normalised residual Allan variance of `y - K x` over probe factors.

    With `K` the optimal sensitivity at each probe this equals
    `sum(1 - ACOV(y, x)**2 / (AVAR(x) AVAR(y)))`.
    """
    score = 0.0
    for m in probes:
        var_x = allan_variance(x, m, style)
        var_y = allan_variance(y, m, style)
        if var_x < UNDERFLOW or var_y < UNDERFLOW:
            raise DomainError(f"Vanishing Allan variance at m={m}")
        cov = allan_covariance(y, x, m, style)
        score += 1 - cov**2 / (var_x * var_y)
    return score


def _score_candidate(y, x, spec, probes, style):
    try:
        y_aligned, x_aligned = align(y, x, spec)
        return residual_score(y_aligned, x_aligned, probes, style), None
    except NscError as e:
        return np.inf, f"{e.category}: {e}"


@dataclass(frozen=True)
class CompensationResult:
    """Best asynchrony candidate of a grid search."""

    spec: AsynchronySpec
    score: float
    curve: object
    """Sensitivity curve of the compensated pair"""
    scores: pd.DataFrame
    """Score of every candidate, columns `delay`, `integral`, `score`, `reason`"""

    @property
    def delay(self):
        return self.spec.delay

    @property
    def integral(self):
        return self.spec.integral


@timeit
def compensate(
    y,
    x,
    delays,
    integrals,
    probes=DEFAULT_PROBES,
    style="overlap",
    grid=None,
    noise_kind="auto",
    n_jobs=1,
    progressbar=False,
):
    """
    Find the delay and integral window that best align `x` with `y`.

    Every candidate `(D, I)` is applied as `apply_integral_mean(apply_delay(x, D), I)`
    and scored by `residual_score` on the aligned pair. The smallest score wins; ties
    go to the smaller `|D|`, then to the smaller `I`.

    Parameters
    ----------
    y, x : TimeSeries or array_like
        Frequency and measured NIV records of equal length
    delays : iterable of int
        Delay candidates
    integrals : iterable of int
        Integral window candidates, each >= 1
    probes : sequence of int
        Averaging factors of the score
    style : str
        Estimator style of score and curve
    grid : TauGrid, optional
        Averaging grid of the returned curve
    noise_kind : NoiseKind or str or None
        Noise kind for the error bars of the returned curve
    n_jobs : int
        Number of joblib workers
    progressbar : bool
        Show progress bar

    Returns
    -------
    CompensationResult
    """
    y = as_series(y)
    x = as_series(x)
    if y.m0 != x.m0:
        raise ShapeError(f"y and x must have equal lengths, got {y.m0} and {x.m0}")
    candidates = [
        AsynchronySpec(d, i)
        for d, i in product(sorted(set(delays)), sorted(set(integrals)))
    ]
    if not candidates:
        raise RangeError("Delay and integral ranges must be nonempty")
    logger.info("Scoring {} asynchrony candidates", len(candidates))

    results = Parallel(n_jobs=n_jobs)(
        delayed(_score_candidate)(y, x, spec, probes, style)
        for spec in tqdm(candidates, disable=not progressbar)
    )
    scores = pd.DataFrame(
        {
            "delay": [c.delay for c in candidates],
            "integral": [c.integral for c in candidates],
            "score": [r[0] for r in results],
            "reason": [r[1] for r in results],
        }
    )
    valid = scores[np.isfinite(scores["score"])]
    if valid.empty:
        raise CompensationError(
            f"All {len(candidates)} asynchrony candidates are degenerate",
            diagnostics=scores["reason"].value_counts().to_dict(),
        )
    best = (
        valid.assign(abs_delay=valid["delay"].abs())
        .sort_values(["score", "abs_delay", "integral"], kind="stable")
        .iloc[0]
    )
    spec = AsynchronySpec(int(best["delay"]), int(best["integral"]))
    logger.info(
        "Best asynchrony candidate D={}, I={} with score {}",
        spec.delay,
        spec.integral,
        best["score"],
    )
    for row in valid.nsmallest(5, "score").itertuples():
        logger.debug("Candidate D={} I={} score {}", row.delay, row.integral, row.score)

    y_aligned, x_aligned = align(y, x, spec)
    curve = k_curve(
        as_series(y_aligned, y.tau0),
        as_series(x_aligned, x.tau0),
        grid,
        style=style,
        provenance={"delay": spec.delay, "integral": spec.integral},
        noise_kind=noise_kind,
    )
    return CompensationResult(spec, float(best["score"]), curve, scores)
