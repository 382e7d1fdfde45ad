"""
Preset scenarios of the reference numerical experiments.

| Name            | Content                                                          |
|-----------------|------------------------------------------------------------------|
| `fig3_affs`     | fountain-like white floor `1/(Q SNR)` with reference, k = 0.11     |
| `fig3_osc`      | oscillator-like flicker plus random walk floor, k = 0.11          |
| `fig4_wfn`      | white y and x, ratio 0.05, M0 = 2e6                               |
| `fig4_ffn`      | flicker y and x, ratio 0.05, M0 = 2e6                             |
| `fig4_rwn`      | random walk y and x, ratio 0.05, M0 = 2e6                         |
| `fig5_delay`    | white y and x, x delayed by 10 tau0                               |
| `fig5_integral` | white y and x, x smeared over 10 tau0                             |
| `fig5_both`     | delay 6 tau0 and integral mean over 8 tau0                        |
| `table1`        | the `fig4_wfn` setup used for the scalar estimate                 |
| `zeeman_demo`   | quadratic Zeeman shift `a (V + dV)**2` linearised to k = 2 a V     |

The ratio is the share of the effect in the Allan variance of `y` at tau0, computed
with the NIV value that actually drives the clock. `scale` shortens the record for
desk runs; all channel seeds derive from the master seed.

The `fig3_*` presets replace recorded fountain and maser data by synthetic noise of
the same slopes.
"""

import numpy as np

from nsceval.asynchrony import AsynchronySpec
from nsceval.errors import RangeError, UnknownPresetError
from nsceval.noise import NoiseKind, NoiseSpec
from nsceval.simulation import ClockSpec, EffectSpec, QualityFloor, Scenario
from nsceval.util import channel_seeds

Y_BAR = 1e-13
"""Mean offset of all presets"""

FIG4_LENGTH = 2_000_000
FIG3_LENGTH = 650_000
FIG4_RATIO = 0.05
FIG3_RATIO = 0.01
FIG5_RATIO = 0.1

ZEEMAN_A = 3.235e-14
"""Quadratic Zeeman coefficient in 1/V**2"""
ZEEMAN_V_BAR = 1.0
"""Mean voltage in V"""
ZEEMAN_MAX_DV = 1e-3
"""Bound on the relative voltage fluctuation `|dV| / V_bar` of every sample"""
ZEEMAN_DV = 1.5e-4
"""Allan deviation at tau0 of the voltage fluctuation in V, well below the bound"""


def _length(base, scale):
    return max(int(round(base * scale)), 16)


def _floor_level(k, niv_level, ratio):
    """Floor deviation that makes the effect a share `ratio` of the total variance."""
    return np.sqrt((1 - ratio) / ratio) * abs(k) * niv_level


def _power_law(kind, name, scale, seed, ratio=FIG4_RATIO, k=1.0, niv_level=1e-13):
    floor_seed, niv_seed = channel_seeds(seed, 2)
    clock = ClockSpec(
        y_bar=Y_BAR,
        noise_floor=(NoiseSpec(kind, _floor_level(k, niv_level, ratio), floor_seed),),
        effects=(EffectSpec("xI", k, (NoiseSpec(kind, niv_level, niv_seed),)),),
    )
    return Scenario(
        clock,
        _length(FIG4_LENGTH, scale),
        seed,
        name=name,
        expected={"k": k, "ratio": ratio, "kind": str(kind)},
    )


def fig4_wfn(scale, seed):
    return _power_law(NoiseKind.WFN, "fig4_wfn", scale, seed)


def fig4_ffn(scale, seed):
    return _power_law(NoiseKind.FFN, "fig4_ffn", scale, seed)


def fig4_rwn(scale, seed):
    return _power_law(NoiseKind.RWN, "fig4_rwn", scale, seed)


def table1(scale, seed):
    return _power_law(NoiseKind.WFN, "table1", scale, seed)


def fig3_affs(scale, seed):
    """Fountain-like clock against a maser reference, effect share 0.01."""
    floor_seed, niv_seed, reference_seed = channel_seeds(seed, 3)
    floor = QualityFloor(q=6.8e9, snr=500, seed=floor_seed)
    white = floor.noise_specs()[0].level
    reference = NoiseSpec(NoiseKind.WFN, 0.3 * white, reference_seed)
    k = 0.11
    others = white**2 + reference.level**2
    niv_level = np.sqrt(FIG3_RATIO / (1 - FIG3_RATIO) * others) / k
    clock = ClockSpec(
        y_bar=Y_BAR,
        noise_floor=floor,
        effects=(
            EffectSpec("xI", k, (NoiseSpec(NoiseKind.WFN, niv_level, niv_seed),)),
        ),
        reference=reference,
    )
    return Scenario(
        clock,
        _length(FIG3_LENGTH, scale),
        seed,
        name="fig3_affs",
        expected={"k": k, "ratio": FIG3_RATIO, "in_bar_tau": 650},
        notes="synthetic white noise in place of recorded fountain data",
    )


def fig3_osc(scale, seed):
    """Oscillator-like clock dominated by flicker and random walk noise."""
    flicker_seed, walk_seed, niv_flicker_seed, niv_walk_seed = channel_seeds(seed, 4)
    k = 0.11
    niv_level = 1e-12
    level = _floor_level(k, niv_level, FIG3_RATIO)
    # random walk crosses the flicker floor near 100 tau0
    floor = (
        NoiseSpec(NoiseKind.FFN, level, flicker_seed),
        NoiseSpec(NoiseKind.RWN, level / 10, walk_seed),
    )
    niv = (
        NoiseSpec(NoiseKind.FFN, niv_level, niv_flicker_seed),
        NoiseSpec(NoiseKind.RWN, niv_level / 10, niv_walk_seed),
    )
    clock = ClockSpec(
        y_bar=Y_BAR, noise_floor=floor, effects=(EffectSpec("xI", k, niv),)
    )
    return Scenario(
        clock,
        _length(FIG3_LENGTH, scale),
        seed,
        name="fig3_osc",
        expected={"k": k, "ratio": FIG3_RATIO, "out_of_bar_tau": 100},
        notes="synthetic flicker and random walk noise in place of recorded data",
    )


def _asynchronous(name, delay, integral, scale, seed):
    floor_seed, niv_seed = channel_seeds(seed, 2)
    k = 0.11
    niv_level = 1e-12
    # a box mean over I white samples has Allan deviation level / I at tau0
    driving_level = niv_level / integral
    clock = ClockSpec(
        y_bar=Y_BAR,
        noise_floor=(
            NoiseSpec(
                NoiseKind.WFN, _floor_level(k, driving_level, FIG5_RATIO), floor_seed
            ),
        ),
        effects=(
            EffectSpec(
                "xI",
                k,
                (NoiseSpec(NoiseKind.WFN, niv_level, niv_seed),),
                asynchrony=AsynchronySpec(delay, integral),
            ),
        ),
    )
    return Scenario(
        clock,
        _length(FIG3_LENGTH, scale),
        seed,
        name=name,
        expected={"k": k, "ratio": FIG5_RATIO, "delay": delay, "integral": integral},
    )


def fig5_delay(scale, seed):
    return _asynchronous("fig5_delay", 10, 1, scale, seed)


def fig5_integral(scale, seed):
    return _asynchronous("fig5_integral", 0, 10, scale, seed)


def fig5_both(scale, seed):
    return _asynchronous("fig5_both", 6, 8, scale, seed)


def zeeman_demo(scale, seed):
    """Quadratic shift of a voltage-driven field, linearised around the mean."""
    floor_seed, niv_seed = channel_seeds(seed, 2)
    k = 2 * ZEEMAN_A * ZEEMAN_V_BAR
    clock = ClockSpec(
        y_bar=Y_BAR + ZEEMAN_A * ZEEMAN_V_BAR**2,
        noise_floor=(
            NoiseSpec(
                NoiseKind.WFN, _floor_level(k, ZEEMAN_DV, FIG4_RATIO), floor_seed
            ),
        ),
        effects=(
            EffectSpec(
                "dV",
                k,
                (NoiseSpec(NoiseKind.WFN, ZEEMAN_DV, niv_seed),),
                curvature=ZEEMAN_A,
            ),
        ),
    )
    return Scenario(
        clock,
        _length(FIG3_LENGTH, scale),
        seed,
        name="zeeman_demo",
        expected={"k": k, "a": ZEEMAN_A, "v_bar": ZEEMAN_V_BAR},
    )


PRESETS = {
    "fig3_affs": fig3_affs,
    "fig3_osc": fig3_osc,
    "fig4_wfn": fig4_wfn,
    "fig4_ffn": fig4_ffn,
    "fig4_rwn": fig4_rwn,
    "fig5_delay": fig5_delay,
    "fig5_integral": fig5_integral,
    "fig5_both": fig5_both,
    "table1": table1,
    "zeeman_demo": zeeman_demo,
}


def preset(name, scale=1.0, seed=0):
    """
    Build a preset scenario.

    Parameters
    ----------
    name : str
        One of `PRESETS`
    scale : float
        Share of the reference record length, in `(0, 1]`
    seed : int
        Master seed

    Returns
    -------
    Scenario
    """
    if name not in PRESETS:
        raise UnknownPresetError(name, sorted(PRESETS))
    if not 0 < scale <= 1:
        raise RangeError(f"Scale must be in (0, 1], got {scale}")
    return PRESETS[name](scale, seed)
