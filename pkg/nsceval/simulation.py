"""
Clock record synthesis.

A simulated clock compared against a reference produces

    y_com[j] = y0[j] + y_bar + sum_i (k_i x_ri[j] + q_i x_ri[j]**2) - y_ref[j]

where `y0` is the noise floor, `x_ri` the value of the i-th noise independent variable
(NIV) that actually drives the clock and `q_i` an optional quadratic coefficient. The
record handed to the analysis is the *measured* NIV `x_i`; the driving value is
obtained from it by the same delay and integral mean transforms that
`nsceval.asynchrony.compensate` searches, and measurement noise is added to the
measured copy only.

Example:
```python
from nsceval.presets import preset
from nsceval.simulation import simulate

sim = simulate(preset("fig4_wfn", scale=0.25, seed=7))
sim.to_dataset()
```

For command line usage, see `nsceval.commands.simulate`.
"""

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from nsceval.asynchrony import AsynchronySpec, apply_delay, apply_integral_mean
from nsceval.errors import ConstructionError, NscError
from nsceval.noise import NoiseSpec, generate, generate_mixture
from nsceval.util import channel_seeds


def _as_specs(specs):
    if specs is None:
        return ()
    if isinstance(specs, NoiseSpec):
        return (specs,)
    return tuple(specs)


@dataclass(frozen=True)
class QualityFloor:
    """White frequency noise floor `1 / (Q SNR)` at tau0."""

    q: float
    """Quality factor of the interrogation"""
    snr: float
    """Signal-to-noise ratio of the interrogation"""
    seed: int = 0

    def __post_init__(self):
        if not (self.q > 0 and self.snr > 0):
            raise ConstructionError(
                f"Q and SNR must be positive, got Q={self.q}, SNR={self.snr}"
            )

    def noise_specs(self):
        """Noise floor as a tuple with one white noise spec"""
        return (NoiseSpec("wfn", 1 / (self.q * self.snr), self.seed),)

    def as_dict(self):
        return {"q": self.q, "snr": self.snr, "seed": self.seed}


@dataclass(frozen=True)
class EffectSpec:
    """A systematic effect driven by one noise independent variable."""

    name: str
    """Column name of the measured NIV"""
    k: float
    """True frequency sensitivity"""
    niv: tuple[NoiseSpec, ...]
    """Noise components of the NIV"""
    asynchrony: AsynchronySpec | None = None
    """Timing mismatch between the measured and the driving NIV"""
    measurement_noise: NoiseSpec | None = None
    """Noise added to the measured NIV only"""
    curvature: float = 0.0
    """Quadratic coefficient of the driving NIV"""

    def __post_init__(self):
        object.__setattr__(self, "niv", _as_specs(self.niv))
        if not self.niv:
            raise ConstructionError(f"Effect '{self.name}' needs a NIV noise spec")

    def as_dict(self):
        res = {"name": self.name, "k": self.k}
        if self.curvature:
            res["curvature"] = self.curvature
        res["niv"] = [s.as_dict() for s in self.niv]
        if self.asynchrony is not None:
            res["asynchrony"] = self.asynchrony.as_dict()
        if self.measurement_noise is not None:
            res["measurement_noise"] = self.measurement_noise.as_dict()
        return res


@dataclass(frozen=True)
class ClockSpec:
    """Noise floor, offset, effects and reference of a simulated clock."""

    y_bar: float = 0.0
    """Mean fractional frequency offset"""
    noise_floor: tuple[NoiseSpec, ...] | QualityFloor | None = None
    """Noise of the interrogation itself"""
    effects: tuple[EffectSpec, ...] = ()
    reference: NoiseSpec | None = None
    """Independent noise of the comparison reference, subtracted from y"""
    tau0: float = 1.0
    """Base period in seconds"""

    def __post_init__(self):
        if not isinstance(self.noise_floor, QualityFloor):
            object.__setattr__(self, "noise_floor", _as_specs(self.noise_floor))
        object.__setattr__(self, "effects", tuple(self.effects))

    def floor_specs(self):
        if isinstance(self.noise_floor, QualityFloor):
            return self.noise_floor.noise_specs()
        return self.noise_floor

    def as_dict(self):
        res = {"y_bar": self.y_bar, "tau0": self.tau0}
        if isinstance(self.noise_floor, QualityFloor):
            res["noise_floor"] = self.noise_floor.as_dict()
        elif self.noise_floor:
            res["noise_floor"] = [s.as_dict() for s in self.noise_floor]
        if self.reference is not None:
            res["reference"] = self.reference.as_dict()
        res["effects"] = [e.as_dict() for e in self.effects]
        return res


@dataclass(frozen=True)
class Scenario:
    """Complete recipe of a simulation run."""

    clock: ClockSpec
    n: int
    """Raw sample count M0"""
    seed: int = 0
    """Master seed the channel seeds were derived from"""
    name: str = "custom"
    expected: dict = field(default_factory=dict, compare=False)
    """Truth values for assertions, e.g. the expected in-bar range"""
    notes: str = ""

    def validate(self):
        """Raise `ConstructionError` if the scenario cannot be simulated"""
        if self.n < 2:
            raise ConstructionError(f"Scenario needs n >= 2 samples, got {self.n}")
        if not self.clock.tau0 > 0:
            raise ConstructionError(f"tau0 must be positive, got {self.clock.tau0}")
        names = [e.name for e in self.clock.effects]
        if len(set(names)) != len(names):
            raise ConstructionError(f"Effect names must be unique, got {names}")
        if "y" in names:
            raise ConstructionError("Effect name 'y' is reserved for the clock record")
        seeds = [s.seed for e in self.clock.effects for s in e.niv]
        if len(set(seeds)) != len(seeds):
            raise ConstructionError(f"Effect NIV seeds must be distinct, got {seeds}")
        return self

    def as_dict(self):
        """Return the scenario as nested dictionaries, see `scenario_from_dict`"""
        res = {"name": self.name, "n": self.n, "seed": self.seed}
        if self.notes:
            res["notes"] = self.notes
        res.update(self.clock.as_dict())
        if self.expected:
            res["expected"] = dict(self.expected)
        return res


def _noise_from_dict(entry, fallback_seed):
    entry = dict(entry)
    entry.setdefault("seed", fallback_seed)
    try:
        return NoiseSpec(**entry)
    except (TypeError, NscError) as e:
        raise ConstructionError(f"Invalid noise spec {entry}: {e}") from e


def scenario_from_dict(data):
    """
    Build a scenario from nested dictionaries, e.g. a parsed TOML file.

    Noise specs without a `seed` receive seeds derived from the master `seed`.
    """
    data = dict(data)
    master = int(data.get("seed", 0))
    effects_data = list(data.get("effects", []))
    fallback = iter(channel_seeds(master, 3 + 2 * len(effects_data) + 16))
    try:
        floor_data = data.get("noise_floor")
        if isinstance(floor_data, dict):
            floor = QualityFloor(
                floor_data["q"],
                floor_data["snr"],
                int(floor_data.get("seed", next(fallback))),
            )
        else:
            floor = tuple(
                _noise_from_dict(s, next(fallback)) for s in floor_data or []
            )
        reference = data.get("reference")
        if reference is not None:
            reference = _noise_from_dict(reference, next(fallback))
        effects = []
        for effect in effects_data:
            niv = effect["niv"]
            niv = [niv] if isinstance(niv, dict) else niv
            asynchrony = effect.get("asynchrony")
            noise = effect.get("measurement_noise")
            effects.append(
                EffectSpec(
                    name=effect["name"],
                    k=float(effect["k"]),
                    niv=tuple(_noise_from_dict(s, next(fallback)) for s in niv),
                    asynchrony=AsynchronySpec(**asynchrony) if asynchrony else None,
                    measurement_noise=_noise_from_dict(noise, next(fallback))
                    if noise
                    else None,
                    curvature=float(effect.get("curvature", 0.0)),
                )
            )
        clock = ClockSpec(
            y_bar=float(data.get("y_bar", 0.0)),
            noise_floor=floor,
            effects=tuple(effects),
            reference=reference,
            tau0=float(data.get("tau0", 1.0)),
        )
        return Scenario(
            clock=clock,
            n=int(data["n"]),
            seed=master,
            name=data.get("name", "custom"),
            expected=dict(data.get("expected", {})),
            notes=data.get("notes", ""),
        )
    except (KeyError, TypeError) as e:
        raise ConstructionError(f"Invalid scenario description: {e!r}") from e


@dataclass(frozen=True, eq=False)
class Simulation:
    """Output of `simulate`."""

    y: np.ndarray
    """Clock record compared against the reference"""
    x: dict
    """Measured NIV record per effect name"""
    truth: dict
    """Every injected parameter"""
    tau0: float = 1.0
    driving: dict = field(default_factory=dict)
    """NIV values that actually drove the clock, per effect name"""
    contributions: dict = field(default_factory=dict)
    """Frequency contribution of each effect"""

    def to_dataset(self):
        """Return the records as an `xarray.Dataset` with columns `y` and the NIVs"""
        from nsceval.io import make_dataset

        return make_dataset(
            {"y": self.y, **self.x},
            self.tau0,
            {"scenario": self.truth["scenario"], "seed": self.truth["seed"]},
        )


def _effect_records(effect, n):
    """Driving and measured NIV records of one effect."""
    spec = effect.asynchrony or AsynchronySpec()
    raw = generate_mixture(effect.niv, n + spec.padding)
    delayed_raw, offset = apply_delay(raw, spec.delay)
    driving, inner = apply_integral_mean(delayed_raw, spec.integral)
    start = offset + inner
    measured = raw[start : start + n]
    driving = driving[:n]
    if effect.measurement_noise is not None:
        measured = measured + generate(effect.measurement_noise, n)
    return driving, measured


def simulate(scenario):
    """
    Synthesize the clock record and measured NIVs of a scenario.

    Parameters
    ----------
    scenario : Scenario
        Recipe; validated before any noise is generated

    Returns
    -------
    Simulation
    """
    scenario.validate()
    clock = scenario.clock
    n = scenario.n

    floor = clock.floor_specs()
    y = generate_mixture(floor, n) if floor else np.zeros(n)
    y = y + clock.y_bar

    xs = {}
    driving = {}
    contributions = {}
    truth_effects = {}
    for effect in clock.effects:
        x_r, x_m = _effect_records(effect, n)
        contribution = effect.k * x_r
        if effect.curvature:
            contribution = contribution + effect.curvature * x_r**2
        y = y + contribution
        xs[effect.name] = x_m
        driving[effect.name] = x_r
        contributions[effect.name] = contribution
        truth_effects[effect.name] = effect.as_dict()

    if clock.reference is not None:
        y = y - generate(clock.reference, n)

    truth = {
        "scenario": scenario.name,
        "n": n,
        "seed": scenario.seed,
        "tau0": clock.tau0,
        "y_bar": clock.y_bar,
        "effects": truth_effects,
        **({"expected": dict(scenario.expected)} if scenario.expected else {}),
    }
    logger.info(
        "Simulated scenario '{}' with {} samples and {} effect(s)",
        scenario.name,
        n,
        len(clock.effects),
    )
    return Simulation(y, xs, truth, clock.tau0, driving, contributions)


def linearization_error(simulation, effect, v_bar, a):
    """
    Samplewise difference between a quadratic effect and its linearization.

    For `y = a (v_bar + dv)**2` the linear model is `a v_bar**2 + 2 a v_bar dv`; the
    difference is `a dv**2`.
    """
    dv = simulation.driving[effect]
    quadratic = a * (v_bar + dv) ** 2
    linear = a * v_bar**2 + 2 * a * v_bar * dv
    return quadratic - linear
