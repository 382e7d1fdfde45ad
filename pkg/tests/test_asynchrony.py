import numpy as np
import pytest

from nsceval.asynchrony import (
    AsynchronySpec,
    CompensationConfig,
    align,
    apply_delay,
    apply_integral_mean,
    compensate,
    residual_score,
    theory_curve,
    theory_k_delay,
    theory_k_integral,
)
from nsceval.errors import CompensationError, DomainError, RangeError
from nsceval.noise import NoiseSpec, generate
from nsceval.simulation import ClockSpec, EffectSpec, Scenario, simulate


def test_apply_delay():
    values, offset = apply_delay(np.arange(10.0), 2)
    np.testing.assert_array_equal(values, np.arange(2.0, 10.0))
    assert offset == 0
    values, offset = apply_delay(np.arange(10.0), -2)
    np.testing.assert_array_equal(values, np.arange(0.0, 8.0))
    assert offset == 2
    with pytest.raises(RangeError):
        apply_delay(np.arange(10.0), 10)


def test_apply_integral_mean_odd_window():
    values, offset = apply_integral_mean(np.arange(10.0), 3)
    np.testing.assert_allclose(values, np.arange(1.0, 9.0))
    assert offset == 1


def test_apply_integral_mean_even_window():
    values, offset = apply_integral_mean(np.arange(12.0), 4)
    np.testing.assert_allclose(values, np.arange(2.5, 10.5))
    assert offset == 2


def test_apply_integral_mean_unit_window():
    values, offset = apply_integral_mean(np.arange(6.0), 1)
    np.testing.assert_array_equal(values, np.arange(6.0))
    assert offset == 0


@pytest.mark.parametrize("integral", [0, 6])
def test_apply_integral_mean_range(integral):
    with pytest.raises(RangeError):
        apply_integral_mean(np.arange(10.0), integral)


def test_align():
    y = np.arange(20.0)
    x = np.arange(20.0) + 100
    y_aligned, x_aligned = align(y, x, AsynchronySpec(delay=3))
    np.testing.assert_array_equal(x_aligned - y_aligned, np.full(17, 103.0))
    y_aligned, x_aligned = align(y, x, AsynchronySpec(delay=-3))
    np.testing.assert_array_equal(x_aligned - y_aligned, np.full(17, 97.0))
    y_aligned, x_aligned = align(y, x, AsynchronySpec(delay=2, integral=5))
    assert len(y_aligned) == len(x_aligned) == 14
    np.testing.assert_allclose(x_aligned - y_aligned, 102.0)


def test_spec_mode():
    assert AsynchronySpec().mode == "none"
    assert AsynchronySpec(delay=-4).mode == "delay"
    assert AsynchronySpec(integral=3).mode == "integral"
    assert AsynchronySpec(6, 8).mode == "both"
    assert AsynchronySpec(6, 8).padding == 14
    with pytest.raises(RangeError):
        AsynchronySpec(integral=0)


def test_delay_curve_is_continuous():
    for d in (1.0, 10.0, 37.5):
        for boundary in (d / 2, d):
            below = np.nextafter(boundary, 0)
            np.testing.assert_allclose(
                theory_k_delay(below, d, 1.0),
                theory_k_delay(boundary, d, 1.0),
                atol=1e-12,
            )


def test_integral_curve_is_continuous():
    for t_int in (1.0, 10.0, 37.5):
        for boundary in (t_int / 4, t_int / 2):
            below = np.nextafter(boundary, 0)
            np.testing.assert_allclose(
                theory_k_integral(below, t_int, 1.0),
                theory_k_integral(boundary, t_int, 1.0),
                atol=1e-12,
            )


def test_theory_values():
    assert theory_k_delay(2.0, 10.0, 0.11) == 0.0
    np.testing.assert_allclose(theory_k_delay(10.0, 10.0, 1.0), -0.5)
    np.testing.assert_allclose(theory_k_delay(10.0, -10.0, 1.0), -0.5)
    np.testing.assert_allclose(theory_k_delay(1e6, 10.0, 0.11), 0.11, rtol=1e-4)
    np.testing.assert_allclose(theory_k_integral(5.0, 10.0, 1.0), 0.25)
    np.testing.assert_allclose(theory_k_integral(1e6, 10.0, 0.11), 0.11, rtol=1e-4)
    tau = np.array([1.0, 5.0, 20.0])
    assert theory_k_delay(tau, 10.0, 1.0).shape == (3,)


def test_theory_domain():
    with pytest.raises(DomainError):
        theory_k_delay(0.0, 10.0, 1.0)
    with pytest.raises(DomainError):
        theory_k_integral(1.0, 0.0, 1.0)


def test_theory_curve():
    tau = np.array([1.0, 10.0, 100.0])
    np.testing.assert_allclose(theory_curve(tau, AsynchronySpec(), 0.11), 0.11)
    np.testing.assert_allclose(
        theory_curve(tau, AsynchronySpec(delay=5), 0.11, tau0=2.0),
        theory_k_delay(tau, 10.0, 0.11),
    )
    np.testing.assert_allclose(
        theory_curve(tau, AsynchronySpec(6, 8), 1.0),
        theory_k_delay(tau, 6.0, 1.0) * theory_k_integral(tau, 8.0, 1.0),
    )


def test_residual_score_of_proportional_series():
    x = generate(NoiseSpec("wfn", 1.0, seed=1), 1000)
    assert residual_score(2 * x, x) < 1e-12
    y = generate(NoiseSpec("wfn", 1.0, seed=2), 1000)
    assert residual_score(y, x) > 3.5


def asynchronous_scenario(delay, integral, n=20_000):
    clock = ClockSpec(
        noise_floor=(NoiseSpec("wfn", 0.02, seed=1),),
        effects=(
            EffectSpec(
                "x",
                1.0,
                (NoiseSpec("wfn", 1.0, seed=2),),
                asynchrony=AsynchronySpec(delay, integral),
            ),
        ),
    )
    return Scenario(clock, n, seed=0)


@pytest.mark.parametrize(("delay", "integral"), [(4, 1), (0, 3), (-2, 1), (3, 4)])
def test_compensate_recovers_asynchrony(delay, integral):
    sim = simulate(asynchronous_scenario(delay, integral))
    result = compensate(sim.y, sim.x["x"], range(-5, 6), range(1, 6), noise_kind="wfn")
    assert (result.delay, result.integral) == (delay, integral)
    assert len(result.scores) == 55
    assert result.curve.provenance == {"delay": delay, "integral": integral}
    np.testing.assert_allclose(result.curve.k[0], 1.0, rtol=0.05)


def test_compensate_synchronous_pair():
    x = generate(NoiseSpec("wfn", 1.0, seed=1), 5000)
    result = compensate(2 * x, x, [3, -1, 0, 1], [1], noise_kind="wfn")
    assert (result.delay, result.integral) == (0, 1)


def test_compensate_degenerate():
    y = generate(NoiseSpec("wfn", 1.0, seed=1), 500)
    with pytest.raises(CompensationError) as e:
        compensate(y, np.zeros(500), [0, 1], [1, 2])
    assert e.value.category == "compensation-failed"
    assert e.value.diagnostics


def test_compensation_config_to_toml():
    config = CompensationConfig(input_file="data.csv", y="y", x="xI")
    text = config.to_toml()
    assert "probes = [1, 2, 4, 8]" in text
    assert "dmin" not in text


@pytest.mark.parametrize(
    ("spec", "start"), [(AsynchronySpec(10, 1), 10.0), (AsynchronySpec(0, 8), 2.0)]
)
def test_theory_curve_approaches_sensitivity(spec, start):
    tau = np.geomspace(start, 1e6 * start, 200)
    gap = np.abs(theory_curve(tau, spec, 0.11) - 0.11)
    assert (np.diff(gap) < 0).all()
    assert gap[-1] < 1e-6
