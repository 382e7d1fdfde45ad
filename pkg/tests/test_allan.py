import numpy as np
import pytest

from nsceval.allan import (
    TauGrid,
    TimeSeries,
    acov,
    adev2,
    allan_covariance,
    allan_variance,
    block_average,
    deviation_table,
    edf,
    overlap_acov,
    overlap_adev2,
)
from nsceval.errors import InsufficientDataError, RangeError, ShapeError


def oracle_normal(a, b, m):
    count = len(a) // m
    mean_a = [sum(a[j * m : (j + 1) * m]) / m for j in range(count)]
    mean_b = [sum(b[j * m : (j + 1) * m]) / m for j in range(count)]
    total = 0.0
    for j in range(count - 1):
        total += (mean_a[j + 1] - mean_a[j]) * (mean_b[j + 1] - mean_b[j])
    return total / (2 * (count - 1))


def oracle_overlap(a, b, m):
    m0 = len(a)
    total = 0.0
    for j in range(m0 - 2 * m + 1):
        inner_a = sum(a[i + m] - a[i] for i in range(j, j + m))
        inner_b = sum(b[i + m] - b[i] for i in range(j, j + m))
        total += inner_a * inner_b
    return total / (2 * m**2 * (m0 - 2 * m + 1))


def test_block_average():
    averaged = block_average([1, 2, 3, 4, 5, 6], 2)
    np.testing.assert_allclose(averaged.values, [1.5, 3.5, 5.5])
    assert averaged.m == 2
    assert averaged.count == 3


def test_block_average_discards_trailing_samples():
    averaged = block_average(TimeSeries([1, 2, 3, 4, 5], tau0=2.0), 2)
    np.testing.assert_allclose(averaged.values, [1.5, 3.5])
    assert averaged.tau == 4.0


@pytest.mark.parametrize("m", [0, 4])
def test_block_average_factor_out_of_range(m):
    with pytest.raises(RangeError):
        block_average([1, 2, 3, 4, 5, 6, 7], m)


def test_adev2_linear_ramp():
    assert adev2([1, 2, 3, 4, 5]) == 0.5


def test_adev2_constant_is_zero():
    assert adev2(np.full(10, 3.0)) == 0.0


def test_acov_of_series_with_itself_is_adev2():
    rng = np.random.default_rng(1)
    a = block_average(rng.normal(size=100), 5)
    assert acov(a, a) == adev2(a)


def test_acov_shape_mismatch():
    with pytest.raises(ShapeError):
        acov(block_average(np.arange(12.0), 2), block_average(np.arange(12.0), 3))


def test_overlap_linear_ramp():
    np.testing.assert_allclose(overlap_adev2([1, 2, 3, 4, 5], 2), 2.0)
    np.testing.assert_allclose(adev2(block_average([1, 2, 3, 4, 5], 2)), 2.0)


def test_overlap_alternating_series_vanishes_at_even_factor():
    assert overlap_adev2([0, 1, 0, 1, 0, 1], 2) == 0.0


def test_overlap_at_unit_factor_equals_normal():
    values = np.random.default_rng(2).normal(size=50)
    np.testing.assert_allclose(overlap_adev2(values, 1), adev2(values), rtol=1e-14)


def test_overlap_needs_enough_samples():
    with pytest.raises(InsufficientDataError):
        overlap_adev2([1, 2, 3, 4], 2)


def test_overlap_acov_length_mismatch():
    with pytest.raises(ShapeError):
        overlap_acov(np.arange(10.0), np.arange(11.0), 2)


def test_unknown_style():
    with pytest.raises(RangeError):
        allan_variance(np.arange(10.0), 1, style="total")


def test_series_validation():
    with pytest.raises(InsufficientDataError):
        TimeSeries([1.0])
    with pytest.raises(RangeError):
        TimeSeries([1.0, 2.0], tau0=0)
    with pytest.raises(ShapeError):
        TimeSeries(np.ones((3, 3)))


def test_matches_direct_summation():
    rng = np.random.default_rng(12345)
    for _ in range(1000):
        m0 = int(rng.integers(2, 13))
        a = rng.normal(size=m0)
        b = rng.normal(size=m0)
        for m in range(1, m0 // 2 + 1):
            np.testing.assert_allclose(
                allan_covariance(a, b, m, "normal"),
                oracle_normal(a, b, m),
                rtol=1e-12,
                atol=1e-15,
            )
            np.testing.assert_allclose(
                allan_variance(a, m, "normal"),
                oracle_normal(a, a, m),
                rtol=1e-12,
                atol=1e-15,
            )
        for m in range(1, (m0 - 1) // 2 + 1):
            np.testing.assert_allclose(
                allan_covariance(a, b, m, "overlap"),
                oracle_overlap(a, b, m),
                rtol=1e-12,
                atol=1e-15,
            )
            np.testing.assert_allclose(
                allan_variance(a, m, "overlap"),
                oracle_overlap(a, a, m),
                rtol=1e-12,
                atol=1e-15,
            )


def test_covariance_is_symmetric_and_bilinear():
    rng = np.random.default_rng(3)
    a, b, c = rng.normal(size=(3, 200))
    for style in ("normal", "overlap"):
        np.testing.assert_allclose(
            allan_covariance(a, b, 4, style), allan_covariance(b, a, 4, style)
        )
        np.testing.assert_allclose(
            allan_covariance(2 * a + c, b, 4, style),
            2 * allan_covariance(a, b, 4, style) + allan_covariance(c, b, 4, style),
        )


def test_variance_ignores_offset():
    values = np.random.default_rng(4).normal(size=300)
    for style in ("normal", "overlap"):
        np.testing.assert_allclose(
            allan_variance(values + 1e3, 5, style),
            allan_variance(values, 5, style),
            rtol=1e-8,
        )


def test_independent_white_covariance_is_small():
    m0 = 100_000
    for seed in range(100):
        rng = np.random.default_rng(seed)
        a = rng.normal(scale=2.0, size=m0)
        b = rng.normal(scale=3.0, size=m0)
        assert abs(allan_covariance(a, b, 1, "normal")) <= 5 * 2.0 * 3.0 / np.sqrt(m0)


def test_edf_at_unit_factor_is_sample_count():
    for kind in ("wfn", "ffn", "rwn"):
        assert edf(kind, 1, 1000) == 1000


def test_edf_without_noise_kind_is_average_count():
    assert edf(None, 10, 1000) == 100


def test_edf_random_walk_below_white():
    for m in (2, 5, 10, 50):
        assert edf("rwn", m, 1000) <= edf("wfn", m, 1000)


def test_edf_bounds():
    for kind in ("wfn", "ffn", "rwn"):
        for m in (1, 3, 30, 300, 499):
            assert 1 <= edf(kind, m, 1000) <= 1000


def test_edf_unknown_kind():
    with pytest.raises(RangeError):
        edf("pink", 2, 100)


def test_default_grid():
    assert TauGrid.default(1000).factors == (1, 2, 5, 10, 20, 50, 100, 200)
    assert TauGrid.default(1000, max_factor=30).factors == (1, 2, 5, 10, 20)


def test_grid_validation():
    with pytest.raises(RangeError):
        TauGrid((1, 5, 2))
    with pytest.raises(InsufficientDataError):
        TauGrid(())
    with pytest.raises(RangeError):
        TauGrid((1, 10)).check(15)


def test_deviation_table_constant_series():
    table = deviation_table(TimeSeries(np.full(100, 7.0), tau0=0.5))
    assert list(table.columns) == ["m", "tau", "adev_normal", "adev_overlap"]
    np.testing.assert_allclose(table["tau"], table["m"] * 0.5)
    assert (table["adev_normal"] == 0).all()
    assert (table["adev_overlap"] == 0).all()


@pytest.mark.parametrize("style", ["normal", "overlap"])
def test_covariance_bounded_by_variances(style):
    rng = np.random.default_rng(11)
    x = rng.standard_normal(5000)
    y = 0.7 * x + rng.standard_normal(5000)
    for m in (1, 3, 10, 100):
        covariance = allan_covariance(y, x, m, style)
        bound = allan_variance(x, m, style) * allan_variance(y, m, style)
        assert covariance**2 <= bound
    # equality for proportional series
    np.testing.assert_allclose(
        allan_covariance(2 * x, x, 5, style) ** 2,
        allan_variance(2 * x, 5, style) * allan_variance(x, 5, style),
    )
