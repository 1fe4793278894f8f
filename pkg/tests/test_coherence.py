import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecoh.coherence import (Smoother, SmoothingSpec, arrow_components, boxcar_weights,
                               coherence_arrays, smooth, wavelet_coherence, wrap_phase, xwt)
from wavecoh.cwt import cwt, cwt_array, make_scale_grid
from wavecoh.errors import ConfigurationError, DegenerateSeriesError, DimensionError
from wavecoh.ingest import ANNUAL, TimeSeries


def tone_pair(period, lag, n=512):
    t = np.arange(n)
    return np.cos(2 * np.pi * t / period), np.cos(2 * np.pi * (t - lag) / period)


def test_xwt_of_self_is_power(rng):
    grid = make_scale_grid(1.0, 64)
    w = cwt(rng.standard_normal(64), grid)
    c = xwt(w, w).coefficients
    assert np.all(c.imag == 0)
    assert np.all(c.real >= 0)
    np.testing.assert_allclose(c.real, np.abs(w.coefficients) ** 2)


def test_xwt_conjugate_symmetry(rng):
    grid = make_scale_grid(1.0, 64)
    wx, wy = cwt(rng.standard_normal(64), grid), cwt(rng.standard_normal(64), grid)
    np.testing.assert_array_equal(xwt(wx, wy).coefficients, np.conj(xwt(wy, wx).coefficients))


def test_xwt_grid_mismatch():
    a = cwt(np.arange(64.0), make_scale_grid(1.0, 64))
    b = cwt(np.arange(64.0), make_scale_grid(1.0, 64, dj=1 / 4))
    with pytest.raises(DimensionError):
        xwt(a, b)


def test_xwt_tone_pair_phase():
    x, y = tone_pair(64, 8)
    grid = make_scale_grid(1.0, 512, max_period=200)
    c = xwt(cwt(x, grid), cwt(y, grid)).coefficients
    j = int(np.argmin(abs(grid.periods - 64)))
    inside = grid.interior()[j]
    assert np.max(np.abs(np.angle(c[j, inside]) - np.pi / 4)) < 0.02


def test_boxcar_weights_are_fractional_cells():
    np.testing.assert_allclose(boxcar_weights(7.2), [0.1, 1, 1, 1, 1, 1, 1, 1, 0.1])
    assert boxcar_weights(1.0).tolist() == [1.0]
    assert boxcar_weights(7.2).sum() == pytest.approx(7.2)


def test_smooth_constant_is_unchanged():
    grid = make_scale_grid(1.0, 100)
    m = np.full((grid.J, grid.n), 2.5)
    np.testing.assert_allclose(smooth(m, grid), m, atol=1e-12)
    np.testing.assert_allclose(smooth(m * (1 - 2j), grid), m * (1 - 2j), atol=1e-12)


def test_smooth_impulse_spreads_mass():
    grid = make_scale_grid(1.0, 200, max_period=16)
    m = np.zeros((grid.J, grid.n))
    j = grid.J // 2
    m[j, 100] = 1.0
    out = smooth(m, grid)
    assert out[j, 100] < 1
    assert np.count_nonzero(out > 1e-6) > 10
    # The impulse is far from every edge, so no mass is lost or created.
    assert out.sum() == pytest.approx(1.0, rel=0.05)
    assert np.all(out >= -1e-15)


@settings(max_examples=20, deadline=None)
@given(alpha=st.floats(-1e3, 1e3), seed=st.integers(0, 2 ** 32 - 1))
def test_smooth_is_linear(alpha, seed):
    grid = make_scale_grid(1.0, 40)
    m = np.random.default_rng(seed).standard_normal((grid.J, grid.n))
    s = Smoother(grid)
    np.testing.assert_allclose(s(alpha * m), alpha * s(m), rtol=1e-9,
                               atol=1e-12 * (1 + abs(alpha)))


def test_smooth_shape_checked():
    grid = make_scale_grid(1.0, 40)
    with pytest.raises(DimensionError):
        smooth(np.zeros((grid.J, 41)), grid)


def test_spec_rejects_non_positive_widths():
    with pytest.raises(ConfigurationError):
        SmoothingSpec(scale_width=0)


@pytest.mark.parametrize("seed", range(5))
def test_self_coherence(seed):
    x = np.random.default_rng(seed).standard_normal(256)
    grid = make_scale_grid(1.0, 256)
    field = wavelet_coherence(x, x, grid)
    inside = grid.interior()
    assert field.r2[inside].min() >= 1 - 1e-9
    assert np.abs(field.phase[inside]).max() <= 1e-6


@pytest.mark.parametrize("period", [64, 128, 256])
@pytest.mark.parametrize("frac", [1 / 8, 1 / 4])
def test_phase_recovers_known_lag(period, frac):
    n = 1024 if period == 256 else 512
    x, y = tone_pair(period, frac * period, n)
    grid = make_scale_grid(1.0, n, max_period=300)
    field = wavelet_coherence(x, y, grid)
    j = int(np.argmin(abs(grid.periods - period)))
    inside = grid.interior()[j]
    assert inside.any()
    assert np.max(np.abs(field.phase[j, inside] - 2 * np.pi * frac)) <= 0.1
    # Positive phase: the first series leads, drawn pointing down.
    _, v = arrow_components(field.phase[j, inside])
    assert np.all(v < 0)


def test_arrow_directions():
    u, v = arrow_components(np.array([0.0, np.pi / 2, np.pi, -np.pi / 2]))
    np.testing.assert_allclose(u, [1, 0, -1, 0], atol=1e-15)
    np.testing.assert_allclose(v, [0, -1, 0, 1], atol=1e-15)


def test_white_noise_pair_has_low_median_coherence():
    rng = np.random.default_rng(1024)
    grid = make_scale_grid(1.0, 1024)
    smoother = Smoother(grid)
    inside = grid.interior()
    medians = []
    for _ in range(10):
        pairs = rng.standard_normal((10, 2, 1024))
        w = cwt_array(pairs, grid)
        r2, _ = coherence_arrays(w[:, 0], w[:, 1], smoother)
        medians.extend(np.median(r[inside]) for r in r2)
    assert len(medians) == 100
    assert np.median(medians) < 0.35


def test_symmetry(rng):
    x, y = rng.standard_normal((2, 200))
    grid = make_scale_grid(1.0, 200)
    a, b = wavelet_coherence(x, y, grid), wavelet_coherence(y, x, grid)
    np.testing.assert_allclose(a.r2, b.r2, atol=1e-12)
    diff = wrap_phase(np.angle(np.exp(1j * (a.phase + b.phase))))
    assert np.abs(diff).max() < 1e-9


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.01, 100) | st.floats(-100, -0.01), b=st.floats(-100, 100),
       seed=st.integers(0, 2 ** 32 - 1))
def test_affine_invariance(a, b, seed):
    x, y = np.random.default_rng(seed).standard_normal((2, 96))
    grid = make_scale_grid(1.0, 96)
    ref = wavelet_coherence(x, y, grid)
    out = wavelet_coherence(x, a * y + b, grid)
    np.testing.assert_allclose(out.r2, ref.r2, atol=1e-9)
    expected = ref.phase + (0 if a > 0 else np.pi)
    diff = np.angle(np.exp(1j * (out.phase - expected)))
    # Phase is ill-defined where the cross spectrum vanishes.
    ok = ref.r2 > 1e-6
    assert np.abs(diff[ok]).max() < 1e-6


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(16, 128))
def test_bounds(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = 0.5 * x + rng.standard_normal(n)
    grid = make_scale_grid(1.0, n)
    field = wavelet_coherence(x, y, grid)
    assert field.r2.min() >= 0 and field.r2.max() <= 1 + 1e-9
    assert field.phase.min() > -np.pi and field.phase.max() <= np.pi
    assert np.array_equal(field.arrow_mask, field.r2 > 0.5)


def test_wrap_phase():
    np.testing.assert_allclose(wrap_phase([-np.pi, np.pi, 0.5]), [np.pi, np.pi, 0.5])


def test_degenerate_and_misaligned_inputs():
    grid = make_scale_grid(1.0, 32)
    with pytest.raises(DegenerateSeriesError):
        wavelet_coherence(np.ones(32), np.arange(32.0), grid)
    with pytest.raises(DimensionError):
        wavelet_coherence(np.arange(32.0), np.arange(33.0), grid)
    a = TimeSeries(np.arange(32.0), 1900, ANNUAL, "a")
    b = TimeSeries(np.arange(32.0), 1901, ANNUAL, "b")
    with pytest.raises(DimensionError):
        wavelet_coherence(a, b, grid)


def test_field_carries_labels_and_times():
    a = TimeSeries(np.sin(np.arange(32.0)), 1900, ANNUAL, "a")
    b = TimeSeries(np.cos(np.arange(32.0)), 1900, ANNUAL, "b")
    field = wavelet_coherence(a, b, make_scale_grid(1.0, 32))
    assert field.labels == ("a", "b")
    assert field.times[0] == "1900" and len(field.times) == 32
