import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecoh.cwt import MorletParams, coi_periods, cwt, cwt_array, make_scale_grid, power
from wavecoh.errors import ConfigurationError, DimensionError, EmptyGridError


def direct_cwt(x, scales, omega0=6.0):
    """Riemann-sum discretisation of W(u, s) = int x(t) s^-1/2 conj(psi((t-u)/s)) dt, dt = 1."""
    x = np.asarray(x, float) - np.mean(x)
    t = np.arange(len(x))
    out = np.empty((len(scales), len(x)), complex)
    for j, s in enumerate(scales):
        for u in range(len(x)):
            arg = (t - u) / s
            psi = math.pi ** -0.25 * np.exp(1j * omega0 * arg - arg ** 2 / 2)
            out[j, u] = np.sum(x * np.conj(psi)) / math.sqrt(s)
    return out


def test_fourier_factor():
    assert MorletParams().fourier_factor == pytest.approx(1.033044, abs=1e-6)
    assert MorletParams(6).fourier_factor == pytest.approx(4 * math.pi / (6 + math.sqrt(38)))


def test_omega0_admissibility_bound():
    with pytest.raises(ConfigurationError):
        MorletParams(4.0)


@pytest.mark.parametrize("n", [16, 37, 64])
def test_matches_direct_discretisation(rng, n):
    x = rng.standard_normal(n)
    grid = make_scale_grid(1.0, n, dj=1 / 8)
    w = cwt(x, grid).coefficients
    ref = direct_cwt(x, grid.scales)
    inside = grid.interior()
    rel = np.abs(w - ref)[inside] / np.abs(ref)[inside]
    assert rel.max() <= 1e-6


def test_monthly_grid_spans_2_to_512_months():
    g = make_scale_grid(1.0, 1637, s0=2, dj=1 / 12, max_period=512)
    assert g.periods[0] == pytest.approx(2.066, abs=1e-3)
    assert g.periods[-1] <= 512
    assert g.periods[-1] * 2 ** (1 / 12) > 512
    assert np.all(np.diff(g.scales) > 0)


def test_doubling_dj_halves_J():
    a = make_scale_grid(1.0, 1637, dj=1 / 12, max_period=512)
    b = make_scale_grid(1.0, 1637, dj=1 / 6, max_period=512)
    assert abs(b.J - a.J / 2) <= 1


def test_annual_grid_bounded_by_64_years():
    g = make_scale_grid(1.0, 134, max_period=64)
    ff = MorletParams().fourier_factor
    # Enumerate s_j until the period passes the bound.
    j = 0
    while ff * 2 * 2 ** ((j + 1) / 12) <= 64:
        j += 1
    assert g.J == j + 1
    assert g.periods[-1] <= 64


def test_grid_errors():
    with pytest.raises(EmptyGridError):
        make_scale_grid(1.0, 100, s0=2, max_period=1.5)
    with pytest.raises(ConfigurationError):
        make_scale_grid(1.0, 100, s0=1.5)
    with pytest.raises(ConfigurationError):
        make_scale_grid(1.0, 5)


def test_coi_symmetric_and_e_folding():
    n = 101
    coi = coi_periods(n)
    assert np.array_equal(coi, coi[::-1])
    ff = MorletParams().fourier_factor
    assert coi[0] == pytest.approx(ff / math.sqrt(2) * 0.5)
    assert coi[50] == pytest.approx(ff / math.sqrt(2) * 50.5)
    g = make_scale_grid(1.0, 64)
    assert np.array_equal(g.coi, g.coi[::-1])


@pytest.mark.parametrize("period", [12.0, 30.0, 64.0])
def test_tone_localises_at_its_period(period):
    n = 512
    x = np.cos(2 * np.pi * np.arange(n) / period)
    grid = make_scale_grid(1.0, n, dj=1 / 12, max_period=200)
    pw = power(cwt(x, grid))
    inside = grid.interior()
    cols = np.flatnonzero(inside[np.argmin(abs(grid.periods - period))])
    best = np.argmax(pw[:, cols], axis=0)
    target = np.log2(period / grid.periods[0]) / grid.dj
    assert np.all(np.abs(best - target) <= 1)


def test_zero_series_gives_zero():
    grid = make_scale_grid(1.0, 32)
    assert np.all(cwt(np.zeros(32), grid).coefficients == 0)


def test_power_values():
    assert power(np.array([3 + 4j])) == pytest.approx([25.0])
    assert np.all(power(np.zeros((3, 4), complex)) == 0)


def test_power_peak_beats_octave_neighbours():
    n = 512
    x = np.cos(2 * np.pi * np.arange(n) / 32)
    grid = make_scale_grid(1.0, n, dj=1 / 12, max_period=128)
    pw = power(cwt(x, grid))
    j = int(np.argmin(abs(grid.periods - 32)))
    cols = np.flatnonzero(grid.interior()[j + 12])
    assert np.all(pw[j, cols] > 2 * pw[j - 12, cols])
    assert np.all(pw[j, cols] > 2 * pw[j + 12, cols])


def test_length_mismatch():
    grid = make_scale_grid(1.0, 32)
    with pytest.raises(DimensionError):
        cwt(np.zeros(33), grid)


def test_batched_transform_equals_single(rng):
    x = rng.standard_normal((3, 48))
    grid = make_scale_grid(1.0, 48)
    stacked = cwt_array(x, grid)
    for i in range(3):
        np.testing.assert_array_equal(stacked[i], cwt(x[i], grid).coefficients)


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(-1e3, 1e3), seed=st.integers(0, 2 ** 32 - 1))
def test_linearity(alpha, seed):
    x = np.random.default_rng(seed).standard_normal(40)
    grid = make_scale_grid(1.0, 40)
    a = cwt(alpha * x, grid).coefficients
    b = alpha * cwt(x, grid).coefficients
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12 * (1 + abs(alpha)))


@pytest.mark.parametrize("shift", [5, 17, 40])
def test_circular_shift_moves_interior_columns(rng, shift):
    n = 256
    x = np.zeros(n)
    x[70:180] = rng.standard_normal(110)
    grid = make_scale_grid(1.0, n, max_period=24)
    a = cwt(x, grid).coefficients
    b = cwt(np.roll(x, shift), grid).coefficients
    k = np.arange(n - shift)
    dist = np.minimum(k, n - 1 - (k + shift))
    ok = dist[None, :] >= 6 * grid.scales[:, None]
    lhs, rhs = b[:, shift:], a[:, : n - shift]
    scale = np.abs(a).max()
    assert ok.sum() > 0
    assert np.max(np.abs(lhs - rhs)[ok]) <= 1e-6 * scale
