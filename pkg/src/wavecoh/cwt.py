"""Morlet continuous wavelet transform.

Convolutions are done in the frequency domain. The Morlet transfer
function used for each scale is the exact discrete-time Fourier transform of
the sampled wavelet (the continuous transform plus its aliases), so the
result equals the direct sum ``sqrt(dt/s) * sum_m x_m conj(psi((m - k) dt / s))``
up to wrap-around, and the zero padding is long enough to make wrap-around
negligible.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ConfigurationError, DegenerateSeriesError, DimensionError, EmptyGridError
from .ingest import TimeSeries

# Zero padding covers this many e-folds (in units of the largest scale) of the
# Gaussian envelope beyond the data, so circular wrap-around stays below ~1e-9.
PAD_ENVELOPES = 6.5


@dataclass(frozen=True)
class MorletParams:
    omega0: float = 6.0

    def __post_init__(self):
        if self.omega0 < 5:
            raise ConfigurationError(f"omega0 must be >= 5, got {self.omega0}")

    @property
    def fourier_factor(self) -> float:
        return 4 * math.pi / (self.omega0 + math.sqrt(2 + self.omega0 ** 2))

    def psi(self, t):
        """Mother wavelet in the time domain (no admissibility correction)."""
        t = np.asarray(t, dtype=float)
        return np.pi ** -0.25 * np.exp(1j * self.omega0 * t) * np.exp(-t ** 2 / 2)

    def psi_hat(self, omega):
        """Continuous Fourier transform of :meth:`psi`, ``int psi(t) e^{-i w t} dt``."""
        omega = np.asarray(omega, dtype=float)
        return np.pi ** -0.25 * np.sqrt(2 * np.pi) * np.exp(-(omega - self.omega0) ** 2 / 2)


@dataclass(frozen=True, eq=False)
class ScaleGrid:
    s0: float
    dj: float
    J: int
    dt: float = 1.0
    n: int = 0
    omega0: float = 6.0

    @property
    def scales(self) -> np.ndarray:
        return self.s0 * 2.0 ** (np.arange(self.J) * self.dj)

    @property
    def fourier_factor(self) -> float:
        return MorletParams(self.omega0).fourier_factor

    @property
    def periods(self) -> np.ndarray:
        return self.fourier_factor * self.scales

    @property
    def coi(self) -> np.ndarray:
        """Cone-of-influence boundary per column, in period units.

        Uses the Morlet e-folding time sqrt(2)*s: the period at which the
        distance to the nearest edge equals one e-folding time.
        """
        return coi_periods(self.n, self.dt, self.omega0)

    def interior(self) -> np.ndarray:
        """Boolean (J, N) mask of cells inside the cone of influence."""
        return self.periods[:, None] <= self.coi[None, :]

    def as_dict(self) -> dict:
        return {"s0": self.s0, "dj": self.dj, "J": self.J, "dt": self.dt,
                "n": self.n, "omega0": self.omega0}

    def __eq__(self, other):
        if not isinstance(other, ScaleGrid):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    __hash__ = None


def coi_periods(n: int, dt: float = 1.0, omega0: float = 6.0) -> np.ndarray:
    k = np.arange(n, dtype=float)
    dist = np.minimum(k + 0.5, n - k - 0.5) * dt
    return MorletParams(omega0).fourier_factor / math.sqrt(2) * dist


def make_scale_grid(dt: float, n: int, s0: float | None = None, dj: float = 1 / 12,
                    max_period: float | None = None, omega0: float = 6.0) -> ScaleGrid:
    """Dyadic scale grid ``s_j = s0 * 2**(j*dj)`` whose periods stay <= ``max_period``."""
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    if n < 8:
        raise ConfigurationError(f"series length {n} < 8")
    if dj <= 0:
        raise ConfigurationError("dj must be positive")
    if s0 is None:
        s0 = 2 * dt
    if s0 < 2 * dt * (1 - 1e-12):
        raise ConfigurationError(f"s0={s0} is below 2*dt={2 * dt}")
    ff = MorletParams(omega0).fourier_factor
    if max_period is None:
        max_period = n * dt
    if max_period < ff * s0:
        raise EmptyGridError(
            f"max_period {max_period} is below the smallest period {ff * s0:.6g}")
    J = int(math.floor(math.log2(max_period / (ff * s0)) / dj + 1e-9)) + 1
    return ScaleGrid(float(s0), float(dj), J, float(dt), int(n), float(omega0))


def padded_length(n: int, max_scale: float, dt: float = 1.0) -> int:
    need = n + int(math.ceil(PAD_ENVELOPES * max_scale / dt))
    return 1 << (need - 1).bit_length()


def transfer_functions(grid: ScaleGrid, m: int, params: MorletParams | None = None) -> np.ndarray:
    """Per-scale frequency response on an ``m``-point FFT grid, shape (J, m).

    Unit energy per scale: ``sqrt(s/dt) * psi_hat(s*w)`` is the transform of
    the sampled wavelet weighted by ``sqrt(dt/s)``. The returned array is
    cached and read-only.
    """
    omega0 = grid.omega0 if params is None else params.omega0
    return _transfer(grid.s0, grid.dj, grid.J, grid.dt, m, omega0)


@functools.lru_cache(maxsize=32)
def _transfer(s0, dj, J, dt, m, omega0):
    params = MorletParams(omega0)
    omega = 2 * np.pi * scipy.fft.fftfreq(m, dt)
    s = (s0 * 2.0 ** (np.arange(J) * dj))[:, None]
    resp = np.zeros((J, m))
    # Alias images beyond |q| = 2 are below exp(-150) for s >= 2 dt.
    for q in range(-2, 3):
        resp += params.psi_hat(s * (omega[None, :] + 2 * np.pi * q / dt))
    resp *= np.sqrt(s / dt)
    resp.setflags(write=False)
    return resp


@dataclass(frozen=True, eq=False)
class WaveletField:
    coefficients: np.ndarray
    grid: ScaleGrid
    labels: tuple = ()
    times: tuple = ()

    @property
    def coi(self) -> np.ndarray:
        return self.grid.coi

    @property
    def shape(self):
        return self.coefficients.shape


def _prepare(x) -> tuple[np.ndarray, str, tuple]:
    if isinstance(x, TimeSeries):
        return np.asarray(x.values, dtype=float), x.label, tuple(x.time_labels())
    return np.asarray(x, dtype=float), "", ()


def cwt_array(values: np.ndarray, grid: ScaleGrid, params: MorletParams | None = None,
              m: int | None = None) -> np.ndarray:
    """Transform one series or a stack of series along the last axis.

    Returns complex coefficients shaped ``values.shape[:-1] + (J, N)``.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if n != grid.n:
        raise DimensionError(f"grid built for n={grid.n}, series has n={n}")
    m = m or padded_length(n, grid.scales[-1], grid.dt)
    centred = values - values.mean(axis=-1, keepdims=True)
    spectrum = scipy.fft.fft(centred, n=m, axis=-1)
    resp = transfer_functions(grid, m, params)
    out = scipy.fft.ifft(spectrum[..., None, :] * resp, axis=-1)
    return out[..., :n]


def cwt(x, grid: ScaleGrid, params: MorletParams | None = None) -> WaveletField:
    values, label, times = _prepare(x)
    if values.ndim != 1:
        raise DimensionError("cwt expects a single series")
    if len(values) < 8:
        raise ConfigurationError(f"series length {len(values)} < 8")
    params = params or MorletParams(grid.omega0)
    if params.omega0 != grid.omega0:
        raise ConfigurationError("grid and Morlet parameters disagree on omega0")
    coef = cwt_array(values, grid, params)
    coef.setflags(write=False)
    return WaveletField(coef, grid, (label,), times)


def power(w) -> np.ndarray:
    """Wavelet power |W|^2 of a field or a raw coefficient array."""
    coef = w.coefficients if isinstance(w, WaveletField) else np.asarray(w)
    return coef.real ** 2 + coef.imag ** 2


def check_variance(values, label=""):
    values = np.asarray(values, dtype=float)
    if not np.ptp(values) > 0:
        raise DegenerateSeriesError("series has zero variance", label=label)
