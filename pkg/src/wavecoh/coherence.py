"""Cross-wavelet transform, smoothing and squared wavelet coherence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .cwt import MorletParams, ScaleGrid, WaveletField, check_variance, cwt_array, padded_length
from .errors import ConfigurationError, DimensionError
from .ingest import TimeSeries


@dataclass(frozen=True)
class SmoothingSpec:
    """Time kernel: Gaussian with sd ``time_factor * s``. Scale kernel: boxcar
    ``scale_width`` octaves wide."""

    time_factor: float = 1.0
    scale_width: float = 0.6
    arrow_threshold: float = 0.5

    def __post_init__(self):
        if self.time_factor <= 0 or self.scale_width <= 0:
            raise ConfigurationError("smoothing widths must be positive")

    def as_dict(self):
        return {"time_factor": self.time_factor, "scale_width": self.scale_width,
                "arrow_threshold": self.arrow_threshold}


def boxcar_weights(width_rows: float) -> np.ndarray:
    """Centred boxcar of fractional width, sampled by cell overlap."""
    half = width_rows / 2
    reach = int(np.floor(half + 0.5))
    d = np.arange(-reach, reach + 1)
    w = np.clip(np.minimum(d + 0.5, half) - np.maximum(d - 0.5, -half), 0, None)
    return w[w > 0]


class Smoother:
    """Precomputed smoothing operator for one grid and spec.

    Works on arrays shaped ``(..., J, N)``; real input gives real output.
    """

    def __init__(self, grid: ScaleGrid, spec: SmoothingSpec | None = None):
        self.grid = grid
        self.spec = spec or SmoothingSpec()
        n = grid.n
        sigma = self.spec.time_factor * grid.scales / grid.dt
        self.m = padded_length(n, sigma[-1])
        omega = 2 * np.pi * scipy.fft.fftfreq(self.m)
        self._gauss = np.exp(-0.5 * (sigma[:, None] * omega[None, :]) ** 2)
        self._gauss_r = self._gauss[:, : self.m // 2 + 1]
        self._box = boxcar_weights(self.spec.scale_width / grid.dj)
        ones = np.ones((grid.J, n))
        self._time_norm = self._time(ones, renorm=False)
        self._scale_norm = self._scale(ones, renorm=False)

    def _time(self, a, renorm=True):
        n = a.shape[-1]
        if np.iscomplexobj(a):
            out = scipy.fft.ifft(scipy.fft.fft(a, n=self.m, axis=-1) * self._gauss, axis=-1)
        else:
            out = scipy.fft.irfft(scipy.fft.rfft(a, n=self.m, axis=-1) * self._gauss_r,
                                  n=self.m, axis=-1)
        out = out[..., :n]
        return out / self._time_norm if renorm else out

    def _scale(self, a, renorm=True):
        k = self._box
        half = len(k) // 2
        out = np.zeros_like(a)
        J = a.shape[-2]
        for i, wgt in enumerate(k):
            off = i - half
            lo, hi = max(0, -off), min(J, J - off)
            out[..., lo:hi, :] += wgt * a[..., lo + off:hi + off, :]
        return out / self._scale_norm if renorm else out

    def __call__(self, a):
        a = np.asarray(a)
        if a.shape[-2:] != (self.grid.J, self.grid.n):
            raise DimensionError(f"expected (..., {self.grid.J}, {self.grid.n}), got {a.shape}")
        return self._scale(self._time(a))


def smooth(field_, grid: ScaleGrid, spec: SmoothingSpec | None = None) -> np.ndarray:
    return Smoother(grid, spec)(field_)


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a * conj(b)`` written out so that cross(a, a) is exactly real and
    cross(b, a) is exactly conj(cross(a, b))."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    out.real = a.real * b.real + a.imag * b.imag
    out.imag = a.imag * b.real - a.real * b.imag
    return out


def xwt(wx: WaveletField, wy: WaveletField) -> WaveletField:
    """Cross-wavelet transform ``Wx * conj(Wy)``."""
    if wx.grid != wy.grid or wx.coefficients.shape != wy.coefficients.shape:
        raise DimensionError("cross-wavelet inputs have different grids")
    if wx.times and wy.times and wx.times != wy.times:
        raise DimensionError("cross-wavelet inputs have different time axes")
    coef = cross(wx.coefficients, wy.coefficients)
    coef.setflags(write=False)
    return WaveletField(coef, wx.grid, wx.labels + wy.labels, wx.times or wy.times)


def wrap_phase(phase: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    phase = np.asarray(phase, dtype=float)
    return np.where(phase <= -np.pi, phase + 2 * np.pi, phase)


def coherence_arrays(wx: np.ndarray, wy: np.ndarray, smoother: Smoother):
    """Squared coherence and phase from raw coefficient stacks ``(..., J, N)``."""
    inv_s = 1.0 / smoother.grid.scales[:, None]
    sxy = smoother(cross(wx, wy) * inv_s)
    sxx = smoother((wx.real ** 2 + wx.imag ** 2) * inv_s)
    syy = smoother((wy.real ** 2 + wy.imag ** 2) * inv_s)
    num = sxy.real ** 2 + sxy.imag ** 2
    # FFT round-off can push either side of the Cauchy-Schwarz bound by ~1e-15.
    r2 = np.clip(num / (sxx * syy), 0.0, 1.0)
    return r2, wrap_phase(np.angle(sxy))


@dataclass(frozen=True, eq=False)
class CoherenceField:
    r2: np.ndarray
    phase: np.ndarray
    grid: ScaleGrid
    spec: SmoothingSpec = field(default_factory=SmoothingSpec)
    labels: tuple = ()
    times: tuple = ()

    @property
    def coi(self) -> np.ndarray:
        return self.grid.coi

    @property
    def arrow_mask(self) -> np.ndarray:
        return self.r2 > self.spec.arrow_threshold


def arrow_components(phase):
    """Arrow direction on a plot whose period axis grows downward.

    Returns ``(u, v)`` with ``v`` positive meaning "up" on screen: zero phase
    points right (in phase), positive phase points down (first series leads).
    """
    phase = np.asarray(phase, dtype=float)
    return np.cos(phase), -np.sin(phase)


def wavelet_coherence(x: TimeSeries, y: TimeSeries, grid: ScaleGrid,
                      spec: SmoothingSpec | None = None,
                      params: MorletParams | None = None) -> CoherenceField:
    spec = spec or SmoothingSpec()
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    if xv.shape != yv.shape:
        raise DimensionError("coherence inputs differ in length")
    if isinstance(x, TimeSeries) and isinstance(y, TimeSeries):
        if (x.start, x.step) != (y.start, y.step):
            raise DimensionError("coherence inputs are not aligned")
    check_variance(xv, getattr(x, "label", "x"))
    check_variance(yv, getattr(y, "label", "y"))
    w = cwt_array(np.stack([xv, yv]), grid, params)
    r2, phase = coherence_arrays(w[0], w[1], Smoother(grid, spec))
    labels = (getattr(x, "label", ""), getattr(y, "label", ""))
    times = tuple(x.time_labels()) if isinstance(x, TimeSeries) else ()
    return CoherenceField(r2, phase, grid, spec, labels, times)
