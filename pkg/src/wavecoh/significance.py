"""Monte Carlo significance of wavelet power and coherence against AR(1) red noise.

Every surrogate draws from its own Philox stream keyed by ``(seed, stream, index)``,
so results do not depend on batch size, and the per-cell quantile is an
order-statistic fold that gives the same answer however the surrogates are
grouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from .coherence import Smoother, SmoothingSpec, coherence_arrays
from .cwt import MorletParams, ScaleGrid, WaveletField, check_variance, cwt_array, power
from .errors import ConfigurationError, DegenerateSeriesError, SampleSizeError
from .ingest import ANNUAL, TimeSeries

GENERATOR = "Philox"
MIN_SURROGATES = 100
BATCH = 16

_STREAM_POWER = 0
_STREAM_X = 1
_STREAM_Y = 2


@dataclass(frozen=True)
class Ar1Model:
    phi: float
    sigma: float
    mean: float = 0.0

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ConfigurationError(f"AR(1) coefficient {self.phi} is not stationary")
        if not self.sigma > 0:
            raise ConfigurationError("AR(1) innovation sd must be positive")

    def as_dict(self):
        return {"phi": self.phi, "sigma": self.sigma, "mean": self.mean}


@dataclass(frozen=True, eq=False)
class SignificanceMask:
    mask: np.ndarray
    quantile: np.ndarray
    level: float
    n_surrogates: int
    seed: int
    models: dict = field(default_factory=dict)
    generator: str = GENERATOR

    def metadata(self) -> dict:
        return {"level": self.level, "n_surrogates": self.n_surrogates, "seed": self.seed,
                "generator": self.generator,
                "ar1": {k: m.as_dict() for k, m in self.models.items()}}


def fit_ar1(x) -> Ar1Model:
    """Lag-1 autocorrelation fit; sigma from the stationary variance relation."""
    values = np.asarray(getattr(x, "values", x), dtype=float)
    label = getattr(x, "label", "")
    if len(values) < 10:
        raise SampleSizeError(f"AR(1) fit needs at least 10 samples, got {len(values)}")
    mean = float(values.mean())
    d = values - mean
    var = float(np.dot(d, d) / len(d))
    if not var > 0 or np.ptp(values) == 0:
        raise DegenerateSeriesError("series has zero variance", label=label)
    phi = float(np.dot(d[:-1], d[1:]) / np.dot(d, d))
    return Ar1Model(phi, math.sqrt(var * (1 - phi ** 2)), mean)


def _rng(seed: int, stream: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(ss))


def burn_in(phi: float) -> int:
    return int(math.ceil(100 / (1 - abs(phi))))


def _simulate(model: Ar1Model, n: int, rng: np.random.Generator) -> np.ndarray:
    burn = burn_in(model.phi)
    e = rng.standard_normal(n + burn) * model.sigma
    e[0] /= math.sqrt(1 - model.phi ** 2)
    x = scipy.signal.lfilter([1.0], [1.0, -model.phi], e)
    return x[burn:] + model.mean


def surrogate_matrix(model: Ar1Model, n: int, seed: int, indices, stream: int = _STREAM_POWER):
    return np.stack([_simulate(model, n, _rng(seed, stream, int(i))) for i in indices])


def surrogate(model: Ar1Model, n: int, seed: int, like: TimeSeries | None = None) -> TimeSeries:
    """One AR(1) realisation of length ``n``; identical for identical seeds."""
    if n < 2:
        raise SampleSizeError("surrogate length must be at least 2")
    values = _simulate(model, n, _rng(seed, _STREAM_POWER, 0))
    if like is not None and len(like) == n:
        return TimeSeries(values, like.start, like.step, f"surrogate({like.label})")
    return TimeSeries(values, 0, ANNUAL, "surrogate")


class QuantileFold:
    """Exact per-cell linear-interpolation quantile over a stream of batches.

    Keeps only the largest ``k`` values per cell, where ``k`` covers the two
    order statistics the interpolation needs.
    """

    def __init__(self, n_total: int, q: float):
        self.n_total = n_total
        self.q = q
        self.h = (n_total - 1) * q
        self.lo = int(math.floor(self.h))
        self.k = n_total - self.lo
        self.top = None
        self.seen = 0

    def add(self, batch: np.ndarray):
        batch = np.asarray(batch, dtype=float)
        self.seen += batch.shape[0]
        pool = batch if self.top is None else np.concatenate([self.top, batch], axis=0)
        if pool.shape[0] > self.k:
            pool = np.partition(pool, pool.shape[0] - self.k, axis=0)[-self.k:]
        self.top = pool

    def result(self) -> np.ndarray:
        if self.seen != self.n_total:
            raise ConfigurationError(f"fold saw {self.seen} of {self.n_total} surrogates")
        top = np.sort(self.top, axis=0)
        a = top[0]
        b = top[1] if self.k > 1 else top[0]
        t = self.h - self.lo
        return a + (b - a) * t


def _check(n_surrogates: int, level: float):
    if n_surrogates < MIN_SURROGATES:
        raise ConfigurationError(f"need at least {MIN_SURROGATES} surrogates, got {n_surrogates}")
    if not 0 < level < 1:
        raise ConfigurationError(f"significance level {level} outside (0, 1)")


def significance_power(w: WaveletField, model: Ar1Model, n_surrogates: int = 300,
                       level: float = 0.05, seed: int = 0,
                       params: MorletParams | None = None) -> SignificanceMask:
    _check(n_surrogates, level)
    grid = w.grid
    observed = power(w)
    fold = QuantileFold(n_surrogates, 1 - level)
    for start in range(0, n_surrogates, BATCH):
        idx = range(start, min(start + BATCH, n_surrogates))
        sims = surrogate_matrix(model, grid.n, seed, idx, _STREAM_POWER)
        fold.add(power(cwt_array(sims, grid, params)))
    quant = fold.result()
    label = w.labels[0] if w.labels else "x"
    return SignificanceMask(observed > quant, quant, level, n_surrogates, seed,
                            {label or "x": model})


def coherence_null(model_x: Ar1Model, model_y: Ar1Model, grid: ScaleGrid,
                   spec: SmoothingSpec | None = None, n_surrogates: int = 300,
                   level: float = 0.05, seed: int = 0,
                   params: MorletParams | None = None) -> np.ndarray:
    """Per-cell (1 - level) quantile of squared coherence between independent surrogates."""
    _check(n_surrogates, level)
    smoother = Smoother(grid, spec)
    fold = QuantileFold(n_surrogates, 1 - level)
    for start in range(0, n_surrogates, BATCH):
        idx = range(start, min(start + BATCH, n_surrogates))
        xs = surrogate_matrix(model_x, grid.n, seed, idx, _STREAM_X)
        ys = surrogate_matrix(model_y, grid.n, seed, idx, _STREAM_Y)
        w = cwt_array(np.stack([xs, ys], axis=1), grid, params)
        r2, _ = coherence_arrays(w[:, 0], w[:, 1], smoother)
        fold.add(r2)
    return fold.result()


def significance_coherence(x, y, grid: ScaleGrid, spec: SmoothingSpec | None = None,
                           n_surrogates: int = 300, level: float = 0.05, seed: int = 0,
                           observed_r2: np.ndarray | None = None,
                           params: MorletParams | None = None) -> SignificanceMask:
    """Pointwise significance of squared coherence; AR(1) fitted to each input."""
    _check(n_surrogates, level)
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    check_variance(xv, getattr(x, "label", "x"))
    check_variance(yv, getattr(y, "label", "y"))
    mx, my = fit_ar1(x), fit_ar1(y)
    if observed_r2 is None:
        w = cwt_array(np.stack([xv, yv]), grid, params)
        observed_r2, _ = coherence_arrays(w[0], w[1], Smoother(grid, spec))
    quant = coherence_null(mx, my, grid, spec, n_surrogates, level, seed, params)
    lx = getattr(x, "label", "") or "x"
    ly = getattr(y, "label", "") or "y"
    if ly == lx:
        ly = ly + "'"
    return SignificanceMask(observed_r2 > quant, quant, level, n_surrogates, seed,
                            {lx: mx, ly: my})
