"""Frequency-band Granger causality in a seemingly unrelated regression system.

Each effect series gets its own equation

    y_i[t] = c_i + sum_k a_ik y_i[t-k] + sum_k b_ik x[t-k] + e_i[t],  k = 1..p,

with errors correlated across equations and estimated jointly by feasible
GLS. No causality from x at frequency w means the lag polynomial of x
vanishes there, i.e. ``sum_k b_ik cos(k w) = 0`` and ``sum_k b_ik sin(k w) = 0``
for every equation. The band statistic is the Wald statistic for these
restrictions, divided by the sample size and averaged over a frequency grid
inside the band. Critical values come from a residual bootstrap of the
system with all x lags removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from ..errors import ConditioningError, ConfigurationError, DimensionError, SampleSizeError
from .ols import lagmat

N_FREQ = 64


@dataclass(frozen=True)
class FreqGrangerBand:
    """Band ``(low, high]`` in radians per sample and, once tested, its result."""

    low: float
    high: float
    statistic: float = math.nan
    critical_value_90: float = math.nan
    p: int = 0
    n_bootstrap: int = 0
    seed: int = 0
    bootstrap_pvalue: float = math.nan
    label: str = ""

    def __post_init__(self):
        if not 0 <= self.low < self.high <= math.pi + 1e-12:
            raise ConfigurationError(f"invalid band ({self.low}, {self.high}]")

    @classmethod
    def from_periods(cls, long_period: float | None, short_period: float | None, label=""):
        """Band of periods between ``short_period`` and ``long_period`` samples."""
        low = 0.0 if long_period is None else 2 * math.pi / long_period
        high = math.pi if short_period is None else 2 * math.pi / short_period
        return cls(low, high, label=label)

    @property
    def causal(self) -> bool:
        return self.statistic > self.critical_value_90

    @property
    def frequencies(self) -> np.ndarray:
        width = self.high - self.low
        return self.low + (np.arange(N_FREQ) + 0.5) * width / N_FREQ

    def as_dict(self):
        return {"label": self.label, "low": self.low, "high": self.high,
                "statistic": self.statistic, "critical_value_90": self.critical_value_90,
                "p": self.p, "n_bootstrap": self.n_bootstrap, "seed": self.seed,
                "bootstrap_pvalue": self.bootstrap_pvalue, "causal": bool(self.causal)}


def default_bands(boundary_period: float = 16.0):
    """Periods above and below ``boundary_period`` samples."""
    return [FreqGrangerBand.from_periods(None, boundary_period, f"above {boundary_period:g}"),
            FreqGrangerBand.from_periods(boundary_period, None, f"below {boundary_period:g}")]


@dataclass
class SurFit:
    beta: list          # per-equation coefficient vectors
    cov: np.ndarray     # joint covariance of the stacked coefficients
    sigma: np.ndarray   # cross-equation error covariance
    resid: np.ndarray   # (T, m)
    nobs: int
    sizes: list = field(default_factory=list)


def sur_fgls(Xs: list[np.ndarray], Y: np.ndarray) -> SurFit:
    """Two-step feasible GLS for equations ``Y[:, i] = Xs[i] @ beta_i + e_i``."""
    T, m = Y.shape
    resid0 = np.empty_like(Y)
    for i, X in enumerate(Xs):
        b, *_ = np.linalg.lstsq(X, Y[:, i], rcond=None)
        resid0[:, i] = Y[:, i] - X @ b
    sigma = resid0.T @ resid0 / T
    if np.linalg.cond(sigma) > 1e12:
        raise ConditioningError("cross-equation error covariance is singular")
    sinv = np.linalg.inv(sigma)
    sizes = [X.shape[1] for X in Xs]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    K = offs[-1]
    A = np.empty((K, K))
    rhs = np.zeros(K)
    for i, Xi in enumerate(Xs):
        for j, Xj in enumerate(Xs):
            A[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = sinv[i, j] * (Xi.T @ Xj)
        rhs[offs[i]:offs[i + 1]] = Xi.T @ (Y @ sinv[:, i])
    if np.linalg.cond(A) > 1e14:
        raise ConditioningError("SUR normal equations are singular")
    cov = np.linalg.inv(A)
    beta_all = cov @ rhs
    beta = [beta_all[offs[i]:offs[i + 1]] for i in range(m)]
    resid = np.column_stack([Y[:, i] - Xs[i] @ beta[i] for i in range(m)])
    return SurFit(beta, cov, sigma, resid, T, sizes)


def _system(x: np.ndarray, Y: np.ndarray, p: int, with_x: bool = True):
    n = len(x)
    Xs = []
    for i in range(Y.shape[1]):
        cols = [np.ones(n - p), lagmat(Y[:, i], p, p)]
        if with_x:
            cols.append(lagmat(x, p, p))
        Xs.append(np.column_stack(cols))
    return Xs, Y[p:]


def restriction_rows(p: int, omegas: np.ndarray) -> np.ndarray:
    """(F, 2, p) cosine and sine rows of the no-causality restriction."""
    k = np.arange(1, p + 1)
    arg = omegas[:, None] * k[None, :]
    return np.stack([np.cos(arg), np.sin(arg)], axis=1)


def band_statistics(fit: SurFit, p: int, bands) -> np.ndarray:
    """Band-averaged Wald statistic divided by the sample size, one per band."""
    m = len(fit.beta)
    # Positions of the x-lag coefficients inside the stacked coefficient vector.
    offs = np.concatenate([[0], np.cumsum(fit.sizes)])
    pos = np.concatenate([offs[i] + 1 + p + np.arange(p) for i in range(m)])
    b = np.concatenate([fit.beta[i][1 + p:] for i in range(m)])
    V = fit.cov[np.ix_(pos, pos)]
    out = []
    for band in bands:
        omegas = band.frequencies
        rows = restriction_rows(p, omegas)              # (F, 2, p)
        # At w = pi the sine row vanishes; drop it to keep R full rank.
        keep_sin = np.abs(np.sin(omegas)) > 1e-8
        R = np.zeros((len(omegas), 2 * m, m * p))
        for i in range(m):
            R[:, 2 * i:2 * i + 2, i * p:(i + 1) * p] = rows
        rb = R @ b                                      # (F, 2m)
        RVR = R @ V @ np.swapaxes(R, 1, 2)              # (F, 2m, 2m)
        wald = np.empty(len(omegas))
        for f in range(len(omegas)):
            idx = np.arange(2 * m) if keep_sin[f] else np.arange(0, 2 * m, 2)
            sub = RVR[f][np.ix_(idx, idx)]
            wald[f] = rb[f, idx] @ np.linalg.solve(sub, rb[f, idx])
        out.append(float(wald.mean() / fit.nobs))
    return np.array(out)


def _bootstrap_paths(x, Y, p, n_bootstrap, seed):
    """Simulate effect series under no causality by resampling restricted residuals."""
    Xs, Yt = _system(x, Y, p, with_x=False)
    fit = sur_fgls(Xs, Yt)
    T, m = Yt.shape
    resid = fit.resid - fit.resid.mean(axis=0)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    draws = rng.integers(0, T, size=(n_bootstrap, T))
    paths = np.empty((n_bootstrap, len(x), m))
    for i in range(m):
        c, a = fit.beta[i][0], fit.beta[i][1:]
        den = np.concatenate([[1.0], -a])
        init = Y[:p, i]
        zi = scipy.signal.lfiltic([1.0], den, y=init[::-1])
        e = resid[draws, i] + c
        out, _ = scipy.signal.lfilter([1.0], den, e, axis=-1,
                                      zi=np.broadcast_to(zi, (n_bootstrap, len(zi))).copy())
        paths[:, :p, i] = init
        paths[:, p:, i] = out
    return paths


def granger_frequency(x, ys, p: int = 11, bands=None, n_bootstrap: int = 1000,
                      seed: int = 0, level: float = 0.10) -> list[FreqGrangerBand]:
    """Test causality from ``x`` to every series in ``ys`` jointly, per band."""
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    if not isinstance(ys, (list, tuple)):
        ys = [ys]
    Y = np.column_stack([np.asarray(getattr(y, "values", y), dtype=float) for y in ys])
    if Y.shape[0] != len(xv):
        raise DimensionError("granger_frequency inputs differ in length")
    n, m = Y.shape
    nparams = 1 + 2 * p
    if p < 1 or n <= 3 * p or n - p <= nparams + m:
        raise SampleSizeError(f"lag order p={p} too large for {n} observations")
    if n_bootstrap < 1:
        raise ConfigurationError("n_bootstrap must be positive")
    bands = list(bands) if bands is not None else default_bands()
    Xs, Yt = _system(xv, Y, p)
    observed = band_statistics(sur_fgls(Xs, Yt), p, bands)
    paths = _bootstrap_paths(xv, Y, p, n_bootstrap, seed)
    boot = np.empty((n_bootstrap, len(bands)))
    for r in range(n_bootstrap):
        Xs_b, Yt_b = _system(xv, paths[r], p)
        boot[r] = band_statistics(sur_fgls(Xs_b, Yt_b), p, bands)
    crit = np.quantile(boot, 1 - level, axis=0)
    pvals = (1 + (boot >= observed).sum(axis=0)) / (n_bootstrap + 1)
    return [FreqGrangerBand(b.low, b.high, float(s), float(c), p, n_bootstrap, seed,
                            float(pv), b.label)
            for b, s, c, pv in zip(bands, observed, crit, pvals)]
