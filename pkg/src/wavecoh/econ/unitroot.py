"""ADF and KPSS stationarity tests and Engle-Granger cointegration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.adfvalues import mackinnonp

from ..errors import DegenerateSeriesError, DimensionError, SampleSizeError
from ..ingest import TimeSeries, align
from .ols import bic, lagmat, ols
from .report import FAIL_TO_REJECT, REJECT, TestReport, level_key

# MacKinnon (2010) response surfaces, constant-only case:
# crit(T) = b_inf + b1/T + b2/T**2 + b3/T**3, rows for 1%, 5%, 10%.
_TAU_C = {
    1: ((-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0)),
    2: ((-3.89644, -10.9519, -33.527, 0.0),
        (-3.33613, -6.1101, -6.823, 0.0),
        (-3.04445, -4.2412, -2.720, 0.0)),
}
_LEVELS = (0.01, 0.05, 0.10)

# Kwiatkowski et al. (1992), level stationarity.
KPSS_CRITICAL = {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739}


def mackinnon_critical(n_series: int, nobs: int) -> dict:
    out = {}
    for lvl, (b0, b1, b2, b3) in zip(_LEVELS, _TAU_C[n_series]):
        out[level_key(lvl)] = b0 + b1 / nobs + b2 / nobs ** 2 + b3 / nobs ** 3
    return out


def _values(x):
    return np.asarray(getattr(x, "values", x), dtype=float)


def schwert_maxlag(n: int) -> int:
    return int(np.floor(12 * (n / 100) ** 0.25))


def _adf_regression(y: np.ndarray, lags: int, start: int, constant: bool):
    dy = np.diff(y)
    # dy[t-1] = y[t] - y[t-1]; regress dy_t for t = start .. n-1 in y-index.
    target = dy[start - 1:]
    cols = [y[start - 1:-1]]
    if lags:
        cols.append(lagmat(dy, lags, start - 1))
    if constant:
        cols.append(np.ones(len(target)))
    X = np.column_stack(cols)
    return X, target


def _adf_core(y: np.ndarray, max_lag: int, constant: bool):
    n = len(y)
    if n <= max_lag + 10:
        raise SampleSizeError(f"ADF needs more than max_lag + 10 = {max_lag + 10} samples")
    start = max_lag + 1
    best = None
    for k in range(max_lag + 1):
        X, target = _adf_regression(y, k, start, constant)
        _, _, ssr, _ = ols(X, target)
        crit = bic(ssr, len(target), X.shape[1])
        if best is None or crit < best[0] - 1e-12:
            best = (crit, k)
    k = best[1]
    X, target = _adf_regression(y, k, k + 1, constant)
    beta, _, ssr, cov = ols(X, target)
    if not ssr > 0:
        raise DegenerateSeriesError("ADF regression has a perfect fit")
    return beta[0] / np.sqrt(cov[0, 0]), k, len(target)


def adf_test(x, max_lag: int | None = None, level: float = 0.05) -> TestReport:
    """Augmented Dickey-Fuller test with intercept; lag order by BIC."""
    y = _values(x)
    if max_lag is None:
        max_lag = schwert_maxlag(len(y))
    if np.ptp(y) == 0:
        raise DegenerateSeriesError("series has zero variance", getattr(x, "label", None))
    stat, k, nobs = _adf_core(y, max_lag, constant=True)
    crit = mackinnon_critical(1, nobs)
    p = float(mackinnonp(stat, regression="c", N=1))
    decision = REJECT if p < level else FAIL_TO_REJECT
    return TestReport("ADF", float(stat), p, crit, k, decision, level, nobs,
                      "H0: unit root; intercept, no trend; lags by BIC")


def kpss_test(x, level: float = 0.05, lags: int | None = None) -> TestReport:
    """KPSS level-stationarity test with a Bartlett long-run variance."""
    y = _values(x)
    n = len(y)
    if n < 30:
        raise SampleSizeError(f"KPSS needs at least 30 samples, got {n}")
    if np.ptp(y) == 0:
        raise DegenerateSeriesError("series has zero variance", getattr(x, "label", None))
    if lags is None:
        lags = int(np.floor(4 * (n / 100) ** 0.25))
    e = y - y.mean()
    s = np.cumsum(e)
    lrv = e @ e
    for j in range(1, lags + 1):
        lrv += 2 * (1 - j / (lags + 1)) * (e[j:] @ e[:-j])
    lrv /= n
    stat = float(s @ s / (n ** 2 * lrv))
    levels = sorted(KPSS_CRITICAL)
    p = float(np.interp(stat, [KPSS_CRITICAL[lv] for lv in reversed(levels)],
                        list(reversed(levels))))
    crit = {level_key(lv): cv for lv, cv in sorted(KPSS_CRITICAL.items(), reverse=True)}
    if level in KPSS_CRITICAL:
        reject = stat > KPSS_CRITICAL[level]
    else:
        reject = p < level
    note = "H0: level stationarity; p-value interpolated within [0.01, 0.10]"
    return TestReport("KPSS", stat, p, crit, lags, REJECT if reject else FAIL_TO_REJECT,
                      level, n, note)


@dataclass(frozen=True, eq=False)
class CointegrationFit:
    intercept: float
    slope: float
    residuals: TimeSeries
    r_squared: float
    adf: TestReport


def engle_granger(y, x, max_lag: int | None = None, level: float = 0.05):
    """Cointegrating regression ``y = a + b x + e`` and residual-based test.

    Returns ``(CointegrationFit, TestReport)``; the residuals are the
    equilibrium deviations used as the corrected series.
    """
    if isinstance(y, TimeSeries) and isinstance(x, TimeSeries):
        if (y.start, y.end, y.step) != (x.start, x.end, x.step):
            raise DimensionError("engle_granger inputs must share a time axis; use align()")
    yv, xv = _values(y), _values(x)
    if yv.shape != xv.shape:
        raise DimensionError("engle_granger inputs differ in length")
    if np.ptp(xv) == 0:
        raise DegenerateSeriesError("regressor has zero variance", getattr(x, "label", None))
    X = np.column_stack([np.ones_like(xv), xv])
    beta, resid, ssr, _ = ols(X, yv)
    resid = resid - resid.mean()
    tss = float(((yv - yv.mean()) ** 2).sum())
    r2 = 1 - ssr / tss if tss > 0 else 1.0
    if max_lag is None:
        max_lag = schwert_maxlag(len(yv))
    if np.allclose(resid, 0, atol=1e-12 * max(1.0, np.abs(yv).max())):
        stat, k, nobs, p = -np.inf, 0, len(yv) - 1, 0.0
    else:
        stat, k, nobs = _adf_core(resid, max_lag, constant=False)
        p = float(mackinnonp(stat, regression="c", N=2))
    crit = mackinnon_critical(2, nobs)
    decision = REJECT if p < level else FAIL_TO_REJECT
    report = TestReport("Engle-Granger", float(stat), p, crit, k, decision, level, nobs,
                        "H0: no cointegration; residual ADF without intercept, lags by BIC")
    if isinstance(y, TimeSeries):
        label = f"{y.label}|{getattr(x, 'label', 'x')}-corrected"
        res_series = y.with_values(resid, label=label,
                                   meta={**y.meta, "corrected_against": getattr(x, "label", "")})
    else:
        res_series = TimeSeries(resid, 0, "annual", "residuals")
    fit = CointegrationFit(float(beta[0]), float(beta[1]), res_series, float(r2), report)
    return fit, report


def correct_against(y: TimeSeries, x: TimeSeries, max_lag: int | None = None):
    """Align ``y`` and ``x`` and return the Engle-Granger fit of ``y`` on ``x``."""
    ya, xa = align(y, x)
    return engle_granger(ya, xa, max_lag)
