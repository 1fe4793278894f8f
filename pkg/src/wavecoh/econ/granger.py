"""Time-domain Granger causality with BIC lag selection."""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..errors import DimensionError, SampleSizeError
from .ols import bic, lagmat, ols
from .report import FAIL_TO_REJECT, REJECT, TestReport


def _design(y, x, p, start):
    cols = [np.ones(len(y) - start), lagmat(y, p, start), lagmat(x, p, start)]
    return np.column_stack(cols), y[start:]


def select_lag(y: np.ndarray, x: np.ndarray, max_lag: int) -> int:
    """BIC-minimising lag order of the regression of y on its own and x's lags."""
    best = None
    for p in range(1, max_lag + 1):
        X, target = _design(y, x, p, max_lag)
        _, _, ssr, _ = ols(X, target)
        crit = bic(ssr, len(target), X.shape[1])
        if best is None or crit < best[0] - 1e-12:
            best = (crit, p)
    return best[1]


def granger_time(x, y, max_lag: int = 8, level: float = 0.05, lags: int | None = None) -> TestReport:
    """F test that lags of ``x`` (cause) add nothing to the prediction of ``y``."""
    xv = np.asarray(getattr(x, "values", x), dtype=float)
    yv = np.asarray(getattr(y, "values", y), dtype=float)
    if xv.shape != yv.shape:
        raise DimensionError("granger_time inputs differ in length")
    n = len(yv)
    if max_lag < 1 or n <= 3 * max_lag:
        raise SampleSizeError(f"max_lag={max_lag} too large for {n} observations")
    p = lags if lags is not None else select_lag(yv, xv, max_lag)
    X, target = _design(yv, xv, p, p)
    _, _, ssr_u, _ = ols(X, target)
    _, _, ssr_r, _ = ols(X[:, : 1 + p], target)
    dof = len(target) - X.shape[1]
    f = ((ssr_r - ssr_u) / p) / (ssr_u / dof)
    pval = float(stats.f.sf(f, p, dof))
    crit = {f"{100 * lv:g}%": float(stats.f.isf(lv, p, dof)) for lv in (0.01, 0.05, 0.10)}
    decision = REJECT if pval < level else FAIL_TO_REJECT
    return TestReport("Granger", float(f), pval, crit, p, decision, level, len(target),
                      f"H0: no Granger causality; F({p}, {dof}); lags by BIC")
