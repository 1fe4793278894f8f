"""Small least-squares helpers shared by the tests."""

from __future__ import annotations

import numpy as np


def lagmat(v: np.ndarray, lags: int, start: int) -> np.ndarray:
    """Columns ``v[t-1], ..., v[t-lags]`` for ``t = start .. len(v)-1``."""
    n = len(v)
    return np.column_stack([v[start - k:n - k] for k in range(1, lags + 1)]) if lags else \
        np.empty((n - start, 0))


def ols(X: np.ndarray, y: np.ndarray):
    """Return ``(beta, resid, ssr, cov)`` with the usual unbiased variance."""
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    dof = max(X.shape[0] - X.shape[1], 1)
    cov = ssr / dof * np.linalg.pinv(X.T @ X)
    return beta, resid, ssr, cov


def bic(ssr: float, nobs: int, nparams: int) -> float:
    return nobs * np.log(ssr / nobs) + nparams * np.log(nobs)
