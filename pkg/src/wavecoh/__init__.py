"""Wavelet coherence with red-noise significance, plus cointegration and
Granger-causality tools for sunspot/temperature studies."""

__version__ = "0.1.0"

from .coherence import CoherenceField, SmoothingSpec, smooth, wavelet_coherence, xwt
from .cwt import MorletParams, ScaleGrid, WaveletField, cwt, make_scale_grid, power
from .ingest import SeriesFormat, TimeSeries, align, annual_mean, parse_series
from .significance import (Ar1Model, SignificanceMask, fit_ar1, significance_coherence,
                           significance_power, surrogate)

__all__ = [
    "CoherenceField", "SmoothingSpec", "smooth", "wavelet_coherence", "xwt",
    "MorletParams", "ScaleGrid", "WaveletField", "cwt", "make_scale_grid", "power",
    "SeriesFormat", "TimeSeries", "align", "annual_mean", "parse_series",
    "Ar1Model", "SignificanceMask", "fit_ar1", "significance_coherence",
    "significance_power", "surrogate",
]
