"""Stationarity, cointegration and Granger-causality tests."""

from .frequency import FreqGrangerBand, default_bands, granger_frequency, sur_fgls
from .granger import granger_time
from .report import FAIL_TO_REJECT, REJECT, TestReport
from .unitroot import CointegrationFit, adf_test, correct_against, engle_granger, kpss_test

__all__ = ["FreqGrangerBand", "default_bands", "granger_frequency", "sur_fgls", "granger_time",
           "FAIL_TO_REJECT", "REJECT", "TestReport", "CointegrationFit", "adf_test",
           "correct_against", "engle_granger", "kpss_test"]
