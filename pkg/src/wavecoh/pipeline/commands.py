"""Study orchestration behind the CLI subcommands."""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..coherence import Smoother, SmoothingSpec, coherence_arrays
from ..cwt import MorletParams, check_variance, cwt, cwt_array, make_scale_grid, power
from ..econ import adf_test, engle_granger, granger_frequency, granger_time, kpss_test
from ..econ.frequency import default_bands
from ..errors import ConfigurationError
from ..ingest import MONTHLY, TimeSeries, align, annual_mean, parse_series, to_csv_text
from ..significance import fit_ar1, significance_coherence, significance_power
from . import render
from .config import RunConfig
from .gridio import dumps, write_atomic, write_grid

log = logging.getLogger(__name__)

SUNSPOTS = "sunspots"


def task_seed(seed: int, name: str) -> int:
    """Per-task seed so that different pairs use different surrogate streams."""
    return (int(seed) * 1_000_003 + zlib.crc32(name.encode())) % (2 ** 63)


def _grid_for(config: RunConfig, series: TimeSeries):
    max_period = config.max_period_monthly if series.step == MONTHLY else config.max_period_annual
    return make_scale_grid(series.dt, len(series), config.s0, config.dj, max_period, config.omega0)


def _spec(config: RunConfig) -> SmoothingSpec:
    return SmoothingSpec(config.time_factor, config.scale_width, config.arrow_threshold)


def _base_meta(config: RunConfig) -> dict:
    return {"config_digest": config.digest(), "wavecoh_version": __version__,
            "grid": {"s0": config.s0, "dj": config.dj, "omega0": config.omega0,
                     "max_period_monthly": config.max_period_monthly,
                     "max_period_annual": config.max_period_annual}}


def _safe(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in label)


# --------------------------------------------------------------------- inputs

@dataclass
class StudyData:
    monthly: dict = field(default_factory=dict)   # label -> monthly TimeSeries
    co2: TimeSeries | None = None


def load_inputs(config: RunConfig) -> StudyData:
    fill = None if config.fill == "none" else config.fill
    data = StudyData()
    if config.sunspots:
        data.monthly[SUNSPOTS] = parse_series(config.sunspots, config.sunspots_format,
                                              SUNSPOTS, fill)
    for label, path in config.temperatures().items():
        data.monthly[label] = parse_series(path, config.temp_format, label, fill)
    for path in config.inputs:
        path, _, fmt = str(path).partition("::")
        series = parse_series(path, fmt or config.input_format, None, fill)
        data.monthly[series.label] = series
    if config.co2:
        data.co2 = parse_series(config.co2, config.co2_format, "co2", fill)
    return data


def _pairs(data: StudyData) -> list[tuple[str, str]]:
    labels = list(data.monthly)
    if not labels:
        return []
    first = SUNSPOTS if SUNSPOTS in data.monthly else labels[0]
    return [(first, other) for other in labels if other != first]


# ---------------------------------------------------------------------- power

def run_power(config: RunConfig, series: TimeSeries, out: Path, tag: str = "") -> dict:
    check_variance(series.values, series.label)
    grid = _grid_for(config, series)
    field_ = cwt(series, grid, MorletParams(config.omega0))
    model = fit_ar1(series)
    seed = task_seed(config.seed, f"power/{tag}{series.label}")
    sig = significance_power(field_, model, config.n_surrogates, config.level, seed)
    pw = power(field_)
    meta = {**_base_meta(config), "kind": "power", "series": series.label,
            "step": series.step, "unit": series.unit, "significance": sig.metadata(),
            "series_meta": series.meta}
    name = f"power_{tag}{_safe(series.label)}"
    times = series.time_labels()
    write_grid(out / f"{name}.grid", grid.periods, times, grid.coi,
               {"power": pw, "significant": sig.mask, "null_quantile": sig.quantile}, meta)
    write_grid(out / f"cwt_{tag}{_safe(series.label)}.grid", grid.periods, times, grid.coi,
               {"re": field_.coefficients.real, "im": field_.coefficients.imag},
               {**_base_meta(config), "kind": "wavelet", "series": series.label})
    if config.render:
        render.power_heatmap(out / f"{name}.png", times, grid.periods, grid.coi, pw, sig.mask,
                             f"Wavelet power: {series.label}",
                             note=f"config_digest={config.digest()}")
    return {"file": f"{name}.grid", "series": series.label, "ar1": model.as_dict()}


def cmd_power(config: RunConfig) -> list[dict]:
    data = load_inputs(config)
    if not data.monthly:
        raise ConfigurationError("no input series configured")
    out = Path(config.output_dir)
    return [run_power(config, s, out) for s in data.monthly.values()]


# ------------------------------------------------------------------ coherence

def run_coherence(config: RunConfig, x: TimeSeries, y: TimeSeries, out: Path,
                  tag: str = "") -> dict:
    x, y = align(x, y)
    check_variance(x.values, x.label)
    check_variance(y.values, y.label)
    grid = _grid_for(config, x)
    spec = _spec(config)
    w = cwt_array(np.stack([x.values, y.values]), grid, MorletParams(config.omega0))
    r2, phase = coherence_arrays(w[0], w[1], Smoother(grid, spec))
    seed = task_seed(config.seed, f"coherence/{tag}{x.label}/{y.label}")
    sig = significance_coherence(x, y, grid, spec, config.n_surrogates, config.level, seed,
                                 observed_r2=r2, params=MorletParams(config.omega0))
    arrow_mask = r2 > spec.arrow_threshold
    meta = {**_base_meta(config), "kind": "coherence", "x": x.label, "y": y.label,
            "step": x.step, "unit": x.unit, "smoothing": spec.as_dict(),
            "significance": sig.metadata(), "phase_convention":
                "angle of smoothed Wx*conj(Wy); positive = first series leads",
            "x_meta": x.meta, "y_meta": y.meta}
    name = f"coherence_{tag}{_safe(x.label)}_{_safe(y.label)}"
    times = x.time_labels()
    write_grid(out / f"{name}.grid", grid.periods, times, grid.coi,
               {"r2": r2, "phase": phase, "arrow_mask": arrow_mask,
                "significant": sig.mask, "null_quantile": sig.quantile}, meta)
    if config.render:
        render.coherence_heatmap(out / f"{name}.png", times, grid.periods, grid.coi, r2, phase,
                                 arrow_mask, sig.mask, f"Squared coherence: {x.label} vs {y.label}",
                                 config.arrow_step, note=f"config_digest={config.digest()}")
    return {"file": f"{name}.grid", "x": x.label, "y": y.label}


def _annual(data: StudyData) -> dict:
    return {k: (annual_mean(s) if s.step == MONTHLY else s) for k, s in data.monthly.items()}


def corrected_series(config: RunConfig, data: StudyData, annual: dict | None = None):
    """CO2-corrected annual temperatures and the econometric reports behind them."""
    if data.co2 is None:
        raise ConfigurationError("CO2 correction requested but no co2 input configured")
    annual = annual if annual is not None else _annual(data)
    corrected, reports = {}, {}
    for label, series in annual.items():
        if label == SUNSPOTS:
            continue
        fit, eg = engle_granger(*align(series, data.co2), max_lag=config.max_lag)
        corrected[label] = fit.residuals.with_values(fit.residuals.values,
                                                     label=f"{label}_corrected")
        reports[label] = {"intercept": fit.intercept, "slope": fit.slope,
                          "r_squared": fit.r_squared, "engle_granger": eg.as_dict()}
    return corrected, reports


def cmd_coherence(config: RunConfig) -> list[dict]:
    data = load_inputs(config)
    out = Path(config.output_dir)
    pairs = _pairs(data)
    if not pairs:
        raise ConfigurationError("coherence needs at least two input series")
    if not config.correct:
        return [run_coherence(config, data.monthly[a], data.monthly[b], out) for a, b in pairs]
    annual = _annual(data)
    corrected, _ = corrected_series(config, data, annual)
    return [run_coherence(config, annual[a], corrected[b], out, "annual_") for a, b in pairs]


# -------------------------------------------------------------------- granger

def _stationarity(config: RunConfig, annual: dict, co2: TimeSeries) -> dict:
    out = {}
    for label, s in [("co2", co2), *[(k, v) for k, v in annual.items() if k != SUNSPOTS]]:
        out[label] = {"adf": adf_test(s, max_lag=config.max_lag).as_dict(),
                      "kpss": kpss_test(s).as_dict()}
    return out


def granger_study(config: RunConfig, data: StudyData) -> dict:
    if SUNSPOTS not in data.monthly:
        raise ConfigurationError("granger needs the sunspot series")
    annual = _annual(data)
    temps = [k for k in annual if k != SUNSPOTS]
    if not temps:
        raise ConfigurationError("granger needs at least one temperature series")
    cause = annual[SUNSPOTS]
    doc = {"time_domain": {}, "frequency_domain": {}, "config_digest": config.digest()}
    variants = {"original": {t: annual[t] for t in temps}}
    if data.co2 is not None:
        corrected, coint = corrected_series(config, data, annual)
        variants["co2_controlled"] = corrected
        doc["cointegration"] = coint
        doc["stationarity"] = _stationarity(config, annual, data.co2)
    bands = default_bands(config.band_period)
    for variant, effects in variants.items():
        rows = {}
        for t, eff in effects.items():
            x, y = align(cause, eff)
            rows[t] = granger_time(x, y, config.max_lag).as_dict()
        doc["time_domain"][variant] = rows
        common = [cause, *effects.values()]
        first = max(s.start for s in common)
        last = min(s.end for s in common)
        xs = cause.slice_ordinals(first, last)
        ys = [e.slice_ordinals(first, last) for e in effects.values()]
        seed = task_seed(config.seed, f"granger_frequency/{variant}")
        res = granger_frequency(xs, ys, config.p, bands, config.n_bootstrap, seed)
        doc["frequency_domain"][variant] = {
            "effects": list(effects), "years": [first, last],
            "bands": [b.as_dict() for b in res]}
    return doc


def granger_table(doc: dict) -> str:
    variants = list(doc["time_domain"])
    head = f"{'':26s}" + "".join(f"| {v:>30s} " for v in variants)
    sub = f"{'':26s}" + "".join(f"| {'statistic':>12s} {'p-value':>10s} {'lags':>5s} "
                                for _ in variants)
    lines = [f"# config_digest: {doc['config_digest']}",
             "Time-domain Granger causality (sunspots -> temperature)", head, sub]
    temps = list(doc["time_domain"][variants[0]])
    for t in temps:
        row = f"{'sunspots -> ' + t + ' T':26s}"
        for v in variants:
            r = doc["time_domain"][v].get(t)
            row += (f"| {r['statistic']:12.4f} {r['p_value']:10.4f} {r['lags']:5d} "
                    if r else f"| {'':30s} ")
        lines.append(row)
    lines.append("")
    lines.append("Frequency-band Granger causality (SUR system, bootstrap 90% critical values)")
    lines.append(f"{'variant':16s} {'band':12s} {'statistic':>10s} {'crit90':>10s} {'causal':>7s}")
    for v, body in doc["frequency_domain"].items():
        for b in body["bands"]:
            lines.append(f"{v:16s} {b['label']:12s} {b['statistic']:10.4f} "
                         f"{b['critical_value_90']:10.4f} {'yes' if b['causal'] else 'no':>7s}")
    return "\n".join(lines) + "\n"


def cmd_granger(config: RunConfig) -> dict:
    doc = granger_study(config, load_inputs(config))
    out = Path(config.output_dir)
    write_atomic(out / "granger.json", dumps(doc))
    write_atomic(out / "granger_table.txt", granger_table(doc))
    return doc


# ------------------------------------------------------------------ reproduce

def cmd_reproduce(config: RunConfig) -> dict:
    """Full study: powers, monthly and annual coherence, econometrics, tables."""
    data = load_inputs(config)
    if SUNSPOTS not in data.monthly or len(data.monthly) < 2:
        raise ConfigurationError("reproduce needs sunspots and at least one temperature series")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_atomic(out / "config.txt", config.to_text() + f"# digest: {config.digest()}\n")
    stamp = [f"config_digest: {config.digest()}"]
    summary = {"config_digest": config.digest(), "power": [], "coherence": {}}
    for s in data.monthly.values():
        log.info("power: %s", s.label)
        summary["power"].append(run_power(config, s, out))
    pairs = _pairs(data)
    summary["coherence"]["monthly"] = []
    for a, b in pairs:
        log.info("monthly coherence: %s x %s", a, b)
        summary["coherence"]["monthly"].append(
            run_coherence(config, data.monthly[a], data.monthly[b], out))
    annual = _annual(data)
    summary["coherence"]["annual_original"] = [
        run_coherence(config, annual[a], annual[b], out, "annual_") for a, b in pairs]
    for label, s in annual.items():
        write_atomic(out / f"annual_{_safe(label)}.csv", to_csv_text(s, stamp))
    if data.co2 is not None:
        corrected, _ = corrected_series(config, data, annual)
        for label, s in corrected.items():
            write_atomic(out / f"annual_{_safe(s.label)}.csv", to_csv_text(s, stamp))
        summary["coherence"]["annual_corrected"] = [
            run_coherence(config, annual[a], corrected[b], out, "annual_") for a, b in pairs]
    log.info("granger tests")
    doc = granger_study(config, data)
    write_atomic(out / "granger.json", dumps(doc))
    write_atomic(out / "granger_table.txt", granger_table(doc))
    summary["granger"] = "granger.json"
    summary["partial_years"] = {k: s.meta.get("annual_mean", {}) for k, s in annual.items()}
    write_atomic(out / "summary.json", dumps(summary))
    return summary


def cmd_ingest(path, fmt: str, output, annual: bool = False, fill: str | None = None,
               label: str | None = None) -> TimeSeries:
    series = parse_series(path, fmt, label, None if fill in (None, "none") else fill)
    if annual and series.step == MONTHLY:
        series = annual_mean(series)
    write_atomic(output, to_csv_text(series))
    meta = {"label": series.label, "step": series.step, "length": len(series),
            "first": series.time_labels()[0], "last": series.time_labels()[-1],
            "source": str(path), "format": fmt, **series.meta}
    write_atomic(str(output) + ".meta.json", dumps(meta))
    return series
