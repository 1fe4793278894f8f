import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavecoh.errors import ConfigurationError
from wavecoh.pipeline.cli import main
from wavecoh.pipeline.config import RunConfig
from wavecoh.pipeline.gridio import read_grid, write_grid


def study_args(paths, out, *extra):
    return ["--sunspots", str(paths["sunspots"]), "--temp-global", str(paths["global"]),
            "--temp-north", str(paths["north"]), "--temp-south", str(paths["south"]),
            "--co2", str(paths["co2"]), "--output-dir", str(out), "--n-surrogates", "100",
            "--no-render", *extra]


def test_config_defaults():
    c = RunConfig()
    assert (c.dj, c.max_period_monthly, c.max_period_annual) == (1 / 12, 512, 64)
    assert (c.level, c.n_surrogates, c.scale_width, c.arrow_threshold) == (0.05, 300, 0.6, 0.5)
    assert (c.p, c.band_period, c.n_bootstrap) == (11, 16, 1000)


@settings(max_examples=30, deadline=None)
@given(dj=st.floats(0.01, 1), level=st.floats(0.001, 0.5), seed=st.integers(0, 2 ** 63),
       label=st.text(min_size=1, max_size=20), correct=st.booleans())
def test_config_round_trip(dj, level, seed, label, correct):
    c = RunConfig(dj=dj, level=level, seed=seed, sunspots=label, correct=correct,
                  inputs=[label, "b::generic_csv"])
    back = RunConfig.from_text(c.to_text())
    assert back == c
    assert back.digest() == c.digest()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigurationError):
        RunConfig.from_text("nonsense = 3\n")


def test_grid_round_trip(tmp_path, rng):
    periods = np.geomspace(2, 64, 7)
    times = [f"{1900 + i}" for i in range(11)]
    coi = rng.random(11)
    planes = {"a": rng.standard_normal((7, 11)), "b": (rng.random((7, 11)) > 0.5).astype(float)}
    write_grid(tmp_path / "x.grid", periods, times, coi, planes, {"k": 1})
    g = read_grid(tmp_path / "x.grid")
    assert g["meta"] == {"k": 1} and g["times"] == times
    np.testing.assert_array_equal(g["periods"], periods)
    np.testing.assert_array_equal(g["coi"], coi)
    for name in planes:
        np.testing.assert_array_equal(g["planes"][name], planes[name])


def test_cli_ingest(tmp_path, study_files, capsys):
    out = tmp_path / "ss.csv"
    assert main(["ingest", str(study_files["sunspots"]), "--format", "SIDC_sunspots",
                 "-o", str(out), "--annual"]) == 0
    meta = json.loads((tmp_path / "ss.csv.meta.json").read_text())
    assert meta["step"] == "annual" and meta["length"] == 39
    assert meta["annual_mean"]["dropped_partial_years"] == [1919]
    assert "39 annual values" in capsys.readouterr().out


def test_cli_power_writes_grid_with_mask_and_digest(tmp_path, study_files):
    out = tmp_path / "out"
    assert main(["power", *study_args(study_files, out)]) == 0
    g = read_grid(out / "power_sunspots.grid")
    assert set(g["planes"]) >= {"power", "significant", "null_quantile"}
    sig = g["planes"]["significant"]
    assert set(np.unique(sig)) <= {0.0, 1.0}
    np.testing.assert_array_equal(sig, g["planes"]["power"] > g["planes"]["null_quantile"])
    f = {k: str(v) for k, v in study_files.items()}
    config = RunConfig(sunspots=f["sunspots"], temp_global=f["global"], temp_north=f["north"],
                       temp_south=f["south"], co2=f["co2"], output_dir=str(out),
                       n_surrogates=100, render=False)
    assert g["meta"]["config_digest"] == config.digest()
    assert g["meta"]["significance"]["n_surrogates"] == 100
    assert len(g["times"]) == len(g["coi"]) == 12 * 39 + 5


def test_cli_coherence_corrected_uses_annual_residuals(tmp_path, study_files):
    out = tmp_path / "out"
    assert main(["coherence", *study_args(study_files, out, "--correct")]) == 0
    files = sorted(p.name for p in out.glob("*.grid"))
    assert "coherence_annual_sunspots_northern_corrected.grid" in files
    g = read_grid(out / "coherence_annual_sunspots_northern_corrected.grid")
    assert set(g["planes"]) >= {"r2", "phase", "arrow_mask", "significant"}
    assert g["times"][0] == "1880" and g["times"][-1] == "1916"
    r2 = g["planes"]["r2"]
    assert r2.min() >= 0 and r2.max() <= 1
    np.testing.assert_array_equal(g["planes"]["arrow_mask"], r2 > 0.5)


def test_cli_constant_input_reports_label(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    path.write_text("time,value\n" + "".join(f"{1900 + i},1.0\n" for i in range(40)))
    code = main(["power", "--input", f"{path}::generic_csv", "--output-dir", str(tmp_path),
                 "--n-surrogates", "100", "--no-render"])
    err = capsys.readouterr().err
    assert code == 9
    assert "flat" in err


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["ingest", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "o.csv")]) == 13
    bad = tmp_path / "bad.csv"
    bad.write_text("time,value\n1880-01\n")
    assert main(["ingest", str(bad), "-o", str(tmp_path / "o.csv")]) == 2
    gap = tmp_path / "gap.csv"
    gap.write_text("time,value\n1880,1\n1884,2\n")
    assert main(["ingest", str(gap), "-o", str(tmp_path / "o.csv")]) == 3
    # Configuration is validated before any input is read.
    assert main(["power", "--n-surrogates", "10", "--input", str(gap)]) == 10
    capsys.readouterr()


def test_cli_write_config_round_trip(tmp_path):
    cfg = tmp_path / "run.txt"
    assert main(["granger", "--seed", "42", "--max-lag", "4", "--correct",
                 "--write-config", str(cfg)]) == 0
    c = RunConfig.load(cfg)
    assert (c.seed, c.max_lag, c.correct) == (42, 4, True)
    again = tmp_path / "again.txt"
    assert main(["granger", "--config", str(cfg), "--write-config", str(again)]) == 0
    assert again.read_text() == cfg.read_text()


def test_cli_granger_table(tmp_path, study_files, capsys):
    out = tmp_path / "out"
    code = main(["granger", *study_args(study_files, out, "--n-bootstrap", "20", "--p", "3",
                                        "--max-lag", "4")])
    assert code == 0
    doc = json.loads((out / "granger.json").read_text())
    td = doc["time_domain"]
    assert set(td) == {"original", "co2_controlled"}
    assert sum(len(v) for v in td.values()) == 6
    fd = doc["frequency_domain"]
    assert sum(len(v["bands"]) for v in fd.values()) == 4
    for rows in td.values():
        for r in rows.values():
            assert 0 <= r["p_value"] <= 1 and 1 <= r["lags"] <= 4
    table = (out / "granger_table.txt").read_text()
    assert table.startswith(f"# config_digest: {doc['config_digest']}")
    assert "sunspots -> northern T" in table
    assert capsys.readouterr().out == table
