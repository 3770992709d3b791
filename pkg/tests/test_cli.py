import csv
import json
from pathlib import Path

import pytest

from tempres import config as config_mod
from tempres.cli import main, read_records
from tempres.config import ConfigError

SMALL = {
    "tau_grid": [0.0, 0.1, 0.3, 0.5, 0.7, 1.0],
    "gammas": [0.0, 0.5],
    "repetitions": 10,
    "mean_total_detections": 1e4,
    "master_seed": 17,
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# ------------------------------------------------------------- config

def test_config_defaults():
    run = config_mod.load(None)
    assert run.experiment.repetitions == 100
    assert len(run.experiment.tau_grid) == 7
    assert run.experiment.gammas == (0.0, 0.125, 0.25, 0.375, 0.5)
    assert run.experiment.mean_total_detections == 1e4


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"repetitons": 10}')
    with pytest.raises(ConfigError, match="repetitons"):
        config_mod.load(str(path))


def test_config_nested_unknown_key(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"device": {"crosstalk": 0.1}}')
    with pytest.raises(ConfigError, match="device.*crosstalk"):
        config_mod.load(str(path))


def test_config_syntax_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "repetitions": 10,\n}')
    with pytest.raises(ConfigError, match=r":3:"):
        config_mod.load(str(path))


def test_config_invalid_value(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"repetitions": 0}')
    with pytest.raises(ConfigError):
        config_mod.load(str(path))


def test_bad_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"nope": 1}')
    code = main(["fisher", "--config", str(path), "--out", str(tmp_path)])
    assert code == 2
    assert "nope" in capsys.readouterr().err


# ------------------------------------------------------------- fisher

def test_fisher_csv(tmp_path, small_config):
    assert main(["fisher", "--config", str(small_config),
                 "--out", str(tmp_path / "f")]) == 0
    rows = read_csv(tmp_path / "f" / "fisher_report.csv")
    assert rows[0] == ["tau", "gamma", "fi_s", "fi_a", "fi_total", "qfi",
                       "fi_int_s", "fi_int_a", "fi_int_incoh", "crb_per_event"]
    assert len(rows) - 1 == len(SMALL["tau_grid"]) * len(SMALL["gammas"])
    by_key = {(float(r[0]), float(r[1])): r for r in rows[1:]}
    for key, row in by_key.items():
        assert float(row[4]) == pytest.approx(0.25, rel=1e-6)     # fi_total
        assert float(row[9]) == pytest.approx(4.0, rel=1e-6)      # crb_per_event
    assert float(by_key[(0.0, 0.0)][2]) == 0.0                    # fi_s at tau=0
    assert float(by_key[(0.1, 0.5)][8]) < 0.0025                  # Rayleigh curse


# ----------------------------------------------------------- simulate

def test_simulate_csv_and_roundtrip(tmp_path, small_config):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(small_config), "--out", str(out)]) == 0
    rows = read_csv(out / "records.csv")
    assert rows[0] == ["tau_true", "gamma", "run", "channel", "n", "counts"]
    n_cells = len(SMALL["tau_grid"]) * len(SMALL["gammas"]) * SMALL["repetitions"]
    assert len(rows) - 1 == n_cells * 2 * 4
    records = read_records(out / "records.csv")
    assert len(records) == n_cells

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["master_seed"] == 17
    assert manifest["outputs"][0]["path"] == "records.csv"
    assert len(manifest["outputs"][0]["sha256"]) == 64


def test_simulate_deterministic(tmp_path, small_config):
    for name in ("a", "b"):
        assert main(["simulate", "--config", str(small_config),
                     "--out", str(tmp_path / name)]) == 0
    assert ((tmp_path / "a" / "records.csv").read_bytes()
            == (tmp_path / "b" / "records.csv").read_bytes())


def test_seed_flag_overrides_config(tmp_path, small_config):
    assert main(["simulate", "--config", str(small_config), "--seed", "99",
                 "--out", str(tmp_path / "s")]) == 0
    manifest = json.loads((tmp_path / "s" / "manifest.json").read_text())
    assert manifest["master_seed"] == 99
    assert manifest["config"]["master_seed"] == 99


def test_unwritable_output_dir(tmp_path, small_config, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["simulate", "--config", str(small_config),
                 "--out", str(blocker / "sub")])
    assert code == 3


# ----------------------------------------------------------- estimate

def test_estimate_outputs(tmp_path, small_config):
    sim = tmp_path / "sim"
    out = tmp_path / "est"
    assert main(["simulate", "--config", str(small_config), "--out", str(sim)]) == 0
    assert main(["estimate", str(sim / "records.csv"),
                 "--config", str(small_config), "--out", str(out)]) == 0

    stats = read_csv(out / "stats.csv")
    assert stats[0] == ["tau_true", "gamma", "n_runs", "mean", "variance",
                        "bias", "variance_per_detection"]
    assert len(stats) - 1 == len(SMALL["tau_grid"]) * len(SMALL["gammas"])

    estimates = read_csv(out / "estimates.csv")
    assert estimates[0] == ["tau_true", "gamma", "run", "tau_hat"]
    hats = [float(r[3]) for r in estimates[1:]]
    assert len(hats) == 10 * len(SMALL["tau_grid"]) * len(SMALL["gammas"])
    assert all(h >= 0.0 for h in hats)


def test_estimate_grid_mismatch(tmp_path, small_config, capsys):
    sim = tmp_path / "sim"
    assert main(["simulate", "--config", str(small_config), "--out", str(sim)]) == 0
    other = tmp_path / "other.json"
    other.write_text(json.dumps({**SMALL, "tau_grid": [0.0, 0.2, 0.4, 0.6, 0.8]}))
    code = main(["estimate", str(sim / "records.csv"),
                 "--config", str(other), "--out", str(tmp_path / "est")])
    assert code == 4
    assert "grid" in capsys.readouterr().err


def test_estimate_missing_records(tmp_path, small_config):
    code = main(["estimate", str(tmp_path / "nope.csv"),
                 "--config", str(small_config), "--out", str(tmp_path / "est")])
    assert code == 3


# ---------------------------------------------------------- reproduce

def test_reproduce_fig3_series(tmp_path, small_config):
    out = tmp_path / "fig3"
    assert main(["reproduce", "fig3", "--config", str(small_config),
                 "--svg", "--out", str(out)]) == 0
    rows = read_csv(out / "fig3.csv")
    assert rows[0] == ["series", "tau", "value"]
    series = {r[0] for r in rows[1:]}
    gamma_series = {s for s in series if s.startswith("gamma=")}
    assert len(gamma_series) == 5
    assert series - gamma_series == {"qcrb", "intensity_crb"}
    assert (out / "fig3.svg").read_text().startswith("<svg")


def test_reproduce_fig4_resource_counting(tmp_path, small_config):
    out = tmp_path / "fig4"
    assert main(["reproduce", "fig4", "--config", str(small_config),
                 "--out", str(out)]) == 0
    rows = read_csv(out / "fig4.csv")[1:]
    values = {}
    for series, tau, value in rows:
        values.setdefault(series, {})[float(tau)] = float(value)
    smallest = min(values["per_a_detection"])
    qcrb = values["qcrb"][smallest]
    assert values["per_a_detection"][smallest] < qcrb
    assert values["per_total_detection"][smallest] > values["per_a_detection"][smallest]


def test_reproduce_fig2_tracks_diagonal(tmp_path, small_config):
    out = tmp_path / "fig2"
    assert main(["reproduce", "fig2", "--config", str(small_config),
                 "--out", str(out)]) == 0
    rows = read_csv(out / "fig2.csv")
    assert rows[0] == ["tau_true", "gamma", "mean", "std"]
    for tau_true, gamma, mean, std in rows[1:]:
        if float(gamma) == 0.5 and float(tau_true) >= 0.2:
            assert abs(float(mean) - float(tau_true)) < 2.5 * float(std)


def test_reproduce_unknown_figure(tmp_path, small_config):
    with pytest.raises(SystemExit):
        main(["reproduce", "fig9", "--config", str(small_config),
              "--out", str(tmp_path)])
