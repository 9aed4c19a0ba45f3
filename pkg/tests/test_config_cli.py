import json

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from su2lgt.cli import main
from su2lgt.config import DEFAULT_CONFIG, ConfigError, ExperimentConfig, load_config
from su2lgt.experiments import run_evolution, run_spectrum

SMALL = """\
version: 1
time_grid: [0.12, 0.37]
n_trot_values: [1, 2]
shots: 2048
calibration_shots: 2048
bootstrap: 20
seed: 4
"""


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(SMALL)
    return path


def test_default_config_values():
    cfg = load_config(None)
    assert cfg.g_squared == 0.2
    assert cfg.time_grid == [0.02, 0.07, 0.12, 0.17, 0.22, 0.27, 0.32, 0.37]
    assert cfg.r_values == [1, 2] and cfg.lattice.num_qubits == 4


def test_yaml_roundtrip():
    cfg = load_config(None)
    again = ExperimentConfig.from_yaml(cfg.to_yaml())
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.01, 5.0),
    st.lists(st.floats(0, 2), min_size=1, max_size=5),
    st.floats(0, 1),
    st.integers(0, 2**31),
    st.sampled_from(["csv", "tsv"]),
)
def test_roundtrip_property(g2, grid, eps, seed, fmt):
    data = dict(DEFAULT_CONFIG, g_squared=g2, time_grid=grid, seed=seed)
    data["noise"] = {"cnot_depolarizing": eps, "readout_flip": [0.01, 0.03]}
    data["outputs"] = {"directory": "x", "format": fmt, "manifest": False}
    cfg = ExperimentConfig.from_dict(data)
    assert ExperimentConfig.from_yaml(cfg.to_yaml()) == cfg


def test_time_grid_mapping():
    cfg = ExperimentConfig.from_yaml("version: 1\ntime_grid: {start: 0.02, stop: 0.37, step: 0.05}\n")
    assert cfg.time_grid == [0.02, 0.07, 0.12, 0.17, 0.22, 0.27, 0.32, 0.37]


@pytest.mark.parametrize(
    "text, message",
    [
        ("version: 1\nfoo: 3\n", "line 2: foo: unknown key"),
        ("version: 1\nnoise:\n  cnot_depolarizing: 2\n", "line 3: noise.cnot_depolarizing: must be <= 1.0"),
        ("version: 1\nshots: 0\n", "line 2: shots: must be >= 1"),
        ("version: 1\nn_trot_values: [1, x]\n", "line 2: n_trot_values.1: expected an integer"),
        ("version: 1\nr_values: [2]\n", "line 2: r_values: r = 1 is required"),
        ("version: 2\n", "line 1: version: unsupported schema version"),
        ("shots: 5\n", "missing 'version'"),
        ("version: 1\nseed: null\n", "line 2: seed: a seed is required"),
        ("version: 1\nlattice: {truncation: 3/4}\n", "lattice"),
        ("version: 1\noutputs: {format: xml}\n", "outputs.format"),
        ("version: 1\ntime_grid: {start: 0, stop: 1, step: -1}\n", "time_grid"),
        ("version: [\n", "<config>"),
    ],
)
def test_config_errors_are_located(text, message):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_yaml(text)
    assert message in str(info.value)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/cfg.yaml")


def test_spectrum_report(tmp_path):
    report = run_spectrum(load_config(None), tmp_path)
    assert report.passed and set(report.checks) == {"energy density", "gap", "ground-state amplitudes"}
    assert (tmp_path / "spectrum.csv").exists() and (tmp_path / "manifest.json").exists()


def test_spectrum_sweep_monotone():
    cfg = ExperimentConfig.from_yaml("version: 1\nspectrum: {g_squared_sweep: [0.2, 0.5, 1.0, 2.0, 5.0]}\n")
    densities = [d for _, d, _ in run_spectrum(cfg).sweep]
    assert all(a < b for a, b in zip(densities, densities[1:]))


def test_zero_noise_evolution_is_exact(tmp_path):
    text = SMALL + "noise: {cnot_depolarizing: 0.0, readout_flip: [0.0, 0.0]}\n"
    cfg = ExperimentConfig.from_yaml(text)
    res = run_evolution(cfg, tmp_path)
    assert not res["errors"]
    for row in res["rows"]:
        assert row["survival"] == pytest.approx(1.0)
        # raw counts carry shot noise only
        assert abs(row["electric_energy"] - row["noiseless"]) < 5 * max(row["stderr"], 1e-3)


def test_evolution_rows_carry_stages(tmp_path, small):
    res = run_evolution(load_config(small), tmp_path)
    stages = {r["stage"] for r in res["rows"]}
    assert stages == {"raw", "calibrated", "extrapolated", "post_selected"}
    header = (tmp_path / "evolution.csv").read_text().splitlines()[0]
    assert header == "t,n_trot,r,stage,survival,electric_energy,stderr,noiseless"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 4 and set(manifest["files"]) == {"evolution.csv", "curves.csv", "summary.csv"}


def test_cli_exit_codes(tmp_path, small, capsys):
    assert main(["spectrum", "--out", str(tmp_path / "s")]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("version: 1\nnoise:\n  cnot_depolarizing: 5\n")
    assert main(["evolve", "--config", str(bad), "--out", str(tmp_path / "e")]) == 3
    assert "line 3" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["evolve", "--format", "xml"])
    assert info.value.code == 2
    assert main(["calibrate", "--config", str(small), "--out", str(tmp_path / "c"), "--format", "tsv"]) == 0
    assert (tmp_path / "c" / "calibration.tsv").exists()
    assert main(["verify", "--only", "1", "3"]) == 0


def test_cli_numeric_failure(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("version: 1\nlattice: {num_plaquettes: 3}\n")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4
    assert "numerical error" in capsys.readouterr().err


def test_cli_cell_errors_do_not_abort_grid(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(SMALL + "lattice: {num_plaquettes: 2, truncation: '1', identify_top_bottom: false}\n")
    code = main(["evolve", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 4
    assert (tmp_path / "o" / "errors.txt").read_text().count("\n") == 4


def test_seed_override_and_determinism(tmp_path, small):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out in (a, b):
        assert main(["evolve", "--config", str(small), "--out", str(out), "--seed", "17"]) == 0
    assert main(["evolve", "--config", str(small), "--out", str(c), "--seed", "18", "--workers", "2"]) == 0
    for name in ("evolution.csv", "curves.csv", "summary.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / "evolution.csv").read_bytes() != (c / "evolution.csv").read_bytes()
    assert json.loads((a / "manifest.json").read_text())["seed"] == 17


def test_workers_do_not_change_output(tmp_path, small):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["evolve", "--config", str(small), "--out", str(a)]) == 0
    assert main(["evolve", "--config", str(small), "--out", str(b), "--workers", "3"]) == 0
    assert (a / "evolution.csv").read_bytes() == (b / "evolution.csv").read_bytes()


def test_config_files_in_demos_are_valid():
    from pathlib import Path

    for path in sorted((Path(__file__).parent.parent / "demos").glob("*.yaml")):
        yaml.safe_load(path.read_text())
        load_config(path)
