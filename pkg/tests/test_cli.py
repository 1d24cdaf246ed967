import csv
import json
import os

import numpy as np
import pytest

import oracles
from kastap import cli
from kastap.errors import ConfigError
from kastap.experiment import (PRESETS, get_preset, list_presets, load_spec, run_experiment, spec_from_dict,
                               spec_to_dict)

CONFIG = """\
sweep: doppler
name: small
trials: 2
master_seed: 5
doppler:
  start: -100.0
  stop: 100.0
  step: 50.0
algorithms:
  - name: lrgp
    kind: LRGP-EIG
    snapshots: 4
  - name: lsmi
    kind: LSMI
    snapshots: 48
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(CONFIG)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestPresets:
    def test_listing(self):
        text = list_presets()
        assert "fig3d: sigma_v=0.5" in text
        assert "fig7: pfa=1e-3" in text
        ids = [line.split(":")[0] for line in text.splitlines()]
        for pid in ["fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c",
                    "fig5a", "fig5b", "fig5c", "fig6", "fig7"]:
            assert pid in ids

    def test_stable_ordering(self):
        assert list_presets() == list_presets()
        assert list_presets().splitlines()[0].startswith("fig2a")

    def test_cli_listing(self, capsys):
        assert cli.main(["list-presets"]) == 0
        assert capsys.readouterr().out.strip() == list_presets()

    def test_fig7_parameters(self):
        spec = get_preset("fig7")
        assert spec.pfa == oracles.PFA
        assert spec.threshold_samples == oracles.DETECTION_SAMPLES

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            get_preset("fig99")

    @pytest.mark.parametrize("pid", sorted(PRESETS))
    def test_presets_validate(self, pid):
        spec = get_preset(pid)
        assert spec_from_dict(spec_to_dict(spec)) == spec


class TestRun:
    def test_fig3a_layout(self, tmp_path):
        csv_path, json_path = run_experiment(get_preset("fig3a").replace(trials=1), tmp_path)
        rows = _rows(csv_path)
        assert rows[0] == ["doppler_hz", "optimum_db", "lrgp_nocmt_db", "lrgp_cmt_db"]
        assert len(rows) - 1 == oracles.DOPPLER_GRID_POINTS
        axis = np.array([float(r[0]) for r in rows[1:]])
        assert np.array_equal(axis, np.arange(-150, 151, 5.0))
        meta = json.loads(json_path.read_text())
        assert meta["columns"] == rows[0]
        assert meta["master_seed"] == 0 and meta["runtime_s"] >= 0
        assert meta["version"]
        assert meta["experiment"]["scenario"]["radar"]["num_elements"] == oracles.M

    def test_number_format(self, config, tmp_path):
        csv_path, _ = run_experiment(load_spec(config), tmp_path)
        for row in _rows(csv_path)[1:]:
            for cell in row:
                assert cell == f"{float(cell):.9g}"

    def test_same_seed_byte_identical(self, config, tmp_path):
        spec = load_spec(config)
        a, _ = run_experiment(spec, tmp_path / "a")
        b, _ = run_experiment(spec, tmp_path / "b")
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, config, tmp_path):
        spec = load_spec(config)
        a, _ = run_experiment(spec, tmp_path / "a")
        b, _ = run_experiment(spec.replace(master_seed=6), tmp_path / "b")
        assert a.read_bytes() != b.read_bytes()

    def test_sidecar_round_trip(self, config, tmp_path):
        csv_a, json_a = run_experiment(load_spec(config), tmp_path / "a")
        again = load_spec(json_a)
        assert again == load_spec(config)
        csv_b, _ = run_experiment(again, tmp_path / "b")
        assert csv_a.read_bytes() == csv_b.read_bytes()

    def test_ridge_preset(self, tmp_path):
        csv_path, _ = run_experiment(get_preset("fig2a"), tmp_path)
        rows = _rows(csv_path)
        assert rows[0] == ["azimuth_deg", "spatial_freq", "doppler_assumed_hz", "doppler_true_hz"]
        data = np.array(rows[1:], dtype=float)
        assert len(data) == 361
        # a 2 m/s speed error scales the ridge slope by 52/50
        assert np.allclose(data[:, 3], data[:, 2] * 52 / 50, atol=1e-6)

    def test_pd_sweep(self, tmp_path):
        spec = get_preset("fig7")
        spec = spec.replace(algorithms=spec.algorithms[:1], snr_db=[-10.0, 0.0], trials=1,
                            threshold_samples=1000, h1_samples=1000)
        rows = _rows(run_experiment(spec, tmp_path)[0])
        assert rows[0] == ["snr_db", "optimum_pd", "lrgp_pd"]
        assert len(rows) == 3


class TestConfigErrors:
    def test_empty_algorithms(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("sweep: doppler\nalgorithms: []\n")
        with pytest.raises(ConfigError):
            load_spec(path)
        assert cli.main(["validate", str(path)]) != 0
        assert cli.main(["run", str(path), "--out", str(tmp_path)]) != 0

    def test_unknown_key_line_number(self, config, capsys):
        config.write_text(CONFIG.replace("    snapshots: 48", "    snapshotz: 48"))
        assert cli.main(["validate", str(config)]) == 2
        err = capsys.readouterr().err
        assert f"{config}:15:" in err and "snapshotz" in err

    def test_bad_value_line_number(self, config):
        config.write_text(CONFIG.replace("trials: 2", "trials: 0"))
        with pytest.raises(ConfigError) as info:
            load_spec(config)
        assert info.value.line == 3

    def test_unknown_kind(self, config):
        config.write_text(CONFIG.replace("kind: LSMI", "kind: SMI9"))
        with pytest.raises(ConfigError):
            load_spec(config)

    def test_missing_sweep(self, tmp_path):
        path = tmp_path / "nosweep.yaml"
        path.write_text("trials: 3\n")
        with pytest.raises(ConfigError):
            load_spec(path)

    def test_missing_file(self, tmp_path):
        assert cli.main(["validate", str(tmp_path / "none.yaml")]) == 2

    def test_unknown_target(self):
        assert cli.main(["run", "no-such-preset"]) == 2

    def test_validate_ok(self, config, capsys):
        assert cli.main(["validate", str(config)]) == 0
        assert "doppler sweep, 2 algorithms" in capsys.readouterr().out


class TestCli:
    def test_run_with_overrides(self, config, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli.main(["run", str(config), "--out", str(out), "--seed", "9", "--trials", "1"]) == 0
        assert "wrote" in capsys.readouterr().out
        meta = json.loads((out / "small.json").read_text())
        assert meta["master_seed"] == 9 and meta["experiment"]["trials"] == 1

    def test_cli_matches_library(self, config, tmp_path):
        assert cli.main(["run", str(config), "--out", str(tmp_path / "cli")]) == 0
        lib, _ = run_experiment(load_spec(config), tmp_path / "lib")
        assert (tmp_path / "cli" / "small.csv").read_bytes() == lib.read_bytes()

    @pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
    def test_unwritable_output(self, config, tmp_path):
        locked = tmp_path / "locked"
        locked.mkdir()
        locked.chmod(0o500)
        try:
            assert cli.main(["run", str(config), "--out", str(locked / "sub")]) == 3
        finally:
            locked.chmod(0o700)

    def test_output_path_is_a_file(self, config, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        assert cli.main(["run", str(config), "--out", str(blocker / "sub")]) == 3
