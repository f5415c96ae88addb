import textwrap

import pytest

from ofdm_isac import ConfigError, parse_config
from ofdm_isac.cli import main

MINIMAL = textwrap.dedent("""
    [system]
    carrier_frequency_hz = 24.0e9
    subcarrier_spacing_hz = 120.0e3
    num_subcarriers = 256
    num_symbols = 4
    cp_duration_s = 0.0
    tx_power_w = 0.1
    tx_gain_db = 20.0
    rx_gain_db = 20.0
    noise_figure_db = 2.9
    temperature_k = 290.0
    modulation_order = 4
    rng_seed = 1

    [[targets]]
    distance_m = 30.5
    velocity_mps = 0.0
    rcs_m2 = 3.5

    [experiment]
    kind = "range_profile"
    trials = 2
""")


class TestParseConfig:
    def test_minimal_round_trip(self):
        scn = parse_config(MINIMAL)
        assert scn.system.num_subcarriers == 256
        assert scn.targets[0].distance == 30.5
        assert scn.experiment == "range_profile"
        assert scn.trials == 2
        assert scn.detector.rho == 10.0  # defaults applied

    @pytest.mark.parametrize("needle,repl", [
        ("cp_duration_s = 0.0", "cp_duration_s = 0.0\ncp_taps = 10"),
        ("rng_seed = 1", "rng_seed = 1\nbogus_key = 3"),
        ('kind = "range_profile"', 'kind = "mystery"'),
        ("trials = 2", "trials = 0"),
        ("distance_m = 30.5", "distance = 30.5"),
    ])
    def test_bad_configs_rejected(self, needle, repl):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL.replace(needle, repl))

    def test_unknown_section(self):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL + "\n[plotting]\nx = 1\n")

    def test_missing_system(self):
        with pytest.raises(ConfigError):
            parse_config('[experiment]\nkind = "range_profile"\n')

    def test_experiment_option_scoping(self):
        bad = MINIMAL.replace("trials = 2", "trials = 2\nrho = 10.0")
        with pytest.raises(ConfigError):
            parse_config(bad)

    def test_parse_error_is_config_error(self):
        with pytest.raises(ConfigError):
            parse_config("not toml ===")


class TestCli:
    def write(self, tmp_path, text=MINIMAL):
        cfg = tmp_path / "scenario.toml"
        cfg.write_text(text)
        return cfg

    def test_simulate_writes_schema(self, tmp_path, capsys):
        cfg = self.write(tmp_path)
        rc = main(["simulate", "--config", str(cfg),
                   "--out", str(tmp_path / "res")])
        assert rc == 0
        out = tmp_path / "res" / "range_profile.csv"
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# seed=1,")
        assert lines[1] == "bin,distance_m,power_dbm"
        assert len(lines) == 2 + 256

    def test_byte_identical_reruns(self, tmp_path):
        cfg = self.write(tmp_path)
        for d in ("a", "b"):
            main(["simulate", "--config", str(cfg),
                  "--out", str(tmp_path / d)])
        assert (tmp_path / "a" / "range_profile.csv").read_bytes() == \
               (tmp_path / "b" / "range_profile.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = self.write(tmp_path)
        main(["simulate", "--config", str(cfg), "--out",
              str(tmp_path / "a"), "--seed", "1"])
        main(["simulate", "--config", str(cfg), "--out",
              str(tmp_path / "b"), "--seed", "2"])
        assert (tmp_path / "a" / "range_profile.csv").read_bytes() != \
               (tmp_path / "b" / "range_profile.csv").read_bytes()

    def test_dump_frame(self, tmp_path):
        cfg = self.write(tmp_path)
        rc = main(["simulate", "--config", str(cfg), "--out",
                   str(tmp_path / "res"), "--dump-frame"])
        assert rc == 0
        lines = (tmp_path / "res" / "frame.csv").read_text().splitlines()
        assert lines[1] == "tap,re,im"

    def test_kind_mismatch_fails(self, tmp_path, capsys):
        cfg = self.write(tmp_path)
        rc = main(["validate", "--config", str(cfg),
                   "--out", str(tmp_path / "res")])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        rc = main(["simulate", "--config", str(tmp_path / "nope.toml")])
        assert rc == 2

    def test_sliding_window_trace(self, tmp_path):
        text = MINIMAL.replace('kind = "range_profile"',
                               'kind = "sliding_window"')
        text = text.replace("cp_duration_s = 0.0",
                            "cp_taps = 16")
        cfg = self.write(tmp_path, text)
        rc = main(["sliding-window", "--config", str(cfg), "--out",
                   str(tmp_path / "res"), "--trace-windows"])
        assert rc == 0
        res = tmp_path / "res"
        lines = (res / "detections.csv").read_text().splitlines()
        assert lines[1] == "window,range_bin,distance_m,velocity_mps,power_dbm"
        assert (res / "window_00_range_doppler.csv").exists()

    def test_validate_schema(self, tmp_path):
        text = MINIMAL.replace('kind = "range_profile"', 'kind = "validate"')
        text += "distances_m = [20.0, 40.0]\n"
        cfg = self.write(tmp_path, text)
        rc = main(["validate", "--config", str(cfg),
                   "--out", str(tmp_path / "res")])
        assert rc == 0
        lines = (tmp_path / "res" / "validate_report.csv").read_text(). \
            splitlines()
        assert lines[1] == "distance_m,abs_error_db"
        assert len(lines) == 4
