import subprocess
import sys

import pytest

from neurofuzzy import cli
from neurofuzzy.errors import ConfigError

FAST = ["--n-train", "40", "--n-test", "200"]


def run_cli(args, tmp_path):
    return cli.main(["--out-dir" if a == "@OUT@" else a for a in args]
                    if "@OUT@" in args else args + ["--out-dir", str(tmp_path)])


class TestConfigFile:
    def test_missing_file(self, tmp_path, capsys):
        rc = cli.main(["model", "--fn", "g1", "--config", str(tmp_path / "nope.ini")])
        assert rc == 1

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[network]\nwarp_factor = 9\n")
        with pytest.raises(ConfigError, match="warp_factor"):
            cli.load_config_file(str(path))

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[universe]\nanswer = 42\n")
        with pytest.raises(ConfigError, match="universe"):
            cli.load_config_file(str(path))

    def test_typed_values(self, tmp_path):
        path = tmp_path / "ok.ini"
        path.write_text("[network]\np = 5\nalpha = 0.001\n[experiment]\nseed = 3\n")
        cfg = cli.load_config_file(str(path))
        assert cfg == {"network": {"p": 5, "alpha": 0.001}, "experiment": {"seed": 3}}

    def test_flags_beat_file(self, tmp_path):
        path = tmp_path / "ok.ini"
        path.write_text("[experiment]\nseed = 3\nfunction = g2\n")
        rc = cli.main(["model", "--config", str(path), "--fn", "g1", "--seed", "8",
                      "--n-train", "30", "--n-test", "100", "--out-dir", str(tmp_path)])
        assert rc == 0
        text = (tmp_path / "model_g1.csv").read_text()
        row = text.strip().split("\n")[1].split(",")
        assert row[0] == "g1" and row[3] == "8"


class TestModelCommand:
    def test_writes_report(self, tmp_path):
        rc = run_cli(["model", "--fn", "g1"] + FAST, tmp_path)
        assert rc == 0
        out = tmp_path / "model_g1.csv"
        assert out.exists()
        header = out.read_text().split("\n")[0]
        assert header.split(",") == cli.REPORT_COLUMNS

    def test_seed_determinism_byte_identical(self, tmp_path):
        a_dir = tmp_path / "a"
        b_dir = tmp_path / "b"
        for d in (a_dir, b_dir):
            rc = cli.main(["model", "--fn", "g1", "--seed", "42", "--out-dir", str(d)]
                          + FAST)
            assert rc == 0
        a = (a_dir / "model_g1.csv").read_bytes()
        b = (b_dir / "model_g1.csv").read_bytes()
        assert a == b

    def test_surface_and_state(self, tmp_path):
        rc = cli.main(["model", "--fn", "g1", "--surface", "--save-state",
                       str(tmp_path / "g1.state"), "--out-dir", str(tmp_path)] + FAST)
        assert rc == 0
        surface = (tmp_path / "surface_g1.csv").read_text().strip().split("\n")
        assert surface[0] == "x,y,predicted,actual"
        assert len(surface) == 1 + 101 * 101
        assert (tmp_path / "g1.state").stat().st_size > 0

    def test_unknown_function_exit_1(self, tmp_path):
        assert run_cli(["model", "--fn", "g7"], tmp_path) == 1

    def test_paper_defaults_flag_overrides_file(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[network]\np = 2\nthreshold = 5.0\n[experiment]\nn_train = 10\n")
        rc = cli.main(["model", "--fn", "g1", "--paper-defaults", "--config", str(path),
                       "--out-dir", str(tmp_path)])
        assert rc == 0
        row = (tmp_path / "model_g1.csv").read_text().strip().split("\n")[1].split(",")
        assert row[1] == "225" and row[4] == "7" and row[6] == "0.2"


class TestOtherCommands:
    def test_classify(self, tmp_path):
        rc = cli.main(["classify", "--dataset", "1", "--n-train", "60",
                       "--n-test", "200", "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "classify_set1.csv").exists()

    def test_noise_default_variance(self, tmp_path):
        rc = run_cli(["noise", "--fn", "g1"] + FAST, tmp_path)
        assert rc == 0
        assert (tmp_path / "noise_g1.csv").exists()

    def test_fault_default_fraction(self, tmp_path):
        rc = run_cli(["fault", "--fn", "g1"] + FAST, tmp_path)
        assert rc == 0
        assert (tmp_path / "fault_g1.csv").exists()

    def test_sweep_only(self, tmp_path):
        rc = run_cli(["crossbar-compare", "--sweep-only"], tmp_path)
        assert rc == 0
        lines = (tmp_path / "device_weight_sweep.csv").read_text().strip().split("\n")
        assert lines[0] == "voltage,delta_weight"
        assert len(lines) == 82

    def test_crossbar_compare_small(self, tmp_path):
        rc = cli.main(["crossbar-compare", "--fn", "g1", "--n-train", "30",
                       "--n-test", "100", "--n-probes", "10",
                       "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "crossbar_compare_g1.csv").exists()

    def test_weight_overflow_config_exit_2(self, tmp_path):
        path = tmp_path / "overflow.ini"
        path.write_text("[crossbar]\nscale_in = 1e6\n")
        rc = cli.main(["crossbar-compare", "--fn", "g1", "--n-train", "20",
                       "--n-test", "50", "--config", str(path),
                       "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_dump_state(self, tmp_path):
        state_path = tmp_path / "net.state"
        rc = cli.main(["model", "--fn", "g1", "--save-state", str(state_path),
                       "--out-dir", str(tmp_path)] + FAST)
        assert rc == 0
        rc = cli.main(["dump-state", "--state", str(state_path),
                       "--out-dir", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "state_w_out.csv").exists()
        assert (tmp_path / "state_w_in_x.csv").exists()

    def test_suite_only_table1(self, tmp_path):
        rc = cli.main(["suite", "--only", "table1", "--jobs", "2",
                       "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "suite_table1.csv").read_text().strip().split("\n")
        assert len(lines) == 6                       # header + 5 rows
        assert lines[0].endswith(",status")
        assert all(line.endswith(",ok") for line in lines[1:])

    def test_suite_bad_only(self, tmp_path):
        assert run_cli(["suite", "--only", "table9"], tmp_path) == 1

    def test_suite_marks_failed_rows_and_continues(self, tmp_path, monkeypatch):
        from neurofuzzy import experiments

        real_run_job = experiments.run_job

        def flaky(kind, cfg):
            if cfg.function == "g2":
                raise RuntimeError("boom")
            return real_run_job(kind, cfg)

        monkeypatch.setattr(cli.experiments, "run_job", flaky)
        rc = cli.main(["suite", "--only", "table1", "--jobs", "1",
                       "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "suite_table1.csv").read_text().strip().split("\n")
        assert len(lines) == 6
        statuses = {line.split(",")[0]: line.rsplit(",", 1)[1] for line in lines[1:]}
        assert statuses["g2"].startswith("error:")
        assert all(statuses[fn] == "ok" for fn in ("g1", "g3", "g4", "g5"))

    def test_out_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "envout"))
        rc = cli.main(["model", "--fn", "g1"] + FAST)
        assert rc == 0
        assert (tmp_path / "envout" / "model_g1.csv").exists()


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "neurofuzzy.cli", "model", "--fn", "g1",
             "--n-train", "20", "--n-test", "50", "--out-dir", str(tmp_path)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "fvu_or_rate" in proc.stdout
