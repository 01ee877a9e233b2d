import csv
import io
import json

import pytest

from moving_picture import cli
from moving_picture.checks import MODULES, REGISTRY


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestListChecks:
    def test_all(self, capsys):
        code, out, _ = run(["list-checks"], capsys)
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == len(REGISTRY) >= 12
        assert all(" - " in line for line in lines)

    def test_module_filter(self, capsys):
        _, out, _ = run(["list-checks", "--module", "kernels"], capsys)
        lines = out.strip().splitlines()
        assert lines and all("[kernels]" in line for line in lines)
        assert len(lines) < len(REGISTRY)

    def test_unknown_module(self, capsys, caplog):
        code, out, _ = run(["list-checks", "--module", "nope"], capsys)
        assert code == 0 and out == ""
        assert "unknown module" in caplog.text

    def test_every_check_has_anchor(self):
        assert all(c.anchor.strip() and c.module in MODULES for c in REGISTRY.values())


class TestConfig:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nsystem = free\ntimes = 0.1, 0.2\nseed = 9\n")
        args = cli.build_parser().parse_args(["verify", "--config", str(path), "--times", "0.5"])
        cfg = cli._load_config(args)
        assert cfg.system == "free" and cfg.times == (0.5,) and cfg.seed == 9

    def test_grid_parsing(self):
        cfg = cli.build_config({"grid": "-10,10,128"}, {})
        assert cfg.make_grid().n == 128 and cfg.grid[0] == -10.0

    @pytest.mark.parametrize("values", [{"system": "rotor"}, {"grid": "1,2"}, {"format": "xml"}, {"m": "abc"},
                                        {"grid": "1,-1,64"}, {"hbar": "-1"}])
    def test_bad_values(self, values):
        with pytest.raises(cli.ConfigError):
            cli.build_config(values, {})

    def test_unknown_key(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_config_text("colour = blue\n")

    def test_bad_config_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("system free\n")
        code, _, err = run(["verify", "--config", str(path)], capsys)
        assert code == 2 and "line 1" in err

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, _ = run(["verify", "--config", str(tmp_path / "absent.cfg")], capsys)
        assert code == 2


class TestVerify:
    def test_unknown_check(self, capsys):
        code, _, err = run(["verify", "--checks", "no_such_check"], capsys)
        assert code == 2 and "no_such_check" in err

    def test_free_suite_passes(self, tmp_path, capsys):
        out = tmp_path / "free.json"
        code, _, _ = run(["verify", "--system", "free", "--checks", "all", "--times", "0.3,0.7", "--out", str(out)],
                         capsys)
        doc = json.loads(out.read_text(encoding="utf-8"))
        failed = [r["check_name"] for r in doc["reports"] if not r["passed"]]
        assert code == 0 and not failed
        assert set(doc) >= {"config_echo", "reports", "summary"}
        assert doc["summary"]["failed"] == 0 and doc["summary"]["passed"] == len(doc["reports"])
        assert all(r["residual"] <= r["tolerance"] for r in doc["reports"])
        assert (tmp_path / "free.json.timing.json").exists()

    def test_caustic_notice(self, capsys):
        code, out, _ = run(["verify", "--system", "harmonic", "--times", "3.1416",
                            "--checks", "kernel_vs_evolution,kernel_composition,unitarity"], capsys)
        doc = json.loads(out)
        assert code == 0
        assert {r["check_name"] for r in doc["reports"]} == {"unitarity"}
        caustic = [n for n in doc["notices"] if "caustic window" in n]
        assert len(caustic) == 2 and doc["summary"]["skipped"] == 2

    def test_failure_exit_code_not_masked(self, capsys):
        # a coarse grid with a heavy slow oscillator aliases at short time; later passes must not hide it
        code, out, _ = run(["verify", "--system", "harmonic", "--m", "2", "--omega", "0.5", "--hbar", "0.7",
                            "--times", "0.4,1.3", "--checks", "kernel_vs_evolution,unitarity"], capsys)
        doc = json.loads(out)
        assert code == 1 and doc["summary"]["failed"] == 1

    def test_not_applicable_skipped(self, capsys):
        _, out, _ = run(["verify", "--system", "free", "--checks", "moving_coherent_state"], capsys)
        doc = json.loads(out)
        assert doc["reports"] == [] and doc["summary"]["skipped"] == 1

    def test_sorted_by_name_then_time(self, capsys):
        _, out, _ = run(["verify", "--system", "free", "--times", "0.7,0.3",
                         "--checks", "unitarity,group_law,canonical_commutator"], capsys)
        keys = [(r["check_name"], -1.0 if r["t"] is None else r["t"]) for r in json.loads(out)["reports"]]
        assert keys == sorted(keys)

    def test_deterministic(self, tmp_path, capsys):
        args = ["verify", "--system", "harmonic", "--times", "0.4,1.2", "--seed", "3"]
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            run(args + ["--out", str(p)], capsys)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_seed_echoed(self, capsys):
        _, out, _ = run(["verify", "--checks", "hj_residual", "--seed", "42"], capsys)
        doc = json.loads(out)
        assert doc["config_echo"]["seed"] == 42 and doc["rng"] == {"generator": "PCG64", "seed": 42}

    def test_csv_format(self, capsys):
        _, out, _ = run(["verify", "--checks", "unitarity", "--times", "0.5", "--format", "csv"], capsys)
        lines = out.splitlines()
        assert lines[0].startswith("#")
        body = [l for l in lines if not l.startswith("#")]
        rows = list(csv.DictReader(io.StringIO("\n".join(body))))
        assert rows[0]["check_name"] == "unitarity"
        assert float(rows[0]["residual"]) == pytest.approx(float(rows[0]["residual"]))


class TestTabulate:
    def test_kernel_grid(self, tmp_path, capsys):
        out = tmp_path / "k.csv"
        code, _, _ = run(["tabulate", "kernel", "--system", "free", "--times", "0.5", "--out", str(out)], capsys)
        lines = out.read_text().splitlines()
        assert code == 0 and lines[0].startswith("#") and "system=free" in lines[0]
        assert lines[1] == "q,Q,re,im"
        assert len(lines) == 2 + 201 * 201

    def test_moving_number_columns(self, capsys):
        _, out, _ = run(["tabulate", "moving_number", "--times", "0.5"], capsys)
        lines = out.splitlines()
        assert lines[1] == "Q,n0,n1,n2,n3,n4"
        first = lines[2].split(",")
        assert float(first[0]) == -5.0 and len(first) == 6

    def test_action_columns(self, capsys):
        _, out, _ = run(["tabulate", "action", "--system", "harmonic", "--times", "0.5"], capsys)
        assert out.splitlines()[1] == "q,W,F,ReS,ImS"

    def test_digits(self, capsys):
        _, out, _ = run(["tabulate", "moving_coherent", "--times", "0.5", "--points", "5"], capsys)
        value = out.splitlines()[3].split(",")[1]
        mantissa = value.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
        assert len(mantissa) >= 15

    def test_reproducible(self, capsys):
        args = ["tabulate", "moving_momentum", "--system", "free", "--times", "0.9", "--p", "1.3"]
        assert run(args, capsys)[1] == run(args, capsys)[1]

    def test_unknown_what(self, capsys):
        assert run(["tabulate", "bogus"], capsys)[0] == 2

    def test_singular_time(self, capsys):
        code, _, err = run(["tabulate", "kernel", "--system", "free", "--times", "0"], capsys)
        assert code == 2 and "singular" in err

    def test_momentum_state_needs_free_particle(self, capsys):
        assert run(["tabulate", "moving_momentum", "--system", "harmonic"], capsys)[0] == 2
