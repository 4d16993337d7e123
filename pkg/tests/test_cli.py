import json
import subprocess
import sys

import pytest

from shiftconv.cli import COMMANDS, run


def out(capsys, argv):
    code = run(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_rell_bare_value(capsys):
    assert out(capsys, ["rell", "--n", "7", "--ell", "3"]) == (0, "0\n", "")
    assert out(capsys, ["rell", "--n", "3", "--ell", "3"])[1] == "8\n"


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "shiftconv", "rell", "--n", "7"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "0\n"


def test_every_command_has_help(capsys):
    for name in COMMANDS:
        assert run([name, "--help"]) == 0
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["rell", "--n", "abc"],
    ["gauss", "--emit", "xml"],
    ["kloosterman", "--workers", "0"],
    ["salie", "--p", "9"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(argv) == 2
    capsys.readouterr()


@pytest.mark.parametrize("cmd", ["charsum-verify", "lemma52-sweep", "prop33-sweep", "phi-consistency"])
def test_sweeps_require_seed(capsys, cmd):
    code, _, err = out(capsys, [cmd])
    assert code == 2 and "--seed" in err


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.conf"
    cfg.write_text("# n from the file\nn = 5\nell = 2\n")
    assert out(capsys, ["rell", "--config", str(cfg)])[1] == "8\n"
    assert out(capsys, ["rell", "--config", str(cfg), "--n", "4"])[1] == "4\n"
    cfg.write_text("bogus = 1\n")
    assert run(["rell", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_records_output_and_determinism(capsys):
    argv = ["charsum-verify", "--seed", "3", "--q-max", "200", "--count", "10", "--p-max", "23",
            "--per-p", "3", "--emit", "records"]
    code, a, _ = out(capsys, argv + ["--workers", "2"])
    assert code == 0
    assert out(capsys, argv + ["--workers", "1"])[1] == a
    lines = [json.loads(l) for l in a.splitlines()]
    assert all(l["command"] == "charsum-verify" for l in lines)


def test_charsum_verify_q500(capsys):
    code, text, err = out(capsys, ["charsum-verify", "--seed", "1", "--q-max", "500", "--count", "40"])
    assert code == 0, err


def test_circle_identity(capsys):
    code, text, err = out(capsys, ["circle-identity", "--X", "1024", "--coeff", "tau3"])
    assert code == 0, err


def test_failure_exits_1(capsys):
    code, _, err = out(capsys, ["sphere-check", "--X", "10000", "--max-exponent", "0.1"])
    assert code == 1 and err.startswith("FAILED sphere-check")


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SHIFTCONV_OUTPUT_DIR", str(tmp_path))
    assert run(["kloosterman", "--m", "1", "--n", "1", "--c", "7", "--emit", "plotdata"]) == 0
    assert capsys.readouterr().out == ""
    assert (tmp_path / "kloosterman.dat").read_text().startswith("#")


def test_out_flag(tmp_path, capsys):
    p = tmp_path / "g.txt"
    assert run(["gauss", "--q", "9", "--out", str(p)]) == 0
    assert p.read_text() and capsys.readouterr().out == ""


def test_check_golden(capsys):
    code, _, err = out(capsys, ["lemma52-sweep", "--seed", "1", "--p-max", "31", "--check-golden"])
    assert code == 0, err


def test_ingest_validate(tmp_path, capsys):
    p = tmp_path / "a.txt"
    p.write_text("# n_min=1 n_max=2\n1,1\n2,2\n")
    assert run(["ingest-validate", "--path", str(p)]) == 0
    p.write_text("# n_min=1 n_max=3\n1,1\n3,2\n")
    assert run(["ingest-validate", "--path", str(p)]) != 0
    capsys.readouterr()
