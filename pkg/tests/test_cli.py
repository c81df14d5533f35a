"""CLI thin client: file output, config precedence, determinism, exit codes."""

import json
import subprocess
import sys

import pytest

from guejump.cli import main
from guejump.io_utils import parse_csv


def run_cli(args, **kw):
    return main(args)


def test_recurrence_writes_csv(tmp_path):
    out = tmp_path / "table.csv"
    code = run_cli(["recurrence", "--s1", "0.3", "--s2", "1.1", "--w1", "0.4",
                    "--w2", "0.7", "--n", "10", "--out", str(out)])
    assert code == 0
    meta, columns, rows = parse_csv(out.read_text())
    assert columns == ["n", "alpha", "beta2", "gamma", "log_hankel"]
    assert len(rows) == 10
    assert any(line.startswith("# command = recurrence") for line in meta)


def test_csv_round_trips_to_json_values(tmp_path):
    csv_out = tmp_path / "t.csv"
    json_out = tmp_path / "t.json"
    args = ["recurrence", "--s1", "0.3", "--s2", "1.1", "--w1", "0.4",
            "--w2", "0.7", "--n", "6"]
    assert run_cli(args + ["--out", str(csv_out)]) == 0
    assert run_cli(args + ["--out", str(json_out), "--format", "json"]) == 0
    _, _, rows = parse_csv(csv_out.read_text())
    jrows = json.loads(json_out.read_text())["rows"]
    for csv_row, json_row in zip(rows, jrows):
        for a, b in zip(csv_row[1:], json_row[1:]):
            assert float(a) == float(b)  # 17-digit serialization round-trips


def test_byte_identical_reruns(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    args = ["mc-gap", "--n", "30", "--s1", "7.0", "--s2", "8.0",
            "--samples", "10000", "--seed", "42"]
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"s1": 0.3, "s2": 1.1, "omega1": 0.4,
                               "omega2": 0.7, "n": 5}))
    out = tmp_path / "o.csv"
    # config supplies everything; the flag overrides n
    assert run_cli(["recurrence", "--config", str(cfg), "--n", "7",
                    "--out", str(out)]) == 0
    meta, _, rows = parse_csv(out.read_text())
    assert len(rows) == 7
    assert any(line == "# n = 7" for line in meta)


def test_missing_required_parameter_exits_2(capsys):
    assert run_cli(["recurrence", "--s1", "0.3", "--s2", "1.1"]) == 2
    err = capsys.readouterr().err
    assert "--w1" in err and "--n" in err


def test_numerical_failure_exits_1_with_record(tmp_path, capsys):
    code = run_cli(["recurrence", "--s1", "-35", "--s2", "-34", "--w1", "0",
                    "--w2", "0", "--n", "5", "--out", str(tmp_path / "x.csv")])
    assert code == 1
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "loss-of-positivity"
    assert not (tmp_path / "x.csv").exists()


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_verify_thm1_exit_zero():
    assert run_cli(["verify-thm1", "--s1", "0.3", "--s2", "1.1", "--w1",
                    "0.4", "--w2", "0.7", "--n", "6"]) == 0


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("GUEJUMP_OUTPUT_DIR", str(tmp_path))
    assert run_cli(["fredholm-oracle", "--t1", "-1", "--t2", "0.5",
                    "--out", "f.csv"]) == 0
    assert (tmp_path / "f.csv").exists()


def test_stdout_when_no_out(capsys):
    assert run_cli(["fredholm-oracle", "--t1", "-1", "--t2", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "t1,t2,omega1,omega2,m_nodes,value" in out


def test_entry_point_installed():
    proc = subprocess.run([sys.executable, "-m", "guejump.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


SMOKE_ARGS = {
    "recurrence": ["--s1", "0.3", "--s2", "1.1", "--w1", "0.4", "--w2", "0.7",
                   "--n", "4"],
    "hankel": ["--s1", "0.3", "--s2", "1.1", "--w1", "0.4", "--w2", "0.7",
               "--n", "4"],
    "verify-thm1": ["--s1", "0.3", "--s2", "1.1", "--w1", "0.4", "--w2",
                    "0.7", "--n", "4"],
    "cpiv-residuals": ["--s1", "0.3", "--s2", "1.1", "--w1", "0.4", "--w2",
                       "0.7", "--n", "4"],
    "cpiv-scaling": ["--n", "16", "--t1", "-0.5", "--t2", "0.5", "--w1",
                     "0.4", "--w2", "0.7"],
    "cpii-solve": ["--w1", "0.4", "--w2", "0.7", "--s", "1.0", "--x-min",
                   "-1.0"],
    "gap-limit": ["--t1", "-1.0", "--t2", "0.0"],
    "conditional-limit": ["--t1", "-1.0", "--t2", "0.0", "--p", "0.5",
                          "--oracle", "none"],
    "tw": ["--t-min", "-2.0", "--t-max", "0.0", "--points", "3"],
    "hankel-asymptotics": ["--n", "16", "--t1", "-0.5", "--t2", "0.5",
                           "--w1", "0.4", "--w2", "0.7"],
    "op-asymptotics": ["--n", "16", "--t1", "-0.5", "--t2", "0.5", "--w1",
                       "0.4", "--w2", "0.7"],
    "mc-gap": ["--n", "20", "--s1", "5.5", "--s2", "7.0", "--samples",
               "10000", "--seed", "1"],
    "mc-conditional": ["--n", "20", "--x", "6.8", "--y", "6.0", "--p", "0.5",
                       "--samples", "10000", "--seed", "1"],
    "fredholm-oracle": ["--t1", "-1.0", "--t2", "0.5"],
}


@pytest.mark.parametrize("command", sorted(SMOKE_ARGS))
def test_every_subcommand_produces_a_table(command, tmp_path):
    out = tmp_path / f"{command}.csv"
    assert run_cli([command, *SMOKE_ARGS[command], "--out", str(out)]) == 0
    meta, columns, rows = parse_csv(out.read_text())
    assert columns and rows
    assert any(line.startswith(f"# command = {command}") for line in meta)
    # every emitted value reparses as a finite string token
    for row in rows:
        assert len(row) == len(columns)
