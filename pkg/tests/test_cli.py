import subprocess
import sys

import pytest

from oddcycle.cli import main
from oddcycle.protocol.actors import ROUND_LOG_HEADER

from netrun import run_four_processes


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_even_n_rejected(capsys):
    code, _, err = run(["play", "--n", "4"], capsys)
    assert code == 1 and "n must be odd" in err


@pytest.mark.parametrize("args, field", [
    (["play", "--n", "3", "--rounds", "-5"], "--rounds"),
    (["play", "--n", "3", "--visibility", "1.5"], "--visibility"),
    (["play", "--n", "3", "--readout-error", "0.7"], "--readout-error"),
    (["play", "--n", "3", "--seed", "-1"], "--seed"),
    (["play", "--n", "3", "--visibility", "0.9", "--target-ratio", "0.97"], "visibility"),
    (["sweep", "--n-range", "3:8"], "odd"),
    (["play", "--n", "3", "--strategy", "psychic"], "strategy"),
])
def test_validation(args, field, capsys):
    code, _, err = run(args, capsys)
    assert code == 1 and field in err


def test_play_output(capsys, tmp_path):
    log = tmp_path / "rounds.csv"
    code, out, _ = run(["play", "--n", "3", "--rounds", "500", "--seed", "4", "--log", str(log)], capsys)
    assert code == 0 and "omega_hat=" in out and "sigma_above_classical=" in out
    lines = log.read_text().splitlines()
    assert lines[0] == ROUND_LOG_HEADER and len(lines) == 501


def test_play_zero_rounds(capsys):
    code, out, _ = run(["play", "--n", "3", "--rounds", "0"], capsys)
    assert code == 0 and "undefined" in out


def test_sweep_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["sweep", "--n-range", "3:9", "--rounds", "2000", "--seed", "5", "--target-ratio", "0.978",
                    "--out", str(path)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert rows[0] == "n,strategy,omega_hat,se,omega_c,omega_q,ratio"
    assert len(rows) == 1 + 4 * 2
    c = tmp_path / "c.csv"
    run(["sweep", "--n-range", "3:9", "--rounds", "2000", "--seed", "6", "--target-ratio", "0.978",
         "--out", str(c)], capsys)
    assert c.read_bytes() != a.read_bytes()


def test_bell_output(capsys, tmp_path):
    report = tmp_path / "bell.txt"
    code, out, _ = run(["bell", "--n-range", "3:5", "--rounds", "5000", "--seed", "2",
                        "--report", str(report)], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,omega_hat,se,pnl,pnl_err" and len(lines) == 4
    assert "chsh_pnl=0.414214" in lines[-1]
    text = report.read_text()
    assert "pnl_raw=" in text and "chsh_pnl=0.414213562" in text


def test_bounds_output(capsys, tmp_path):
    code, out, _ = run(["bounds", "--n-range", "3:15"], capsys)
    rows = out.splitlines()
    assert code == 0 and rows[0].startswith("n,alpha,theta,alpha_star") and len(rows) == 8
    assert rows[1].startswith("3,5,5.598076")
    code, out, _ = run(["bounds", "--n-range", "11:15", "--out", str(tmp_path / "b.csv")], capsys)
    assert "closed form" in out and "computed" in out


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nn = 5\nrounds = 300\nstrategy = classical\n")
    code, out, _ = run(["--config", str(cfg), "play"], capsys)
    assert code == 0 and "n=5 strategy=classical" in out and "rounds=300" in out
    code, out, _ = run(["--config", str(cfg), "play", "--n", "7"], capsys)
    assert "n=7" in out
    cfg.write_text("colour=red\n")
    assert run(["--config", str(cfg), "play", "--n", "3"], capsys)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oddcycle", "play", "--n", "6"], capture_output=True, text=True)
    assert proc.returncode == 1 and "n must be odd" in proc.stderr


def test_networked_processes(tmp_path):
    log = tmp_path / "net.csv"
    out, codes, count = run_four_processes(3, 300, seed=9, log_path=log)
    assert count == 4 and codes == [0, 0, 0, 0]
    assert "rounds=300 incomplete=0 aborted=0" in out
    assert log.read_text().splitlines()[0] == ROUND_LOG_HEADER
