import csv

import pytest

from qcmdpc.cli import EXIT_DECODE_FAILURE, main


def run(*argv):
    return main([str(a) for a in argv])


def test_keygen_encrypt_decrypt_roundtrip(tmp_path, capsys):
    assert run("keygen", "--preset", "toy", "--seed", 1, "--out", tmp_path / "k") == 0
    assert (tmp_path / "k.priv").read_text().startswith("qcmdpc-private 1202 601 30 11")
    assert (tmp_path / "k.pub").read_text().startswith("qcmdpc-public 1202 601 30 11")
    msg = tmp_path / "m.hex"
    assert run("encrypt", "--key", tmp_path / "k.pub", "--seed", 3, "--message-out", msg,
               "--out", tmp_path / "ct") == 0
    assert (tmp_path / "ct").read_text().startswith("qcmdpc-ct 1202\n")
    assert run("decrypt", "--key", tmp_path / "k.priv", "--in", tmp_path / "ct", "--out", tmp_path / "pt") == 0
    assert (tmp_path / "pt").read_text() == msg.read_text()


def test_encrypt_given_message(tmp_path, capsys):
    run("keygen", "--preset", "toy", "--seed", 2, "--out", tmp_path / "k")
    hexmsg = "ab" * 75 + "01"
    assert run("encrypt", "--key", tmp_path / "k.pub", "--message", hexmsg, "--out", tmp_path / "ct") == 0
    capsys.readouterr()
    assert run("decrypt", "--key", tmp_path / "k.priv", "--in", tmp_path / "ct", "--variant", "maxdelta",
               "--update", "flip", "--max-iters", 20) == 0
    assert capsys.readouterr().out.strip() == hexmsg


def test_decrypt_failure_exit_status(tmp_path, capsys):
    run("keygen", "--preset", "toy", "--seed", 1, "--out", tmp_path / "k")
    run("encrypt", "--key", tmp_path / "k.pub", "--error-weight", 100, "--out", tmp_path / "ct")
    status = run("decrypt", "--key", tmp_path / "k.priv", "--in", tmp_path / "ct")
    assert status == EXIT_DECODE_FAILURE
    assert "failed" in capsys.readouterr().err


def test_simulate_and_report(tmp_path, capsys):
    rule = tmp_path / "step.txt"
    assert run("tune", "--preset", "toy", "--codes", 1, "--trials", 40, "--sweeps", 1, "--out", rule,
               "--report", tmp_path / "tune.csv") == 0
    assert rule.read_text().startswith("qcmdpc-stepfn 601 30")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("simulate", "--preset", "toy", "--codes", 2, "--trials", 50, "--rule", rule,
               "--trace", tmp_path / "trace.csv", "--out", a) == 0
    assert run("simulate", "--preset", "toy", "--codes", 2, "--trials", 50, "--variant", "fixed",
               "--thresholds", "10,9,8", "--update", "flip", "--constant-time", "--out", b) == 0
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["iterations", "count", "proportion"] and rows[-1][0] == "inf"
    trace = list(csv.reader((tmp_path / "trace.csv").open()))
    assert trace[0][:2] == ["instance_id", "iter"]
    capsys.readouterr()
    assert run("report", "--in", a, "--in", b, "--out", tmp_path / "merged.csv") == 0
    out = capsys.readouterr().out
    assert "a" in out.splitlines()[0] and "b" in out.splitlines()[0]
    merged = list(csv.reader((tmp_path / "merged.csv").open()))
    assert merged[0] == ["iterations", "a", "b"]


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        run("simulate", "--variant", "nope")
    assert run("simulate", "--params", "98,49,6,3", "--codes", 1, "--trials", 1) == 1
    assert "no bundled step function" in capsys.readouterr().err
    assert run("decrypt", "--key", tmp_path / "missing", "--in", tmp_path / "ct") == 1
    assert run("simulate", "--preset", "toy", "--variant", "fixed", "--codes", 1, "--trials", 1) == 1
