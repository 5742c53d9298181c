import json

import numpy as np
import pytest

from rotstokes import cli, fieldfile
from rotstokes.errors import ConvergenceError
from rotstokes.fields import BoundaryTrace


def run(*args):
    return cli.main(list(args))


def test_no_command_is_usage_error(capsys):
    assert run() == 2
    capsys.readouterr()


def test_roots_writes_tables_deterministically(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("roots", "--sweep", "64", "--out", str(a)) == 0
    assert run("roots", "--sweep", "64", "--out", str(b)) == 0
    capsys.readouterr()
    for name in ("roots_residuals.csv", "roots_summary.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    rows = (a / "roots_residuals.csv").read_text().splitlines()
    assert rows[0] == "modulus,branch,product,gap,sextic,max"
    assert len(rows) == 65
    assert "overall: pass" in (a / "roots_summary.txt").read_text()


def test_verify_single_suite(tmp_path, capsys):
    out = tmp_path / "v"
    assert run("verify", "--suite", "roots", "--seed", "7", "--out", str(out)) == 0
    text = capsys.readouterr().out
    assert "overall: pass" in text
    assert (out / "verify_roots.csv").exists()
    assert (out / "verify_summary.txt").exists()


def test_verify_repeat_runs_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("verify", "--suite", "halfspace", "--seed", "7", "--out", str(out)) == 0
    capsys.readouterr()
    assert (a / "verify_summary.txt").read_bytes() == (b / "verify_summary.txt").read_bytes()
    assert (a / "verify_halfspace.csv").read_bytes() == (b / "verify_halfspace.csv").read_bytes()


def test_solve_halfspace_mode_boundary(tmp_path, capsys):
    out = tmp_path / "h"
    rc = run(
        "solve-halfspace",
        "--n-h", "16",
        "--boundary", "builtin:mode:1,2",
        "--levels", "0,0.5",
        "--out", str(out),
    )
    capsys.readouterr()
    assert rc == 0
    data = fieldfile.read_field(out / "halfspace_field.scfield")
    assert data.components == ("u1", "u2", "u3", "p")
    assert data.values.shape == (4, 16, 16, 2)
    # level 0 of the field reproduces the requested trace
    x = np.arange(16) * (2.0 * np.pi / 16)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    want = np.cos(xx + 2 * yy)
    np.testing.assert_allclose(data.values[0, :, :, 0], want, atol=1e-10)
    report = (out / "halfspace_report.txt").read_text()
    assert "overall: pass" in report


def test_solve_halfspace_file_boundary(tmp_path, capsys):
    src = tmp_path / "trace.scfield"
    fieldfile.write_field(src, fieldfile.trace_to_field(BoundaryTrace.random(16, 2.0 * np.pi, seed=5)))
    out = tmp_path / "h"
    rc = run("solve-halfspace", "--n-h", "16", "--boundary", str(src), "--out", str(out))
    capsys.readouterr()
    assert rc == 0
    # resolution mismatch between the file and n_h is a config error
    assert run("solve-halfspace", "--n-h", "32", "--boundary", str(src)) == 2


def test_dtn_table(tmp_path, capsys):
    out = tmp_path / "d"
    assert run("dtn", "--table", "asymptotics", "--out", str(out)) == 0
    capsys.readouterr()
    rows = (out / "dtn_asymptotics.csv").read_text().splitlines()
    assert rows[0] == "check,reference,measured,gate,status"
    assert len(rows) == 5
    assert all(row.endswith("pass") for row in rows[1:])
    assert run("dtn", "--table", "bogus", "--out", str(out)) == 2


def test_kernels_small_grid(tmp_path, capsys):
    out = tmp_path / "k"
    rc = run(
        "kernels",
        "--n-h", "256",
        "--period", "50",
        "--gate", "-1.5",
        "--out", str(out),
    )
    capsys.readouterr()
    assert rc == 0
    rows = (out / "kernel_exponents.csv").read_text().splitlines()
    assert len(rows) == 8  # header + psi1/2, rem1..4, highfreq
    env = (out / "kernel_envelopes.csv").read_text().splitlines()
    assert env[0].startswith("radius,psi1,psi2,")


def test_solve_channel_flat_and_bumpy(tmp_path, capsys):
    out = tmp_path / "c"
    rc = run(
        "solve-channel",
        "--n-h", "8",
        "--n-v", "9",
        "--omega", "flat",
        "--boundary", "builtin:uniform",
        "--out", str(out),
    )
    capsys.readouterr()
    assert rc == 0
    vel = fieldfile.read_field(out / "channel_velocity.scfield")
    assert vel.values.shape == (3, 8, 8, 9)
    assert "method direct-flat" in (out / "channel_report.txt").read_text()

    rc = run(
        "solve-channel",
        "--n-h", "8",
        "--n-v", "9",
        "--omega", "builtin:cosine",
        "--amplitude", "0.2",
        "--seed", "2",
        "--out", str(out),
    )
    capsys.readouterr()
    assert rc == 0
    report = (out / "channel_report.txt").read_text()
    assert "gmres iterations" in report
    assert "overall: pass" in report


def test_solve_channel_repeat_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        rc = run(
            "solve-channel",
            "--n-h", "8",
            "--n-v", "9",
            "--omega", "builtin:random",
            "--amplitude", "0.1",
            "--seed", "9",
            "--out", str(out),
        )
        assert rc == 0
        outs.append(out)
    capsys.readouterr()
    for name in ("channel_velocity.scfield", "channel_pressure.scfield", "channel_report.txt"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_config_file_layering(tmp_path, capsys):
    cfgpath = tmp_path / "run.json"
    cfgpath.write_text(
        json.dumps({"n_h": 8, "n_v": 9, "omega": "builtin:cosine", "amplitude": 0.3})
    )
    out = tmp_path / "o"
    # flag overrides the file value
    rc = run(
        "solve-channel",
        "--config", str(cfgpath),
        "--amplitude", "0.05",
        "--out", str(out),
    )
    capsys.readouterr()
    assert rc == 0
    assert "amplitude=0.05" in (out / "channel_report.txt").read_text()


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run("roots", "--config", str(bad)) == 2
    bad.write_text(json.dumps({"weird": 1}))
    assert run("roots", "--config", str(bad)) == 2
    bad.write_text(json.dumps({"period": "ten"}))
    assert run("roots", "--config", str(bad)) == 2
    assert run("roots", "--config", str(tmp_path / "missing.json")) == 2
    assert run("solve-channel", "--n-v", "10") == 2
    assert run("solve-channel", "--omega", "builtin:sawtooth") == 2
    assert run("solve-halfspace", "--boundary", "builtin:mode:x,y") == 2
    assert run("verify", "--suite", "nonsense") == 2


def test_solver_failure_exit_code(tmp_path, monkeypatch, capsys):
    def blow_up(*args, **kwargs):
        raise ConvergenceError("budget exhausted")

    monkeypatch.setattr(cli, "solve_channel_bumpy", blow_up)
    rc = run(
        "solve-channel",
        "--n-h", "8",
        "--n-v", "9",
        "--omega", "builtin:cosine",
        "--out", str(tmp_path / "x"),
    )
    err = capsys.readouterr().err
    assert rc == 3
    assert "solver error" in err
