import numpy as np
from click.testing import CliRunner

from projsqueeze.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_metric_dist_output():
    res = run("metric", "--body", "ball2", "--p", "0,0", "--q", "0.5,0",
              "--dist")
    assert res.exit_code == 0
    assert np.isclose(float(res.output.strip()), np.log(3.0))


def test_metric_f_output():
    res = run("metric", "--body", "ball2", "--p", "0,0", "--x", "1,0", "--f")
    assert res.exit_code == 0
    assert np.isclose(float(res.output.strip()), 2.0)


def test_metric_full_output():
    res = run("metric", "--body", "square", "--p", "0,0", "--q", "0.3,0.1",
              "--x", "1,0")
    assert res.exit_code == 0
    assert "F = " in res.output
    assert "hilbert = " in res.output
    assert "P+ = " in res.output


def test_metric_dist_requires_q():
    res = run("metric", "--body", "ball2", "--p", "0,0", "--dist")
    assert res.exit_code == 2


def test_spec_error_exit_code(tmp_path):
    bad = tmp_path / "bad.body"
    bad.write_text("type = polytope\n[A]\n1 0\n-1 0\nb = 1 oops\n")
    res = run("metric", "--body", str(bad), "--p", "0,0", "--x", "1,0")
    assert res.exit_code == 2
    assert "line 5" in res.output


def test_precondition_exit_code():
    res = run("squeeze", "--body", "square", "--z", "3,0", "--budget", "0")
    assert res.exit_code == 3
    assert "precondition" in res.output


def test_squeeze_output():
    res = run("squeeze", "--body", "square", "--z", "0,0", "--budget", "0")
    assert res.exit_code == 0
    lower = float(res.output.splitlines()[0].split("=")[1])
    assert np.isclose(lower, 1.0 / np.sqrt(2.0), atol=1e-9)
    assert "witness matrix:" in res.output


def test_validate_output():
    res = run("validate", "--spec", "triangle")
    assert res.exit_code == 0
    assert res.output.startswith("ok: HalfspacePolytope dim=2")


def test_exp_writes_and_verifies_csv(tmp_path):
    out = tmp_path / "gap.csv"
    res = run("exp", "gap-scan", "--samples", "2", "--points", "2",
              "--budget", "0", "--out", str(out))
    assert res.exit_code == 0
    assert "wrote 4 rows" in res.output
    text = out.read_text()
    assert text.startswith("experiment,spec_hash,seed")

    res = run("exp", "gap-scan", "--samples", "2", "--points", "2",
              "--budget", "0", "--out", str(out), "--verify", "2")
    assert res.exit_code == 0
    assert "row 2 verified" in res.output

    out.write_text(text.replace("gap_scan", "gap_scam"))
    res = run("exp", "gap-scan", "--samples", "2", "--points", "2",
              "--budget", "0", "--out", str(out), "--verify", "2")
    assert res.exit_code == 1
    assert "MISMATCH" in res.output


def test_exp_streams_csv_to_stdout():
    res = run("exp", "orbit", "--budget", "0")
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0].startswith("experiment,spec_hash,seed,j")
    assert len(lines) == 9


def test_help_lists_commands():
    res = run("--help")
    assert res.exit_code == 0
    for name in ("metric", "squeeze", "exp", "validate", "serve"):
        assert name in res.output
