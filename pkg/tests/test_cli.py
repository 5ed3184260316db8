import io
import json
import subprocess
import sys

import numpy as np
import pytest

from majorization import cli, quantum


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_detect_werner_t1():
    code, out, _ = run("detect", "--detector", "t1", "--measurement", "bell", "--werner", "d=2,q=0.5")
    assert code == cli.EXIT_ENTANGLED
    assert "verdict: Entangled" in out
    assert "lhs: 0.625 0.125 0.125 0.125" in out
    assert "violated at index 1, margin 0.125" in out


def test_detect_inconclusive_exit_zero():
    code, out, _ = run("detect", "--detector", "t1", "--werner", "d=3,q=0.2")
    assert code == cli.EXIT_INCONCLUSIVE
    assert "verdict: Inconclusive" in out


@pytest.mark.parametrize(
    "det,q,expect",
    [("t2", 0.6, 3), ("t2", 0.5, 0), ("t3", 0.5, 3), ("c1:shannon", 0.9, 3), ("c1:tsallis:inf", 0.34, 3),
     ("c2:tsallis:2", 0.95, 3), ("c3:renyi:2", 0.2, 0)],
)
def test_detect_variants(det, q, expect):
    code, _, _ = run("detect", "--detector", det, "--werner", f"d=2,q={q}")
    assert code == expect


def test_detect_state_file(tmp_path):
    path = tmp_path / "w.json"
    quantum.save_state(quantum.werner(2, 0.5), path)
    code, out, _ = run("detect", "--detector", "t3", "--state", str(path))
    assert code == 3


def test_detect_eigenbasis_uses_optimizer_bound(rng, tmp_path):
    path = tmp_path / "p.json"
    a, b = quantum.random_density((2,), rng), quantum.random_density((2,), rng)
    quantum.save_state(quantum.tensor(a, b), path)
    code, out, _ = run("detect", "--detector", "t1", "--measurement", "eigenbasis", "--state", str(path), "--restarts", "8")
    assert code == 0


def test_detect_measurement_file(tmp_path):
    povm = quantum.rank_one_povm(quantum.bell_basis(2))
    doc = {"label": "b", "elements": [{"re": e.real.tolist(), "im": e.imag.tolist()} for e in povm.elements]}
    mpath = tmp_path / "m.json"
    mpath.write_text(json.dumps(doc))
    code, out, _ = run("detect", "--detector", "t1", "--measurement", "file", "--measurement-file", str(mpath),
                       "--werner", "d=2,q=0.5", "--restarts", "8")
    assert code == 3
    assert "bound: 0.5 0.5 0 0" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["detect"],
        ["detect", "--detector", "t9", "--werner", "d=2,q=0.5"],
        ["detect", "--detector", "c1", "--werner", "d=2,q=0.5"],
        ["detect", "--detector", "c1:bogus:2", "--werner", "d=2,q=0.5"],
        ["detect", "--detector", "t1", "--werner", "d=2,q=1.5"],
        ["detect", "--detector", "t1"],
        ["detect", "--detector", "t2", "--werner", "d=3,q=0.5"],
        ["werner-scan", "--d", "5..2"],
        ["werner-scan", "--orders", "0.5"],
        ["bound", "--measurement", "bell"],
        ["nonsense"],
    ],
)
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == cli.EXIT_USAGE
    assert err


def test_invalid_input_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dims": [2], "matrix_re": [[2, 0], [0, 0]]}')
    assert run("detect", "--detector", "t3", "--state", str(bad))[0] == cli.EXIT_BAD_INPUT
    assert run("detect", "--detector", "t3", "--state", str(tmp_path / "missing.json"))[0] == cli.EXIT_BAD_INPUT
    bad.write_text("garbage")
    assert run("spectrum-estimate", "--state", str(bad))[0] == cli.EXIT_BAD_INPUT


def test_werner_scan_csv(tmp_path):
    out_path = tmp_path / "fig.csv"
    code, out, _ = run("werner-scan", "--d", "2..3", "--orders", "1,2,5,inf", "--out", str(out_path))
    assert code == 0 and out == ""
    data = out_path.read_bytes()
    assert b"\r" not in data
    lines = data.decode().splitlines()
    assert lines[0] == "d,order,q_star,method"
    assert len(lines) == 9
    assert lines[2] == "2,2,0.577350269246,bisection"
    assert lines[4] == "2,inf,0.333333333333,analytic"


def test_scan_is_deterministic():
    assert run("werner-scan", "--d", "2..4")[1] == run("werner-scan", "--d", "2..4")[1]


def test_bound_commands():
    code, out, _ = run("bound", "--measurement", "bell", "--d", "2", "--separable", "--restarts", "4")
    assert code == 0 and "bound: 0.5 0.5 0 0" in out
    code, out, _ = run("bound", "--restarts", "8")
    first = float(out.split("bound: ")[1].split()[0])
    assert first == pytest.approx((1 + 1 / np.sqrt(3)) ** 3 / 8, abs=1e-6)


def test_spectrum_estimate():
    code, out, _ = run("spectrum-estimate", "--werner", "d=2,q=0.5", "--restarts", "4")
    assert code == 0
    assert "estimated: 0.625 0.125 0.125 0.125" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "majorization", "detect", "--detector", "t1", "--werner", "d=2,q=0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert "Entangled" in proc.stdout
