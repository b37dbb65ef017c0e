import json

import numpy as np
import pytest

from mtsolve.cli import main
from mtsolve.instances import pair_tensor
from mtsolve.oracle import verify_solution


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_codes(capsys, files, tmp_path):
    code, out, _ = run(capsys, "check", files["pair1.tns"])
    assert code == 0 and "nonsingular-M" in out
    code, out, _ = run(capsys, "check", files["no_max.tns"], "--json")
    assert code == 2 and json.loads(out)["classification"] == "Z-not-nonsingular-M"
    notz = tmp_path / "notz.tns"
    notz.write_text("tns 3 2 3\n1 1 1 1\n2 2 2 1\n1 2 2 0.5\n")
    assert run(capsys, "check", str(notz))[0] == 3
    bad = tmp_path / "bad.tns"
    bad.write_text("tns 3 two 1\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 64 and "bad.tns:1" in err


def test_solve_min_max(capsys, files):
    code, out, _ = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "min", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["x"] == [0.0, 1.0]
    assert rep["reduction"]["k0"] == 1 and rep["reduction"]["I"] == [1]
    code, out, _ = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "max", "--x0", "auto", "--json")
    rep = json.loads(out)
    assert code == 0 and np.allclose(rep["x"], [2.0, 1.0], atol=1e-10)
    assert verify_solution(pair_tensor(1), [0.0, 1.0], rep["x"], 1e-9)


def test_solve_text_output(capsys, files):
    code, out, _ = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "min")
    assert code == 0 and "status: converged" in out


def test_solve_trace_and_rate(capsys, files):
    code, out, err = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "max", "--json", "--trace", "--rate")
    rep = json.loads(out)
    lines = err.strip().splitlines()
    assert len(lines) == rep["iterations"]
    assert [int(l.split()[0]) for l in lines] == list(range(1, rep["iterations"] + 1))
    assert rep["rate"]["rho"] == pytest.approx(2 / 3, abs=1e-6)


def test_solve_no_maximal_refused(capsys, files):
    code, _, err = run(capsys, "solve", files["no_max.tns"], files["b001.vec"], "--mode", "max")
    assert code == 5


def test_solve_usage_errors(capsys, files, tmp_path):
    vec = tmp_path / "x0.vec"
    vec.write_text("vec 2\n3 1\n")
    assert run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "min", "--x0", str(vec))[0] == 64
    assert run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "max", "--x0", "zero")[0] == 64
    assert run(capsys, "solve", files["pair1.tns"], files["b001.vec"])[0] == 64
    with pytest.raises(SystemExit) as info:
        main(["solve", files["pair1.tns"]])
    assert info.value.code == 64
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 64


def test_solve_explicit_x0(capsys, files, tmp_path):
    vec = tmp_path / "x0.vec"
    vec.write_text("vec 2\n3 1\n")
    code, out, _ = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "max", "--x0", str(vec), "--json")
    assert code == 0 and np.allclose(json.loads(out)["x"], [2, 1])


def test_solve_max_iter_code(capsys, files):
    assert run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "max", "--max-iter", "3")[0] == 6


def test_solve_pos(capsys, files):
    code, out, _ = run(capsys, "solve", files["pair1.tns"], files["b11.vec"], "--mode", "pos", "--json")
    assert code == 0 and all(v > 0 for v in json.loads(out)["x"])
    code, _, _ = run(capsys, "solve", files["pair1.tns"], files["b01.vec"], "--mode", "pos")
    assert code == 5


def test_enumerate(capsys, files):
    code, out, _ = run(capsys, "enumerate", files["pair2.tns"], files["b0101.vec"])
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 4
    code, out, _ = run(capsys, "enumerate", files["pair1.tns"], files["b11.vec"])
    assert json.loads(out)["count"] == 1
    code, out, _ = run(capsys, "enumerate", files["no_max.tns"], files["b001.vec"])
    assert [2] in json.loads(out)["degenerate_patterns"]
    assert run(capsys, "enumerate", files["pair2.tns"], files["b0101.vec"], "--limit", "3")[0] == 64


def test_rate(capsys, files):
    code, out, _ = run(capsys, "rate", files["pair1.tns"], files["b01.vec"], "--mode", "max")
    rep = json.loads(out)
    assert code == 0 and rep["rho"] == pytest.approx(2 / 3, abs=1e-6)
    assert rep["conditions"]["d"] == "holds"
    code, out, _ = run(capsys, "rate", files["pair1.tns"], files["b11.vec"], "--splitting", "jacobi")
    assert json.loads(out)["conditions"]["a"] == "holds"


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
