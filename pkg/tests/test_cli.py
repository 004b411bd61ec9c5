import csv
import math
import re

import numpy as np
import pytest

from pdmeasure.cli import main
from pdmeasure.measurement import preset
from pdmeasure.randgen import random_ket
from pdmeasure.specfile import format_spec

E0 = (2 / 3) * math.log2(3 / 2) + (1 / 3) * math.log2(3)
PI = repr(math.pi)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def state_line(v):
    return ",".join(f"{x:.17g}" for c in v for x in (c.real, c.imag)) + "\n"


def matrix_block(out, title, dim):
    lines = out.splitlines()
    start = lines.index(title + ":") + 1
    rows = []
    for line in lines[start:start + dim]:
        pairs = re.findall(r"\(([^,]+),([^)]+)\)", line)
        rows.append([float(a) + 1j * float(b) for a, b in pairs])
    return np.array(rows)


# -- fig2 / fig3 ----------------------------------------------------------------


def test_fig2_rows(tmp_path):
    out = tmp_path / "fig2.csv"
    assert main(["fig2", "--s", "0", "1.2", PI, "--q", "0", "0.7978", "1", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["s", "q", "E_bits"]
    assert len(rows) == 9
    table = {(round(float(r["s"]), 9), float(r["q"])): float(r["E_bits"]) for r in rows}
    pi = round(math.pi, 9)
    assert abs(table[(pi, 1.0)] - 0.918296) < 1e-4
    assert abs(table[(pi, 0.7978)] - 1.0) < 1e-3
    for s in (0.0, 1.2, pi):
        assert abs(table[(s, 0.0)]) < 1e-12
    assert (tmp_path / "fig2.png").exists()


def test_fig2_csv_format_and_byte_stability(tmp_path):
    args = ["fig2", "--theta-nodes", "24", "--phi-nodes", "12", "--s-steps", "3", "--q-steps", "4", "--no-figure"]
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--workers", "2"]) == 0
    data = a.read_bytes()
    assert data == b.read_bytes() == c.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    first = data.decode().splitlines()[2].split(",")
    assert all(len(re.sub(r"[-.]|e.*", "", v).lstrip("0")) <= 12 for v in first)
    assert not (tmp_path / "a.png").exists()


def test_fig2_stdout(capsys):
    assert main(["fig2", "--theta-nodes", "8", "--phi-nodes", "4", "--s-steps", "2", "--q-steps", "2", "--out", "-"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("s,q,E_bits\n") and len(out.splitlines()) == 5


def test_fig3_endpoints_and_monotone_meter(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["fig3", "--q-steps", "11", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["q", "I_A_bits", "I_B_bits"]
    i_a = [float(r["I_A_bits"]) for r in rows]
    i_b = [float(r["I_B_bits"]) for r in rows]
    assert abs(i_a[0]) < 1e-6 and abs(i_b[0] - 1) < 1e-3
    assert abs(i_a[-1] - 0.0817) < 5e-3 and abs(i_b[-1] - 0.874) < 5e-3
    # turning point of I_B sits at the q = 1 end of the grid
    assert all(b1 < b0 for b0, b1 in zip(i_b, i_b[1:]))
    assert (tmp_path / "fig3.png").exists()


def test_unwritable_output(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    assert main(["fig3", "--q", "0.5", "--theta-nodes", "8", "--phi-nodes", "4", "--out", str(bad)]) == 3


def test_validation_reports_all_violations(capsys):
    code = main(["fig2", "--theta-nodes", "1", "--s-steps", "0", "--q", "1.5", "--workers", "0"])
    assert code == 1
    err = capsys.readouterr().err
    for flag in ("--theta-nodes", "--s-steps", "--q", "--workers"):
        assert flag in err


def test_argparse_error_is_validation_error():
    assert main(["fig2", "--theta-nodes", "many"]) == 1
    assert main(["nonsense"]) == 1


# -- measure / povm-check / p1 -----------------------------------------------------


PLUS = state_line(np.array([1, 1]) / math.sqrt(2))


def test_measure_projective_plus(tmp_path, capsys):
    spec = write(tmp_path, "p.spec", format_spec(preset("projective", 2)))
    state = write(tmp_path, "plus.state", PLUS)
    assert main(["measure", "--spec", spec, "--state", state, "--dephasing", "dequantized"]) == 0
    out = capsys.readouterr().out
    assert "outcome_distribution: 0.5 0.5" in out


def test_measure_entangling_plus_is_one_ebit(tmp_path, capsys):
    spec = write(tmp_path, "e.spec", format_spec(preset("entangling", 2)))
    state = write(tmp_path, "plus.state", PLUS)
    assert main(["measure", "--spec", spec, "--state", state]) == 0
    out = capsys.readouterr().out
    assert re.search(r"entanglement_bits: 1(\.0+)?$", out, re.M)


def test_measure_complete_transfer(tmp_path, capsys, rng):
    psi = random_ket(2, rng)
    spec = write(tmp_path, "t.spec", format_spec(preset("complete-transfer", 2)))
    state = write(tmp_path, "psi.state", state_line(psi))
    assert main(["measure", "--spec", spec, "--state", state]) == 0
    meter = matrix_block(capsys.readouterr().out, "meter_state", 2)
    assert np.abs(meter - np.outer(psi, psi.conj())).max() < 1e-10


def test_measure_errors(tmp_path, capsys):
    state = write(tmp_path, "plus.state", PLUS)
    bad = write(tmp_path, "bad.spec", "dim = 2\nentry = 1 ; 1,0,0,0 ; 1,0,0,0\nentry = 1 ; 0,0,1 ; 0,0,1,0\n")
    assert main(["measure", "--spec", bad, "--state", state]) == 1
    assert "line 3" in capsys.readouterr().err
    incomplete = write(tmp_path, "inc.spec", "dim = 2\nentry = 1 ; 1,0,0,0 ; 1,0,0,0\nentry = 0.5 ; 0,0,1,0 ; 0,0,1,0\n")
    assert main(["measure", "--spec", incomplete, "--state", state]) == 1
    assert "completeness deviation 5.000e-01" in capsys.readouterr().err
    assert main(["measure", "--spec", str(tmp_path / "nope.spec"), "--state", state]) == 3
    good = write(tmp_path, "g.spec", format_spec(preset("entangling", 2)))
    assert main(["measure", "--spec", good, "--state", str(tmp_path / "nope.state")]) == 3


def test_povm_check(tmp_path, capsys):
    text = "dim = 2\nentry = 1 ; 1,0,0,0 ; 1,0,0,0\nentry = 1.000000001 ; 0,0,1,0 ; 0,0,1,0\n"
    spec = write(tmp_path, "s.spec", text)
    assert main(["povm-check", "--spec", spec]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["povm-check", "--spec", spec, "--tol", "1e-12"]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_p1_command(capsys):
    assert main(["p1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "q,p1_closed,p1_quadrature,abs_diff"
    assert lines[1].startswith("0,1,") and lines[-1].startswith("1,0.333333333333,")
    assert main(["p1", "--q", "0.5", "--tol", "1e-20"]) == 2


# -- verify ------------------------------------------------------------------------


def test_verify_default_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 10


def test_verify_target(capsys):
    assert main(["verify", "--q", "0.7978", "--target-e", "1.0"]) == 0
    assert "PASS target_entanglement" in capsys.readouterr().out


def test_verify_injected_bad_tolerance(capsys):
    assert main(["verify", "--tol", "1e-300"]) == 2
    assert "FAIL" in capsys.readouterr().out
    assert main(["verify", "--tol", "-1"]) == 1
    assert main(["verify", "--target-e", "1.0"]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "pdmeasure", "p1", "--q", "0.5"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.766666666667" in res.stdout
