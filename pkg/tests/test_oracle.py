import ast
import math
from pathlib import Path

import numpy as np
import pytest

from pdmeasure import information as info
from pdmeasure import measurement as ms
from pdmeasure import oracle

E0 = (2 / 3) * math.log2(3 / 2) + (1 / 3) * math.log2(3)


def entropy(rho):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 0]
    return float(-(lam * np.log2(lam)).sum())


def test_oracle_imports_no_integration_code():
    tree = ast.parse(Path(oracle.__file__).read_text())
    imported = {
        node.module for node in ast.walk(tree) if isinstance(node, ast.ImportFrom) and node.module
    }
    assert imported <= {"__future__", "dataclasses", "measurement"}


def test_mc_depolarized_entropy():
    rho = oracle.mc_integrate_rho(math.pi, 1.0, 1_000_000, seed=7)
    assert abs(entropy(rho) - E0) < 3e-3


def test_mc_full_compression_is_exact():
    rho = oracle.mc_integrate_rho(1.0, 0.0, 10_000, seed=1)
    assert np.array_equal(rho, np.diag([1.0, 0.0]).astype(complex))


def test_mc_is_deterministic():
    a = oracle.mc_integrate_rho(0.4, 0.6, 20_000, seed=99)
    b = oracle.mc_integrate_rho(0.4, 0.6, 20_000, seed=99)
    assert a.tobytes() == b.tobytes()


def test_mc_rejects_small_samples():
    with pytest.raises(ValueError):
        oracle.mc_integrate_rho(0.4, 0.6, 100, seed=1)


@pytest.mark.parametrize("n, tol", [(1_000_000, 3e-3), (1_000_000 // 9, 9e-3)])
def test_mc_error_scales_as_inverse_sqrt(grid, n, tol):
    main = info.post_measurement_object_state(math.pi / 2, 0.5, grid).matrix
    assert np.abs(oracle.mc_integrate_rho(math.pi / 2, 0.5, n, seed=3) - main).max() < tol


def test_choi_coherent_and_dequantized():
    spec = ms.preset("entangling", 2)
    assert oracle.choi_cp_check(spec, np.ones((2, 2))).main >= -1e-12
    assert oracle.choi_cp_check(spec, np.eye(2)).main >= -1e-12


def test_choi_detects_invalid_dephasing():
    spec = ms.preset("entangling", 2)
    report = oracle.choi_cp_check(spec, np.array([[1, 1.5], [1.5, 1]]))
    assert report.main < -0.1
    assert not report.passed


def test_choi_dimension_limit(rng):
    from pdmeasure.randgen import random_overcomplete

    probes, weights = random_overcomplete(2, 5, rng)
    spec = ms.preset("soft", 2, probes=probes, weights=weights)
    with pytest.raises(ValueError):
        oracle.choi_cp_check(spec, np.eye(10))


def test_fine_grid_entanglement_converges_monotonically(grid):
    (report,) = oracle.fine_grid_reference(
        "entanglement", {"s": math.pi, "q": 0.7978}, info.entanglement(math.pi, 0.7978, grid)
    )
    seq = [float(tok.split(":")[1]) for tok in report.resolution.split()[1:]]
    gaps = [abs(1.0 - v) for v in seq]
    assert gaps[0] > gaps[1] > gaps[2]
    assert abs(report.oracle - 1.0) < 1e-3
    assert report.passed


def test_fine_grid_p1():
    (report,) = oracle.fine_grid_reference("p1", {"q": 0.5}, info.p1_closed_form(0.5), tol=1e-8)
    finest = float(report.resolution.split()[-1].split(":")[1])
    assert abs(finest - info.p1_closed_form(0.5)) < 1e-8
    assert report.passed


def test_fine_grid_holevo_pair_at_zero(grid):
    p = info.holevo_point(0.0, grid)
    i_a, i_b = oracle.fine_grid_reference("holevo_pair", {"q": 0.0}, (p.I_A, p.I_B))
    assert abs(i_a.oracle) < 1e-9 and abs(i_b.oracle - 1) < 1e-6
    assert i_a.passed and i_b.passed


def test_fine_grid_unknown_quantity():
    with pytest.raises(ValueError):
        oracle.fine_grid_reference("coherent_information", {"q": 0.5}, 0.0)


def test_report_diff_is_exact():
    r = oracle.OracleReport.compare("x", 0.25, 0.125, "n/a", tol=0.2)
    assert r.abs_diff == abs(0.25 - 0.125) and r.passed
    assert "PASS x" in r.line()
