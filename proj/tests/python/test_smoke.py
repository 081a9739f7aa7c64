import math
import os
import subprocess

import numpy as np
import pytest
import scipy.sparse
import scipy.linalg

import washerkorn as wk


def test_fit_exponent_square_law():
    exponent, intercept, resid = wk.fit_exponent([0.1, 0.05, 0.025], [0.01, 0.0025, 0.000625])
    assert exponent == pytest.approx(2.0, abs=1e-12)
    assert abs(intercept) < 1e-12
    assert resid < 1e-12


def test_fit_exponent_rejects_two_points():
    with pytest.raises(wk.InvalidArgument):
        wk.fit_exponent([0.1, 0.05], [1.0, 0.5])


def test_korn_constant_small_grid():
    res = wk.korn_constant(0.5, 1.0, 0.1, bc="V2", grid="16x4", order=1, modes=3, levels=1)
    assert 0.0 < res["K"] < 1.0
    assert res["mode"] in range(0, 8)
    assert len(res["per_mode"]) >= 4


def test_reduced_forms_match_dense_min():
    forms = wk.assemble_forms(0.5, 1.0, 0.1, mode=2, bc="V2", grid="8x4", order=1)
    A, B = forms["A"], forms["B"]
    assert scipy.sparse.issparse(A)
    lam, x, resid = wk.min_rayleigh(A, B)
    dense = scipy.linalg.eigh(A.toarray(), B.toarray(), eigvals_only=True)[0]
    assert lam == pytest.approx(dense, rel=1e-8)
    assert x.shape == (A.shape[0],)


def test_ansatz_strain_scales_cubically():
    e1 = wk.ansatz_norms(0.5, 1.0, 0.05)["strain_sq"]
    e2 = wk.ansatz_norms(0.5, 1.0, 0.025)["strain_sq"]
    assert math.log(e1 / e2, 2) == pytest.approx(3.0, abs=0.05)


def test_audit_entry_and_hypothesis():
    assert len(wk.inequalities()) == 12
    rep = wk.audit("HARDY_ANNULUS", 3)
    assert rep["passed"] and rep["ratio"] < 1.0
    s = wk.stress_test("BLOCK_Z", 1, 5)
    assert s["pass_count"] == 5
    with pytest.raises(wk.HypothesisViolation):
        wk.audit("HARDY_INTERVAL", 1, epsilon=0.0)


def test_sweep_ansatz_is_deterministic():
    a = wk.sweep("ansatz", h_list=[0.1, 0.05, 0.025])
    b = wk.sweep("ansatz", h_list=[0.1, 0.05, 0.025])
    assert a["csv"] == b["csv"]
    assert a["series"]["strain_sq"]["exponent"] == pytest.approx(3.0, abs=0.05)


CLI = os.environ.get("WASHERKORN_CLI")


@pytest.mark.skipif(not CLI, reason="CLI path not provided")
@pytest.mark.parametrize(
    "args,code",
    [
        (["--help"], 0),
        (["korn", "--bc", "v3"], 2),
        (["korn", "--h", "abc"], 2),
        (["frobnicate"], 2),
        (["korn", "--h", "0.1", "--grid", "8x4", "--order", "1", "--modes", "2", "--levels", "1"], 0),
        (["audit", "--inequality", "KORN1_WASHER", "--candidate", "1e-9", "--trials", "3", "--out", "."], 1),
    ],
)
def test_cli_exit_codes(args, code, tmp_path):
    proc = subprocess.run([CLI, *args], cwd=tmp_path, capture_output=True, text=True)
    assert proc.returncode == code, proc.stdout + proc.stderr


@pytest.mark.skipif(not CLI, reason="CLI path not provided")
def test_cli_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("study=audit\ntrials=5\ninequality=HARDY_INTERVAL,HARDY_ANNULUS\n")
    out = tmp_path / "out"
    proc = subprocess.run([CLI, "sweep", "--config", str(cfg), "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = (out / "audit.csv").read_text().splitlines()
    assert lines[0].startswith("# generated ")
    assert lines[1] == "id,count,pass_count,max_ratio,argmax_seed,constant,max_quad_error"
    assert [l.split(",")[:3] for l in lines[2:]] == [["HARDY_INTERVAL", "5", "5"], ["HARDY_ANNULUS", "5", "5"]]
