import csv
import io
import json
import math
import os
import subprocess

import numpy as np
import pytest

import uscgibbs


def test_reference_qutrit_and_gibbs():
    h, a = uscgibbs.reference_qutrit()
    assert h.shape == (3, 3)
    assert np.allclose(np.diag(a).real, [1.0, 0.0, -0.5])
    rho = uscgibbs.gibbs(h, 5.0)
    w, v = np.linalg.eigh(h)
    p = np.exp(-5.0 * (w - w.min()))
    expect = (v * (p / p.sum())) @ v.conj().T
    assert np.abs(rho - expect).max() < 1e-12


def test_mfgs_of_product_hamiltonian_is_gibbs():
    h, _ = uscgibbs.reference_qutrit()
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, 4))
    he = x + x.T
    full = np.kron(h, np.eye(4)) + np.kron(np.eye(3), he)
    rho = uscgibbs.mfgs(full, 3, 4, 5.0)
    assert uscgibbs.trace_distance(rho, uscgibbs.gibbs(h, 5.0)) < 1e-10


def test_usc_state_is_diagonal_in_pointer_basis():
    h, a = uscgibbs.reference_qutrit()
    rho = uscgibbs.usc_cl_gcl2(h, a, 5.0)
    assert np.abs(rho - np.diag(np.diag(rho))).max() < 1e-14
    assert np.diag(rho).real[0] == pytest.approx(0.9933, abs=1e-4) or np.diag(rho).real[2] == pytest.approx(0.9933, abs=1e-4)


def test_sweep_round_trip():
    cfg = {"family": "GCL2", "potential": {"a2": 0, "a4": 1}, "couplings": [1, 4], "grid": {"policy": "auto", "n_points": 64}}
    text, report = uscgibbs.run_sweep(cfg)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 2
    assert float(rows[1]["trace_distance"]) < float(rows[0]["trace_distance"])
    assert report["config"] == uscgibbs.config_echo(cfg)
    with pytest.raises(uscgibbs.ConfigError):
        uscgibbs.run_sweep({"family": "GCL3"})


def test_h_functions():
    assert uscgibbs.h_sin(math.pi) == pytest.approx(math.pi**2)
    x, h = uscgibbs.minimize_h("sin")
    assert x == pytest.approx(math.pi, rel=1e-6)
    assert 0 < h < 12
    assert uscgibbs.minimize_h("hyp")[1] == pytest.approx(12.0)
    report = uscgibbs.run_props({"family": "GCL2", "props": {"prop1_trials": 10, "prop2_trials": 10}})
    assert report["prop1_violations"] == 0


@pytest.mark.skipif("USCGIBBS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_sweep_matches_module(tmp_path):
    cfg = {"family": "GCL2", "couplings": [0.5, 2], "grid": {"policy": "auto", "n_points": 64}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    subprocess.run([os.environ["USCGIBBS_CLI"], "sweep", "--config", str(path), "--out", str(out)], check=True)
    cli_rows = list(csv.DictReader((out / "sweep.csv").open()))
    mod_rows = list(csv.DictReader(io.StringIO(uscgibbs.run_sweep(cfg)[0])))
    assert [r["trace_distance"] for r in cli_rows] == [r["trace_distance"] for r in mod_rows]
