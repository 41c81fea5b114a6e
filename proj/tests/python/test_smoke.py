import math

import numpy as np
import pytest

import stripcs


def test_version():
    assert stripcs.__version__.count(".") == 2


def test_kerdock_certificate():
    m = stripcs.matrix("dg", m=3, r=0)
    assert (m.rows, m.cols) == (8, 64)
    cert = stripcs.certify(m)
    assert cert["st2_pass"] and cert["st3_pass"]
    assert cert["st3_eta"] == pytest.approx(1.0, abs=1e-9)


def test_chirp_columns_are_unimodular():
    m = stripcs.matrix("chirp", p=5)
    col = m.column(7)
    assert col.dtype == np.complex128
    np.testing.assert_allclose(np.abs(col), 1.0, atol=1e-12)
    np.testing.assert_allclose(m.column(0), np.ones(5), atol=1e-12)


def test_fwht_matches_hadamard():
    rng = np.random.default_rng(3)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    h = np.array([[(-1) ** bin(i & j).count("1") for j in range(16)] for i in range(16)])
    np.testing.assert_allclose(stripcs.fwht(v), h @ v, atol=1e-12)


def test_bounds():
    value, vacuous = stripcs.strip_delta(512, 2**18, 10, 0.5, 1.0)
    assert not vacuous
    assert value == pytest.approx(0.40388176708503979, rel=1e-12)
    assert stripcs.gaussian_tail_S(1.0, 2) == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert stripcs.strip_delta(8, 64, 2, 0.01, 1.0) == (2.0, True)


def test_noiseless_reconstruction():
    m = stripcs.matrix("dg", m=7, r=0)
    idx = [5, 900, 4321]
    vals = np.exp(1j * np.array([0.3, 1.7, -2.2]))
    f, noise_norm = stripcs.measure(m, idx, vals)
    assert noise_norm == 0.0
    res = stripcs.reconstruct(m, f, 3)
    assert sorted(e["index"] for e in res["estimate"]) == idx
    got = {e["index"]: complex(e["re"], e["im"]) for e in res["estimate"]}
    for j, v in zip(idx, vals):
        assert abs(got[j] - v) < 1e-9


def test_run_experiment(tmp_path):
    rec = stripcs.run_experiment(
        {"kind": "bounds", "matrix": {"family": "dg", "params": {"m": 9}}, "k": "4,8", "out": str(tmp_path)}
    )
    assert rec["pass"]
    assert len(rec["config_hash"]) == 16
    assert (tmp_path / "bounds.csv").exists()


def test_config_error():
    with pytest.raises(ValueError, match="matrix.params.p"):
        stripcs.run_experiment({"kind": "certify", "matrix": {"family": "chirp", "params": {"p": 6}}})
