import math

import numpy as np
import pytest

import gerf


def test_phi_closed_forms():
    assert gerf.phi(0.0, 2.0, 1.0) == 0.0
    assert gerf.phi(1.0, 1.0, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert gerf.phi(20.0, 2.0, 1.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)
    assert gerf.penalty_value(np.array([1.0, -1.0]), "gerf:p=2,sigma=1") == pytest.approx(
        2 * math.sqrt(math.pi) / 2 * math.erf(1.0), rel=1e-13
    )


def test_prox():
    assert gerf.prox_gerf(0.8, 1.0, 1.0, 1.0) == 0.0
    assert abs(gerf.prox_gerf(2.0, 1.0, 2.0, 100.0) - 1.0) <= 1e-3
    assert abs(gerf.prox_gerf_p1(3.0, 1.0, 1.0) - gerf.prox_gerf(3.0, 1.0, 1.0, 1.0)) <= 1e-10
    assert gerf.lambert_w0(math.e) == pytest.approx(1.0)
    np.testing.assert_array_equal(gerf.soft_threshold(np.array([2.0, -2.0, 0.5]), 1.0), [1.0, -1.0, 0.0])


def test_recovery():
    A = gerf.gaussian_matrix(64, 256, 77)
    x = gerf.sparse_signal(256, 10, 78)
    y = A @ x
    dca = gerf.dca_solve(A, y, 2.0, 1.0)
    irl1 = gerf.irl1_solve(A, y, "gerf:p=2,sigma=1")
    assert gerf.relative_error(dca["estimate"], x) <= 1e-3
    assert gerf.relative_error(irl1["estimate"], x) <= 1e-3
    assert dca["outer_iters"] == len(dca["objective_trace"])
    lasso = gerf.lasso_admm(A, np.zeros(64))
    assert not lasso["estimate"].any()


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        gerf.dca_solve(np.ones((3, 4)), np.ones(2), 2.0, 1.0)
    with pytest.raises(ValueError):
        gerf.penalty_value(np.ones(2), "scad")
    with pytest.raises(ValueError):
        gerf.gnsp_check(np.eye(2), 1, 2.0, 1.0)


def test_oracle_and_gnsp():
    Q = np.zeros((6, 8))
    Q[0, 0] = Q[1, 1] = Q[2, 2] = 1.0
    assert gerf.oracle_mse(Q, [0, 1, 2], 0.5) == pytest.approx(0.75)
    hit = gerf.gnsp_check(np.array([[1.0, 1.0]]), 1, 2.0, 1.0, 100, 1)
    v, support = hit["counterexample"]
    assert abs(abs(v[0]) - abs(v[1])) < 1e-12
    assert len(support) == 1


def test_imaging():
    u = gerf.shepp_logan(32)
    assert u.shape == (32, 32)
    assert u.min() >= 0.0 and u.max() <= 1.0
    mask = gerf.radial_mask(32, 8)
    assert mask.dtype == bool and mask[0, 0]
    full = gerf.recon(u, np.ones((32, 32), dtype=bool), "tv", outer_max=1)
    assert np.linalg.norm(full["image"] - u) <= 1e-8 * np.linalg.norm(u)
    zf = gerf.recon(u, mask, "zero_fill")["image"]
    tv = gerf.recon(u, mask, "tv", outer_max=3)["image"]
    assert np.linalg.norm(tv - u) < np.linalg.norm(zf - u)
