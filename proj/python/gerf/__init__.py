"""GERF sparse recovery: penalties, proximal maps, solvers and MRI reconstruction."""

from ._core import (
    dc_gradient,
    dca_solve,
    gaussian_matrix,
    gnsp_check,
    hard_threshold,
    irl1_solve,
    irl1_weights,
    lambert_w0,
    lasso_admm,
    limit_diagnostics,
    oracle_mse,
    oversampled_dct,
    penalty_value,
    phi,
    prox_gerf,
    prox_gerf_p1,
    radial_mask,
    recon,
    relative_error,
    shepp_logan,
    soft_threshold,
    sparse_signal,
)

__version__ = "0.1.0"
