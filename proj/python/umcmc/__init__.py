"""Unbiased estimators from coupled MCMC chains."""

from ._core import (  # noqa: F401
    ConfigError,
    DomainError,
    RngStream,
    aggregate,
    bb_exact_log_lik,
    config_hash,
    cost,
    empirical_survival,
    fit_polynomial_bound,
    h_k_m,
    ising_cftp_sample,
    ising_exact_distribution,
    kalman_log_lik,
    lgssm_pf_log_lik,
    run,
    spectrum_variance,
    toy_log_lik_hat,
)

__version__ = "0.1.0"
