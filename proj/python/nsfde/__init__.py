"""Mean-square stability toolkit for neutral stochastic delay equations."""

from ._nsfde import (
    ConfigError,
    DomainError,
    HypothesisError,
    InsufficientDataError,
    NumericalError,
    __version__,
    certify,
    contraction_constant,
    fbm_covariance,
    fit_decay_rate,
    gamma_identity_check,
    rkhs_scalar_product,
    run_cli,
    sample_fbm_paths,
    self_test,
    simulate,
    volterra_constant,
    volterra_kernel,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "HypothesisError",
    "InsufficientDataError",
    "NumericalError",
    "__version__",
    "certify",
    "contraction_constant",
    "fbm_covariance",
    "fit_decay_rate",
    "gamma_identity_check",
    "rkhs_scalar_product",
    "run_cli",
    "sample_fbm_paths",
    "self_test",
    "simulate",
    "volterra_constant",
    "volterra_kernel",
]
