"""Spectral kernels, Littlewood-Paley band sums and Gaussian path simulation."""

from ._core import (
    ConfigError,
    ContractError,
    DegenerateFitError,
    DomainError,
    GpdError,
    NumericError,
    TruncationError,
    __version__,
    acceptance,
    besov,
    delta_net,
    expand,
    fourier_abs_alpha,
    gamma_k_integral,
    gegenbauer_w,
    kernel_check,
    kernel_eval,
    log_pochhammer,
    regularity,
    simulate,
    sphere_harmonic_dimension,
    window,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DegenerateFitError",
    "DomainError",
    "GpdError",
    "NumericError",
    "TruncationError",
    "__version__",
    "acceptance",
    "besov",
    "delta_net",
    "expand",
    "fourier_abs_alpha",
    "gamma_k_integral",
    "gegenbauer_w",
    "kernel_check",
    "kernel_eval",
    "log_pochhammer",
    "regularity",
    "simulate",
    "sphere_harmonic_dimension",
    "window",
]
