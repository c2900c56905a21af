"""Pseudo-spectral aggregation-diffusion solver."""

from ._aggdiff import (
    Grid,
    Potential,
    __version__,
    check_smallness,
    entropy_ledger,
    fit_decay,
    gamma,
    gaussian,
    gaussian_entropy,
    lp_norm,
    mittag_leffler_phi,
    potential_norms,
    run,
    simulate,
    simulate_rescaled,
    validate,
)

__all__ = [
    "Grid",
    "Potential",
    "__version__",
    "check_smallness",
    "entropy_ledger",
    "fit_decay",
    "gamma",
    "gaussian",
    "gaussian_entropy",
    "lp_norm",
    "mittag_leffler_phi",
    "potential_norms",
    "run",
    "simulate",
    "simulate_rescaled",
    "validate",
]
