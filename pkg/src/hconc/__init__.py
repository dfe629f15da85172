"""Numerical toolkit for the Hankel-transform concentration machinery:
normalized Bessel kernels, weighted measures on the half-line, the
Fourier-Bessel transform, generalized translation, bandlimited (Paley-Wiener)
models with Bernstein bounds, and energy-concentration experiments.
"""

__version__ = "0.1.0"

from .bessel import (
    BesselBound,
    Order,
    ZeroTable,
    certify_bound,
    eval_j,
    eval_j_derivative,
    zeros_of_j_prime,
)
from .errors import (
    ConvergenceError,
    DomainError,
    HconcError,
    InternalError,
    UsageError,
)
from .measure import (
    DensityParams,
    IntervalSet,
    ThinnessParams,
    density_profile,
    is_thin,
    mu_measure,
    nu_measure,
)

__all__ = [
    "__version__",
    "Order",
    "BesselBound",
    "ZeroTable",
    "eval_j",
    "eval_j_derivative",
    "zeros_of_j_prime",
    "certify_bound",
    "IntervalSet",
    "DensityParams",
    "ThinnessParams",
    "mu_measure",
    "nu_measure",
    "density_profile",
    "is_thin",
    "HconcError",
    "DomainError",
    "UsageError",
    "InternalError",
    "ConvergenceError",
]
