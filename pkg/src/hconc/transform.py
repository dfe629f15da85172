"""Fourier-Bessel (Hankel) transform of order alpha on the half-line.

F(y) = integral of f(x) j_alpha(2 pi x y) d mu_alpha(x).  The kernel is
self-reciprocal, so `inverse` and `forward` share one implementation.  All
functions here act on SampledFunction carriers whose rule covers the support.
"""

from __future__ import annotations

import numpy as np

from .bessel import Order, eval_j
from .errors import DomainError
from .measure import mu_density_constant
from .quadrature import QuadratureRule, SampledFunction

# Kernel-matrix evaluation is chunked to bound peak memory.
_CHUNK = 2_000_000


def mu_weights(order: Order, rule: QuadratureRule) -> np.ndarray:
    """Quadrature weights with the mu_alpha density folded in."""
    return rule.weights * mu_density_constant(order) * rule.nodes ** (
        2.0 * order.alpha + 1.0
    )


def _kernel_apply(order: Order, out_nodes, nodes, coeffs) -> np.ndarray:
    out_nodes = np.asarray(out_nodes, dtype=float)
    y = np.atleast_1d(out_nodes)
    result = np.empty(len(y))
    rows_per_chunk = max(1, _CHUNK // max(1, len(nodes)))
    for start in range(0, len(y), rows_per_chunk):
        block = y[start : start + rows_per_chunk]
        kern = eval_j(order, 2.0 * np.pi * np.outer(block, nodes))
        result[start : start + rows_per_chunk] = kern @ coeffs
    return result


def forward(order: Order, f: SampledFunction, out_nodes) -> np.ndarray:
    """Transform values at out_nodes by mu_alpha-weighted quadrature."""
    coeffs = mu_weights(order, f.rule) * f.values
    return _kernel_apply(order, out_nodes, f.rule.nodes, coeffs)


def inverse(order: Order, F: SampledFunction, out_nodes) -> np.ndarray:
    """Inverse transform; identical kernel (the transform is self-inverse)."""
    return forward(order, F, out_nodes)


def dilate(order: Order, lam: float, f: SampledFunction) -> SampledFunction:
    """Measure-normalized dilation: values lam^-(alpha+1) f(x / lam) on the
    rule mapped to lam * interval.  Isometric on the mu_alpha L2 norm."""
    if not (lam > 0) or not np.isfinite(lam):
        raise DomainError(f"dilation factor must be positive, got {lam}")
    lo, hi = f.rule.interval
    rule = QuadratureRule(
        (lam * lo, lam * hi), lam * f.rule.nodes, lam * f.rule.weights
    )
    values = lam ** (-(order.alpha + 1.0)) * f.values
    return SampledFunction(rule=rule, values=values)


def norm_l2(order: Order, f: SampledFunction) -> float:
    """L2 norm against mu_alpha over the rule's interval."""
    return float(np.sqrt(np.dot(mu_weights(order, f.rule), f.values**2)))


def norm_lp(order: Order, f: SampledFunction, p: float) -> float:
    """Lp norm against mu_alpha over the rule's interval, p >= 1."""
    if p < 1:
        raise DomainError("p must be >= 1")
    w = mu_weights(order, f.rule)
    return float(np.dot(w, np.abs(f.values) ** p) ** (1.0 / p))
