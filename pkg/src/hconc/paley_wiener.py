"""Bandlimited (Paley-Wiener) model, Bernstein bounds, and the peaked
interpolation family built from translated indicator transforms.

A PWFunction stores spectral samples of the transform on a rule over (0, b);
synthesis is the inverse-transform quadrature.  The iterated half-derivative
D = (1/2x) d/dx maps the model to order alpha+k with an explicit kernel, which
gives the norm of D^k f as an exact spectral sum (no physical truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import Order, cached_zero_table, eval_j
from .errors import DomainError
from .measure import mu_density_constant
from .quadrature import QuadratureRule, SampledFunction, build_rule, panel_rule
from .transform import mu_weights, norm_l2

_MAX_DK = 30
_CHUNK = 2_000_000


def theta_constant(order: Order) -> float:
    """Normalization making the [0, 1/(2 pi)] indicator transform peak at 1:
    (4 pi)^(alpha+1) * Gamma(alpha+2)."""
    a = order.alpha
    return (4.0 * math.pi) ** (a + 1.0) * math.gamma(a + 2.0)


@dataclass(frozen=True)
class PWFunction:
    """Member of the bandlimited model: spectral samples coeff[i] of the
    transform at spectral_rule.nodes[i] in (0, bandlimit)."""

    order: Order
    bandlimit: float
    spectral_rule: QuadratureRule
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.bandlimit > 0):
            raise DomainError("bandlimit must be positive")
        if len(self.coeffs) != len(self.spectral_rule):
            raise DomainError("coeffs must match the spectral rule length")
        lo, hi = self.spectral_rule.interval
        if lo < 0 or hi > self.bandlimit * (1 + 1e-12):
            raise DomainError("spectral rule must live inside (0, bandlimit)")

    def mu_hat_weights(self, shift: float = 0.0) -> np.ndarray:
        """Spectral weights with the order-(alpha+shift) measure folded in."""
        xi = self.spectral_rule.nodes
        shifted = self.order.shifted(shift)
        return (
            self.spectral_rule.weights
            * mu_density_constant(shifted)
            * xi ** (2.0 * (shifted.alpha) + 1.0)
        )


def plancherel_norm(pw: PWFunction) -> float:
    """L2 norm from the spectral side (the transform is an isometry)."""
    return float(np.sqrt(np.dot(pw.mu_hat_weights(), pw.coeffs**2)))


def _synth_kernel(order: Order, xs: np.ndarray, xi: np.ndarray, coeffs: np.ndarray):
    out = np.empty(len(xs))
    rows = max(1, _CHUNK // max(1, len(xi)))
    for start in range(0, len(xs), rows):
        block = xs[start : start + rows]
        kern = eval_j(order, 2.0 * np.pi * np.outer(block, xi))
        out[start : start + rows] = kern @ coeffs
    return out


def synthesize(pw: PWFunction, x) -> np.ndarray | float:
    """f(x) = integral of the spectrum against j_alpha(2 pi x xi) d mu_alpha."""
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = _synth_kernel(
        pw.order, xs, pw.spectral_rule.nodes, pw.mu_hat_weights() * pw.coeffs
    )
    return float(vals[0]) if scalar else vals


def apply_Dk(pw: PWFunction, k: int, x) -> np.ndarray | float:
    """k-th iterate of D = (1/2x) d/dx applied to the synthesis:
    D^k f(x) = (-pi)^k * integral of spectrum * j_{alpha+k}(2 pi x xi)
    against d mu_{alpha+k}."""
    if not (0 <= k <= _MAX_DK):
        raise DomainError(f"derivative order k must be in [0, {_MAX_DK}]")
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    coeffs = pw.mu_hat_weights(shift=k) * pw.coeffs
    vals = (-math.pi) ** k * _synth_kernel(
        pw.order.shifted(k), xs, pw.spectral_rule.nodes, coeffs
    )
    return float(vals[0]) if scalar else vals


def dk_norm(pw: PWFunction, k: int) -> float:
    """L2 norm of D^k f in the order-(alpha+k) measure, via the exact
    spectral identity ||D^k f|| = pi^k * (spectral norm of the coefficients
    in mu_{alpha+k}).  No physical-domain truncation enters."""
    if not (0 <= k <= _MAX_DK):
        raise DomainError(f"derivative order k must be in [0, {_MAX_DK}]")
    return math.pi**k * float(
        np.sqrt(np.dot(pw.mu_hat_weights(shift=k), pw.coeffs**2))
    )


def bernstein_sides(pw: PWFunction, k: int) -> tuple[float, float]:
    """The two sides of the derivative-norm inequality:
    lhs = ||D^k f||_{alpha+k}, rhs = sqrt(G(a+1)/G(a+k+1)) (pi^(3/2) b)^k ||f||."""
    a = pw.order.alpha
    lhs = dk_norm(pw, k)
    factor = math.sqrt(math.gamma(a + 1.0) / math.gamma(a + k + 1.0))
    rhs = factor * (math.pi**1.5 * pw.bandlimit) ** k * plancherel_norm(pw)
    return lhs, rhs


def physical_norm(pw: PWFunction, x_max: float, nodes_per_unit: float = 8.0) -> float:
    """Independent L2 norm by quadrature of the synthesized function on
    [0, x_max]; approaches the spectral norm as x_max grows."""
    rule = panel_rule(0.0, x_max, nodes_per_unit * max(1.0, pw.bandlimit))
    vals = synthesize(pw, rule.nodes)
    return norm_l2(pw.order, SampledFunction(rule=rule, values=vals))


def sqrt_substitute(x_nodes, f_values) -> tuple[np.ndarray, np.ndarray]:
    """Squared-variable resampling: g(s) = f(sqrt(s)) on s = x^2.

    Carries the norm identity
    integral |g|^2 s^alpha ds = (Gamma(alpha+1)/pi^(alpha+1)) ||f||^2."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    if np.any(x_nodes < 0):
        raise DomainError("squared-variable substitution needs x >= 0")
    return x_nodes**2, np.asarray(f_values, dtype=float).copy()


def random_pw(
    order: Order,
    b: float,
    n_spec: int,
    rng: np.random.Generator,
    kind: str = "uniform",
) -> PWFunction:
    """Random unit-norm test function in the bandlimited model.

    kind="uniform": spectral samples i.i.d. uniform on [-1, 1] (rough; generic
    nonzero boundary values).  kind="smooth": random low-degree polynomial
    shaped by a bump that vanishes to all orders at both band edges, so the
    synthesized function decays faster than any power (usable wherever a
    truncated physical-domain integral must represent the full norm).
    """
    rule = build_rule(0.0, b, n_spec)
    if kind == "uniform":
        c = rng.uniform(-1.0, 1.0, size=n_spec)
    elif kind == "smooth":
        u = rule.nodes / b
        bump = np.exp(4.0 - 1.0 / np.maximum(u * (1.0 - u), 1e-300))
        deg = int(rng.integers(2, 7))
        poly = np.polynomial.polynomial.polyval(2.0 * u - 1.0, rng.uniform(-1, 1, deg + 1))
        c = bump * poly
        if float(np.max(np.abs(c))) == 0.0:
            c = bump
    else:
        raise DomainError(f"unknown random family {kind!r}")
    pw = PWFunction(order=order, bandlimit=b, spectral_rule=rule, coeffs=c)
    nrm = plancherel_norm(pw)
    if nrm == 0.0:
        raise DomainError("degenerate random draw")
    return PWFunction(order=order, bandlimit=b, spectral_rule=rule, coeffs=c / nrm)


def indicator_pw(order: Order, n_spec: int = 64) -> PWFunction:
    """The normalized indicator spectrum on (0, 1/(2 pi)): its synthesis is
    the order-(alpha+1) kernel itself (the n=0 member of the peaked family)."""
    b = 1.0 / (2.0 * math.pi)
    rule = build_rule(0.0, b, n_spec)
    coeffs = np.full(len(rule), theta_constant(order))
    return PWFunction(order=order, bandlimit=b, spectral_rule=rule, coeffs=coeffs)


@dataclass(frozen=True)
class EntireEvenSeries:
    """Truncated even power series f(z) = sum a_n z^(2n), evaluatable for
    complex z.  Built from a PWFunction by expanding the synthesis kernel; the
    coefficient decay is factorial so 'terms' in the tens suffices on any
    bounded disc."""

    coefficients: np.ndarray = field(repr=False)

    def evaluate(self, z) -> np.ndarray | complex:
        scalar = np.isscalar(z)
        zz = np.atleast_1d(np.asarray(z, dtype=complex)) ** 2
        # Horner in z^2
        acc = np.zeros_like(zz)
        for a_n in self.coefficients[::-1]:
            acc = acc * zz + a_n
        return complex(acc[0]) if scalar else acc

    def in_s_variable(self) -> np.ndarray:
        """Power-series coefficients of g(s) = f(sqrt(s)) = sum a_n s^n."""
        return self.coefficients.copy()

    @staticmethod
    def from_pw(pw: PWFunction, extent: float = 8.0, terms: int = 0) -> "EntireEvenSeries":
        """Expand the synthesis of a PWFunction: the kernel series in the
        phase 2 pi x xi gives a_m = G(a+1) (-1)^m / (m! G(m+a+1)) *
        sum_i w_hat_i c_i (pi xi_i)^(2m).  `extent` is the radius |z| on
        which the truncation must hold to double precision."""
        a = pw.order.alpha
        xi = pw.spectral_rule.nodes
        wc = pw.mu_hat_weights() * pw.coeffs
        if terms <= 0:
            # factorial-squared decay kicks in past m ~ e pi b extent
            terms = int(math.e * math.pi * pw.bandlimit * extent) + 40
        coeff = np.empty(terms)
        powers = np.ones_like(xi)
        base = (math.pi * xi) ** 2
        for m in range(terms):
            log_scale = (
                math.lgamma(a + 1.0)
                - math.lgamma(m + 1.0)
                - math.lgamma(m + a + 1.0)
            )
            coeff[m] = (-1.0) ** m * math.exp(log_scale) * float(np.dot(powers, wc))
            powers = powers * base
        return EntireEvenSeries(coefficients=coeff)


# --- peaked interpolation family -------------------------------------------

_SING_WINDOW = 1e-4  # relative half-width of the series patch around s'_n


def extremal_peak(order: Order, n: int) -> float:
    """Value at its own node: 1 for n=0, else (alpha+1) j_alpha(s'_n)^2."""
    if n == 0:
        return 1.0
    s = cached_zero_table(order.alpha, n).s_prime(n)
    return (order.alpha + 1.0) * float(eval_j(order, s)) ** 2


def extremal_norm_sq(order: Order, n: int) -> float:
    """Closed-form squared L2 norm: theta_constant * peak value."""
    return theta_constant(order) * extremal_peak(order, n)


def extremal_family(order: Order, n: int, x) -> np.ndarray | float:
    """n-th member of the peaked family.

    n=0: j_{alpha+1}(x).  n>=1: j_alpha(s'_n) x^2 j_{alpha+1}(x)/(x^2-s'_n^2),
    whose singular-looking quotient is filled near x=s'_n by a cubic series of
    j_{alpha+1} about the node (where it vanishes).
    """
    if n < 0:
        raise DomainError("family index must be >= 0")
    scalar = np.isscalar(x)
    xs = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    a = order.alpha
    high = order.shifted(1)
    if n == 0:
        vals = eval_j(high, xs)
        return float(vals[0]) if scalar else vals
    s = cached_zero_table(a, n).s_prime(n)
    js = float(eval_j(order, s))
    vals = np.empty_like(xs)
    near = np.abs(xs - s) <= _SING_WINDOW * s
    far = ~near
    if np.any(far):
        xf = xs[far]
        vals[far] = js * xf**2 * eval_j(high, xf) / (xf**2 - s * s)
    if np.any(near):
        # j_{alpha+1}(x)/(x-s) = u' + u'' d/2 + u''' d^2/6 + O(d^3), d = x-s,
        # with u = j_{alpha+1} and u(s) = 0; derivatives via the ladder rule.
        d = xs[near] - s
        j2 = float(eval_j(order.shifted(2), s))
        j3 = float(eval_j(order.shifted(3), s))
        j4 = float(eval_j(order.shifted(4), s))
        c2, c3, c4 = a + 2.0, a + 3.0, a + 4.0
        u1 = -s * j2 / (2.0 * c2)
        u2 = -j2 / (2.0 * c2) + s * s * j3 / (4.0 * c2 * c3)
        u3 = 3.0 * s * j3 / (4.0 * c2 * c3) - s**3 * j4 / (8.0 * c2 * c3 * c4)
        quot = u1 + u2 * d / 2.0 + u3 * d * d / 6.0
        xn = xs[near]
        vals[near] = js * xn**2 * quot / (xn + s)
    return float(vals[0]) if scalar else vals


def tail_mass(order: Order, n: int, a: float) -> float:
    """Energy fraction of the n-th family member outside [s'_n - a, s'_n + a],
    computed as 1 - (window integral) / (closed-form norm)."""
    if a <= 0:
        raise DomainError("window half-width must be positive")
    s = 0.0 if n == 0 else cached_zero_table(order.alpha, n).s_prime(n)
    lo, hi = max(0.0, s - a), s + a
    if hi <= lo:
        return 1.0
    rule = panel_rule(lo, hi, nodes_per_unit=12.0)
    vals = extremal_family(order, n, rule.nodes)
    window = float(
        np.dot(mu_weights(order, rule), vals**2)
    )
    total = extremal_norm_sq(order, n)
    return max(0.0, 1.0 - window / total)
