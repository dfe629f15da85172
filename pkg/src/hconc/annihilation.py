"""Projection pairs, concentration eigenproblems, and the explicit
energy-concentration bound with its empirical verification.

Three numerical engines live here:

* pair_norm: the operator norm of (bandpass to Sigma) composed with
  (restrict to S), discretized as a symmetric PSD compression on
  measure-weighted quadrature coordinates.

* ls_empirical_min_ratio: the minimum of ||f||^2_Omega / ||f||^2 over a
  discretized bandlimited space.  The discretization expands in the
  orthogonal mode basis j_alpha(s'_m x / X) on [0, X] (frequencies at scaled
  derivative zeros), whose Gram over the full window is exactly the identity;
  the minimum eigenvalue of the sub-window Gram is then a true concentration
  ratio with spectrum guaranteed inside [0, 1].

* good/bad window diagnostics and the analytic-growth inequality checker for
  the squared-variable reformulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._eigs import lambda_min_psd, sigma_max_factor
from .bessel import Order, cached_zero_table, certify_bound, eval_j
from .errors import ConvergenceError, DomainError, InternalError, UsageError
from .measure import IntervalSet, mu_density_constant, mu_measure
from .paley_wiener import (
    EntireEvenSeries,
    PWFunction,
    apply_Dk,
    extremal_family,
    extremal_norm_sq,
    synthesize,
    tail_mass,
    theta_constant,
)
from .quadrature import build_rule, panel_rule, set_rule

_STABILITY_TOL = 1e-6
_MAX_DOUBLINGS = 4


# --------------------------------------------------------------------------
# pair norms


@dataclass(frozen=True)
class ProjectionPair:
    """A spatial set S, a spectral set Sigma, and discretization controls.

    nodes_per_interval is the starting x/xi budget for each interval; the
    norm computation doubles it until the value is stable.
    """

    order: Order
    S: IntervalSet
    Sigma: IntervalSet
    x_max: float
    nodes_per_interval: int = 64

    def __post_init__(self):
        if self.S.sup() > self.x_max * (1 + 1e-12):
            raise DomainError("S must be contained in [0, x_max]")
        if self.nodes_per_interval < 4:
            raise DomainError("node budget too small")


def _pair_factor(pair: ProjectionPair, budget: int) -> np.ndarray:
    """Factor A with A^T A = the compression of the Sigma-bandpass to S.

    A[k, p] = sqrt(u_k) j_alpha(2 pi x_p xi_k) sqrt(v_p) over mu-folded
    quadrature weights u (spectral, on Sigma) and v (spatial, on S)."""
    order = pair.order
    dens = mu_density_constant(order)
    # spectral side must resolve oscillation in xi at rate ~ sup(S)
    sup_s = pair.S.sup()
    per_unit_xi = max(budget, math.ceil(4.0 * sup_s) + 32)
    xi, wxi = set_rule(pair.Sigma, per_unit_xi)
    # spatial side must resolve oscillation in x at rate ~ sup(Sigma)
    per_unit_x = max(budget, math.ceil(4.0 * pair.Sigma.sup()) + 32)
    x, wx = set_rule(pair.S, per_unit_x)
    if len(xi) == 0 or len(x) == 0:
        return np.zeros((0, 0))
    u = wxi * dens * xi ** (2.0 * order.alpha + 1.0)
    v = wx * dens * x ** (2.0 * order.alpha + 1.0)
    kern = eval_j(order, 2.0 * math.pi * np.outer(xi, x))
    return np.sqrt(u)[:, None] * kern * np.sqrt(v)[None, :]


def pair_norm(pair: ProjectionPair) -> float:
    """Operator norm ||F_Sigma E_S||: top singular value of the PSD
    compression, refined by node doubling until 1e-6 stable, clipped to 1."""
    if pair.S.is_empty() or pair.Sigma.is_empty():
        return 0.0
    budget = pair.nodes_per_interval
    # eigenvalue tolerance one decade under the doubling stability threshold
    prev = sigma_max_factor(_pair_factor(pair, budget), tol=1e-7)
    for _ in range(_MAX_DOUBLINGS):
        budget *= 2
        cur = sigma_max_factor(_pair_factor(pair, budget), tol=1e-7)
        if abs(cur - prev) <= _STABILITY_TOL:
            return min(cur, 1.0)
        prev = cur
    raise ConvergenceError(
        "pair norm did not stabilize under node doubling",
        last_iterate=prev,
        residual=abs(cur - prev),
    )


def annihilation_constant(norm: float) -> float:
    """(1 - norm)^-2; only certified when the norm is strictly below 1."""
    if not (0.0 <= norm < 1.0):
        raise DomainError(
            f"annihilation constant requires norm in [0, 1), got {norm}"
        )
    return (1.0 - norm) ** -2


def split_norm_bound(
    S0: IntervalSet,
    Sinf: IntervalSet,
    Sigma0: IntervalSet,
    Sigmainf: IntervalSet,
    order: Order,
    nodes_per_interval: int = 64,
) -> float:
    """Triangle-inequality bound: sum of the four cross pair norms of the
    decomposition (S0 + Sinf) x (Sigma0 + Sigmainf)."""
    total = 0.0
    for s_part in (S0, Sinf):
        for sig_part in (Sigma0, Sigmainf):
            if s_part.is_empty() or sig_part.is_empty():
                continue
            pair = ProjectionPair(
                order=order,
                S=s_part,
                Sigma=sig_part,
                x_max=s_part.sup(),
                nodes_per_interval=nodes_per_interval,
            )
            total += pair_norm(pair)
    return total


def strong_pair_trials(
    order: Order,
    S: IntervalSet,
    Sigma: IntervalSet,
    trials: int,
    seed: int,
    band_factor: float = 2.0,
) -> np.ndarray:
    """Monte-Carlo margins for the split-energy inequality
    ||f||^2 <= (1-norm)^-2 (||f||^2 on S-complement + spectral mass outside
    Sigma), over random functions in a wide-band discretization.

    Returns an array of rows (lhs, rhs); the inequality asks lhs <= rhs.
    """
    big = band_factor * Sigma.sup()
    inside_parts = list(Sigma.intersect_window(0.0, big).intervals)
    outside_parts = list(Sigma.complement_within(0.0, big).intervals)
    dens = mu_density_constant(order)
    sup_s = S.sup()
    xi_list, wxi_list, in_sigma = [], [], []
    for part, inside in ((inside_parts, True), (outside_parts, False)):
        for lo, hi in part:
            n = int(math.ceil(4.0 * sup_s * (hi - lo))) + 16
            rule = build_rule(lo, hi, n)
            xi_list.append(rule.nodes)
            wxi_list.append(rule.weights)
            in_sigma.append(np.full(len(rule), inside))
    xi = np.concatenate(xi_list)
    wxi = np.concatenate(wxi_list)
    sigma_mask = np.concatenate(in_sigma)
    u = wxi * dens * xi ** (2.0 * order.alpha + 1.0)

    x, wx = set_rule(S, max(32, math.ceil(12.0 * big)))
    v = wx * dens * x ** (2.0 * order.alpha + 1.0)
    kern = eval_j(order, 2.0 * math.pi * np.outer(xi, x))
    factor = np.sqrt(u)[:, None] * kern * np.sqrt(v)[None, :]

    norm = pair_norm(
        ProjectionPair(order=order, S=S, Sigma=Sigma, x_max=max(sup_s, 1.0))
    )
    const = annihilation_constant(norm)

    rng = np.random.default_rng(seed)
    rows = np.empty((trials, 2))
    for t in range(trials):
        z = rng.uniform(-1.0, 1.0, size=len(xi))
        total = float(z @ z)
        mass_s = float(np.sum((z @ factor) ** 2))
        spec_out = float(z[~sigma_mask] @ z[~sigma_mask])
        lhs = total
        rhs = const * (max(total - mass_s, 0.0) + spec_out)
        rows[t] = (lhs, rhs)
    return rows


# --------------------------------------------------------------------------
# concentration eigenproblem


@dataclass(frozen=True)
class ConcentrationMatrix:
    """Symmetric PSD Gram of the window-restricted energy form on an
    orthonormal bandlimited mode basis; eigenvalues are concentration ratios."""

    matrix: np.ndarray = field(repr=False)
    omega: IntervalSet
    bandlimit: float
    alpha: float
    x_max: float
    n_modes: int

    def __post_init__(self):
        g = self.matrix
        if g.size:
            skew = float(np.max(np.abs(g - g.T)))
            if skew > 1e-12:
                raise InternalError(f"Gram not symmetric: skew {skew:.3e}")
            eigs = np.linalg.eigvalsh(g)
            if eigs[0] < -1e-9 or eigs[-1] > 1.0 + 1e-9:
                raise InternalError(
                    "concentration spectrum escaped [0, 1]: "
                    f"[{eigs[0]:.3e}, {eigs[-1]:.9f}]"
                )


def _mode_table(order: Order, b: float, x_max: float, cap: int):
    """Frequencies s'_m / (2 pi x_max) <= b and the closed-form mode norms
    on [0, x_max] in mu_alpha.  Mode 0 is the constant; modes are mutually
    orthogonal on the window by the two-frequency integral identity."""
    a = order.alpha
    limit = 2.0 * math.pi * b * x_max
    count = max(8, int(limit / math.pi) + 8)
    table = cached_zero_table(a, count)
    while table.zeros[-1] < limit:
        count *= 2
        table = cached_zero_table(a, count)
    sp = np.concatenate([[0.0], table.zeros[table.zeros <= limit]])
    if cap and len(sp) > cap:
        sp = sp[:cap]
    norms = np.empty(len(sp))
    norms[0] = mu_measure(order, IntervalSet.of([(0.0, x_max)]))
    if len(sp) > 1:
        jvals = eval_j(order, sp[1:])
        norms[1:] = (
            math.pi ** (a + 1.0)
            / math.gamma(a + 1.0)
            * x_max ** (2.0 * a + 2.0)
            * jvals**2
        )
    return sp, norms


def concentration_matrix(
    order: Order,
    b: float,
    omega: IntervalSet,
    x_max: float,
    n_modes: int = 128,
) -> ConcentrationMatrix:
    """Assemble the Omega-window Gram on the orthonormal mode basis."""
    if b <= 0 or x_max <= 0:
        raise DomainError("bandlimit and x_max must be positive")
    if omega.sup() > x_max * (1 + 1e-12):
        raise DomainError("Omega must be contained in [0, x_max]")
    sp, norms = _mode_table(order, b, x_max, n_modes)
    clipped = omega.intersect_window(0.0, x_max)
    if clipped.is_empty():
        g = np.zeros((len(sp), len(sp)))
        return ConcentrationMatrix(
            matrix=g,
            omega=omega,
            bandlimit=b,
            alpha=order.alpha,
            x_max=x_max,
            n_modes=len(sp),
        )
    x, wx = set_rule(clipped, max(12.0, 12.0 * b), order_per_panel=12)
    v = wx * mu_density_constant(order) * x ** (2.0 * order.alpha + 1.0)
    kern = eval_j(order, np.outer(sp / x_max, x))
    B = kern * np.sqrt(v)[None, :] / np.sqrt(norms)[:, None]
    g = B @ B.T
    g = 0.5 * (g + g.T)
    return ConcentrationMatrix(
        matrix=g,
        omega=omega,
        bandlimit=b,
        alpha=order.alpha,
        x_max=x_max,
        n_modes=len(sp),
    )


def ls_empirical_min_ratio(
    order: Order,
    b: float,
    omega: IntervalSet,
    x_max: float,
    n_modes: int = 128,
) -> float:
    """Minimum concentration ratio min ||f||^2_Omega / ||f||^2 over the
    discretized bandlimited space: the smallest eigenvalue of the
    concentration Gram, guaranteed inside [0, 1]."""
    conc = concentration_matrix(order, b, omega, x_max, n_modes)
    lam = lambda_min_psd(conc.matrix)
    return float(min(max(lam, 0.0), 1.0))


# --------------------------------------------------------------------------
# the explicit bound


@dataclass(frozen=True)
class LSParams:
    """Density fraction gamma, window half-width a, bandlimit b, order."""

    gamma: float
    a: float
    b: float
    order: Order

    def __post_init__(self):
        if not (0 < self.gamma <= 1):
            raise DomainError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.a <= 0 or self.b <= 0:
            raise DomainError("a and b must be positive")


def ls_bound_log10(params: LSParams) -> float:
    """Base-10 log of the explicit concentration constant
    (2/3) (gamma / (300 * 9^alpha))^(160 sqrt(3) pi ab / ln 2 + alpha ln3/ln2 + 1).

    Valid for order alpha >= 0.  Kept in log form because realistic
    (a, b) products underflow double precision.
    """
    alpha = params.order.alpha
    if alpha < 0:
        raise DomainError("the explicit bound requires order alpha >= 0")
    exponent = (
        160.0 * math.sqrt(3.0) * math.pi / math.log(2.0) * params.a * params.b
        + alpha * math.log(3.0) / math.log(2.0)
        + 1.0
    )
    log_base = math.log10(params.gamma) - math.log10(300.0) - alpha * math.log10(9.0)
    return math.log10(2.0 / 3.0) + exponent * log_base


def ls_bound(params: LSParams) -> float:
    """The explicit concentration constant itself; 0.0 on double underflow
    (see ls_bound_log10 for the exact logarithm)."""
    log10_val = ls_bound_log10(params)
    if log10_val < -307.0:
        return 0.0
    return 10.0**log10_val


# --------------------------------------------------------------------------
# good/bad windows in the squared variable


def _window_integrals(pw: PWFunction, x: float, k_max: int, n_nodes: int = 96):
    """Integrals of |d^k g|^2 s^(alpha+k) over I_x = [(x-1)^2, (x+1)^2] for
    k = 0..k_max, where g(s) = f(sqrt(s))."""
    lo, hi = (x - 1.0) ** 2, (x + 1.0) ** 2
    rule = build_rule(lo, hi, n_nodes)
    s = rule.nodes
    roots = np.sqrt(s)
    alpha = pw.order.alpha
    out = np.empty(k_max + 1)
    for k in range(k_max + 1):
        dk = apply_Dk(pw, k, roots)
        out[k] = float(np.dot(rule.weights, dk**2 * s ** (alpha + k)))
    return out


def good_bad_partition(
    pw: PWFunction, ab: float, x_list, k_max: int
) -> np.ndarray:
    """Label each window center x >= 1 as bad when some derivative order
    k in [1, k_max] has >= (2 pi ab)^(2k) times the window's own mass:
    integral over I_x of |d^k g|^2 s^(alpha+k) >= (2 pi ab)^(2k) *
    integral over I_x of |g|^2 s^alpha.  Returns a boolean bad-mask."""
    if ab <= 0:
        raise DomainError("bandlimit product ab must be positive")
    xs = np.atleast_1d(np.asarray(x_list, dtype=float))
    if np.any(xs < 1.0):
        raise DomainError("window centers must be >= 1")
    bad = np.zeros(len(xs), dtype=bool)
    base = (2.0 * math.pi * ab) ** 2
    for i, x in enumerate(xs):
        ints = _window_integrals(pw, float(x), k_max)
        thresh = ints[0]
        factor = 1.0
        for k in range(1, k_max + 1):
            factor *= base
            if ints[k] >= factor * thresh:
                bad[i] = True
                break
    return bad


def bad_mass_fraction(pw: PWFunction, ab: float, x_list, k_max: int) -> float:
    """Fraction of the squared-variable energy carried by the union of bad
    windows, against the closed-form total (Gamma(alpha+1)/pi^(alpha+1)) ||f||^2."""
    xs = np.atleast_1d(np.asarray(x_list, dtype=float))
    bad = good_bad_partition(pw, ab, xs, k_max)
    windows = [((x - 1.0) ** 2, (x + 1.0) ** 2) for x in xs[bad]]
    if not windows:
        return 0.0
    union = IntervalSet.of(windows)
    alpha = pw.order.alpha
    total = float(np.dot(pw.mu_hat_weights(), pw.coeffs**2))
    dens = mu_density_constant(pw.order)
    # integrate back in the root variable x = sqrt(s): the s^alpha ds mass of
    # a window equals (Gamma(a+1)/pi^(a+1)) times its mu_alpha mass, and the
    # shared constant cancels against the total; merged windows can be long,
    # so panels keep the oscillation of f resolved
    mass = 0.0
    for lo, hi in union.intervals:
        rule = panel_rule(
            math.sqrt(lo), math.sqrt(hi), max(16.0, 12.0 * pw.bandlimit)
        )
        f = synthesize(pw, rule.nodes)
        w = rule.weights * dens * rule.nodes ** (2.0 * alpha + 1.0)
        mass += float(np.dot(w, f**2))
    return mass / total


def witness_point(pw: PWFunction, ab: float, x: float, k_max: int = 8) -> float:
    """A point t in I_x where every derivative order obeys the pointwise
    growth bound t^(alpha+k) |d^k g(t)|^2 <= (12 pi^2 (ab)^2)^k * window mass,
    searched on a 1000-point grid with two tenfold refinements."""
    lo, hi = (x - 1.0) ** 2, (x + 1.0) ** 2
    ints = _window_integrals(pw, x, 0)
    mass = ints[0]
    alpha = pw.order.alpha
    base = 12.0 * math.pi**2 * ab * ab
    n = 1000
    for _ in range(3):
        ts = np.linspace(lo, hi, n)
        ok = np.ones(n, dtype=bool)
        factor = 1.0
        for k in range(0, k_max + 1):
            dk = apply_Dk(pw, k, np.sqrt(ts[ok]))
            good = ts[ok] ** (alpha + k) * dk**2 <= factor * mass * (1 + 1e-12)
            idx = np.flatnonzero(ok)
            ok[idx[~good]] = False
            if not np.any(ok):
                break
            factor *= base
        if np.any(ok):
            return float(ts[np.flatnonzero(ok)[0]])
        n *= 10
    raise InternalError(
        f"no witness point found in [{lo:.6f}, {hi:.6f}]: the pointwise "
        "growth bound has no solution here, which happens when the window "
        "fails the good-window derivative hypothesis for this ab product"
    )


# --------------------------------------------------------------------------
# analytic-growth (doubling) inequality


def _eval_phi(phi, z):
    if isinstance(phi, EntireEvenSeries):
        return phi.evaluate(z)
    coeffs = np.asarray(phi, dtype=float)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    acc = np.zeros_like(zz)
    for c in coeffs[::-1]:
        acc = acc * zz + c
    return acc


def kovrijkine_check(phi, interval, J: IntervalSet) -> tuple[float, float]:
    """Both sides of the analytic doubling inequality
    integral_I |phi|^2 <= (300 |I| / |J|)^(2 ln(M/m)/ln 2 + 1) integral_J |phi|^2
    with M the sup of |phi| on the stadium dist(z, I) < 4|I| and m its sup
    on I.  phi is a power-series coefficient sequence or an EntireEvenSeries.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if hi <= lo:
        raise DomainError("interval I is degenerate")
    if J.is_empty() or J.intersect_window(lo, hi).length() < J.length() * (1 - 1e-12):
        raise DomainError("J must be a positive-length subset of I")
    length = hi - lo
    rule = build_rule(lo, hi, 128)
    vals = np.real(_eval_phi(phi, rule.nodes))
    lhs = float(np.dot(rule.weights, vals**2))

    grid = np.linspace(lo, hi, 2001)
    m = float(np.max(np.abs(np.real(_eval_phi(phi, grid)))))
    if m == 0.0:
        raise DomainError("degenerate check: phi vanishes identically on I")

    r = 4.0 * length
    # stadium boundary: two semicircles and two horizontal edges; odd counts
    # keep the axis crossings (where polynomial moduli peak) on the grid
    t = np.linspace(0.0, math.pi, 257)
    left = lo + r * np.exp(1j * (t + math.pi / 2))
    right = hi + r * np.exp(1j * (t - math.pi / 2))
    xs = np.linspace(lo, hi, 257)
    top = xs + 1j * r
    bot = xs - 1j * r
    # coarse interior fill
    gx, gy = np.meshgrid(np.linspace(lo - r, hi + r, 64), np.linspace(-r, r, 33))
    inside = (
        (np.abs(gy) < r)
        & (
            ((gx >= lo) & (gx <= hi))
            | (np.abs(gx - lo + 1j * gy) < r)
            | (np.abs(gx - hi + 1j * gy) < r)
        )
    )
    interior = (gx + 1j * gy)[inside]
    stadium = np.concatenate([left, right, top, bot, interior])
    M = float(np.max(np.abs(_eval_phi(phi, stadium))))
    M = max(M, m)

    ratio = 300.0 * length / J.length()
    exponent = 2.0 * math.log(M / m) / math.log(2.0) + 1.0
    j_int = 0.0
    for a, b_hi in J.intervals:
        rj = build_rule(a, b_hi, 128)
        vj = np.real(_eval_phi(phi, rj.nodes))
        j_int += float(np.dot(rj.weights, vj**2))
    rhs = ratio**exponent * j_int
    return lhs, rhs


# --------------------------------------------------------------------------
# necessity-direction demonstration


@dataclass(frozen=True)
class NecessityRow:
    n: int
    s_prime: float
    a: float
    concentration: float
    concentrated: bool
    tail: float
    window_mass: float
    window_bound: float
    gamma_implied: float
    passes: bool


def density_necessity_demo(
    order: Order, omega: IntervalSet, c: float
) -> list[NecessityRow]:
    """Walk the peaked family across omega: wherever the concentration
    hypothesis (window energy fraction >= c) holds at a node, the window mass
    of omega around that node must exceed an explicit lower bound derived from
    the certified kernel envelope; a gap in omega shows up as a failed
    hypothesis row instead."""
    if not (0 < c < 1):
        raise DomainError("hypothesized concentration constant must be in (0,1)")
    alpha = order.alpha
    theta = theta_constant(order)
    c_a = certify_bound(order, 200.0).c_alpha
    c_a2 = certify_bound(order.shifted(2), 200.0).c_alpha
    big_c = 2.0 * math.pi ** (alpha + 1.0) * c_a**2 / (
        theta * math.gamma(alpha + 2.0)
    )
    a = max(5.0, 4.0 * big_c / c)
    sup = omega.sup()
    table = cached_zero_table(alpha, max(8, int(sup / math.pi) + 4))
    rows: list[NecessityRow] = []
    omega_nodes, omega_w = set_rule(omega, 12.0)
    omega_fold = omega_w * mu_density_constant(order) * omega_nodes ** (
        2 * alpha + 1
    )
    for n in range(1, len(table) + 1):
        s = table.s_prime(n)
        if s > sup:
            break
        if s < a:
            continue
        norm_sq = extremal_norm_sq(order, n)
        vals = extremal_family(order, n, omega_nodes)
        conc = float(np.dot(omega_fold, vals**2)) / norm_sq
        tail = tail_mass(order, n, a)
        win_mass = mu_measure(order, omega.intersect_window(s - a, s + a))
        bound = (
            (alpha + 2.0) ** 2
            * (alpha + 1.0)
            * c
            / (2.0 ** (2 * alpha + 8.0) * a ** (2 * alpha + 5.0) * theta * c_a2**2)
            * s ** (2 * alpha + 1.0)
        )
        gamma_implied = bound / (
            2.0 ** (2 * alpha + 3.0)
            * math.pi ** (alpha + 1.0)
            / math.gamma(alpha + 1.0)
            * a
            * s ** (2 * alpha + 1.0)
        )
        hypothesis = conc >= c
        passes = (not hypothesis) or win_mass >= bound * (1 - 1e-9)
        rows.append(
            NecessityRow(
                n=n,
                s_prime=s,
                a=a,
                concentration=conc,
                concentrated=hypothesis,
                tail=tail,
                window_mass=win_mass,
                window_bound=bound,
                gamma_implied=gamma_implied,
                passes=passes,
            )
        )
    return rows
