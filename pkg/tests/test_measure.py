import math

import numpy as np
import pytest
from scipy.integrate import quad

from hconc.bessel import Order
from hconc.errors import DomainError, UsageError
from hconc.measure import (
    DensityParams,
    IntervalSet,
    ThinnessParams,
    density_profile,
    density_profile_rows,
    is_thin,
    load_interval_set,
    mu_density_constant,
    mu_measure,
    nu_measure,
)


def test_interval_set_sorts_and_merges():
    s = IntervalSet.of([(3.0, 4.0), (0.0, 1.0), (1.0, 2.0)])
    assert s.intervals == ((0.0, 2.0), (3.0, 4.0))
    assert s.length() == 3.0
    assert s.inf() == 0.0 and s.sup() == 4.0


def test_interval_set_validation():
    with pytest.raises(DomainError):
        IntervalSet.of([(1.0, 1.0)])
    with pytest.raises(DomainError):
        IntervalSet.of([(-0.5, 1.0)])
    with pytest.raises(DomainError):
        IntervalSet.of([(0.0, float("inf"))])
    assert IntervalSet.empty().is_empty()


def _member_grid(s: IntervalSet, xs: np.ndarray) -> np.ndarray:
    out = np.zeros(len(xs), dtype=bool)
    for lo, hi in s.intervals:
        out |= (xs >= lo) & (xs <= hi)
    return out


def test_set_algebra_against_membership_oracle():
    rng = np.random.default_rng(42)
    xs = np.linspace(0.0, 12.0, 4801)
    for _ in range(20):
        a = IntervalSet.of(
            [(lo, lo + w) for lo, w in zip(rng.uniform(0, 10, 4), rng.uniform(0.2, 2, 4))]
        )
        b = IntervalSet.of(
            [(lo, lo + w) for lo, w in zip(rng.uniform(0, 10, 3), rng.uniform(0.2, 2, 3))]
        )
        inter = a.intersect(b)
        union = a.union(b)
        comp = a.complement_within(0.0, 12.0)
        ma, mb = _member_grid(a, xs), _member_grid(b, xs)
        # open/closed endpoint mismatches affect finitely many grid points
        assert np.sum(_member_grid(inter, xs) != (ma & mb)) <= 16
        assert np.sum(_member_grid(union, xs) != (ma | mb)) <= 16
        assert np.sum(_member_grid(comp, xs) != ~ma) <= 16


def test_window_and_scale_operations():
    s = IntervalSet.of([(0.0, 2.0), (3.0, 5.0)])
    w = s.intersect_window(1.0, 3.5)
    assert w.intervals == ((1.0, 2.0), (3.0, 3.5))
    assert s.scaled(2.0).intervals == ((0.0, 4.0), (6.0, 10.0))
    with pytest.raises(DomainError):
        s.scaled(0.0)


@pytest.mark.parametrize("alpha", [-0.5, -0.2, 0.0, 0.5, 1.0, 3.0])
def test_mu_measure_matches_quadrature(alpha):
    order = Order(alpha)
    subset = IntervalSet.of([(0.1, 0.9), (1.5, 2.7), (4.0, 4.2)])
    dens = mu_density_constant(order)
    ref = sum(
        quad(lambda x: dens * x ** (2 * alpha + 1), lo, hi, epsabs=1e-14)[0]
        for lo, hi in subset.intervals
    )
    assert mu_measure(order, subset) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0])
def test_nu_measure_matches_quadrature(alpha):
    order = Order(alpha)
    subset = IntervalSet.of([(0.2, 1.3), (2.0, 2.8)])
    dens = 2.0 * math.pi ** (alpha + 1.0) / math.gamma(alpha + 1.0)
    # same density with the power halved: x^alpha instead of x^(2 alpha + 1)
    ref = sum(
        quad(lambda x: 0.5 * dens * x**alpha, lo, hi, epsabs=1e-14)[0]
        for lo, hi in subset.intervals
    )
    assert nu_measure(order, subset) == pytest.approx(ref, rel=1e-12)


def test_mu_measure_at_half_order_is_twice_length():
    # at alpha = -1/2 the density is the constant 2 (even-extension doubling)
    order = Order(-0.5)
    subset = IntervalSet.of([(0.5, 2.5)])
    assert mu_measure(order, subset) == pytest.approx(4.0, rel=1e-14)


def test_density_profile_periodic_frozen():
    evens = IntervalSet.of([(2 * k, 2 * k + 1) for k in range(30)])
    gmin, argmin = density_profile(Order(0.0), evens, 1.0, 59.0)
    assert gmin == pytest.approx(0.25, abs=1e-14)
    assert argmin == pytest.approx(1.0, abs=1e-12)
    gmin5, argmin5 = density_profile(Order(0.5), evens, 1.0, 59.0)
    assert gmin5 == pytest.approx(0.125, abs=1e-14)
    assert argmin5 == pytest.approx(1.0, abs=1e-12)


def test_density_profile_against_bruteforce_scan():
    rng = np.random.default_rng(7)
    pieces = sorted(rng.uniform(0.0, 20.0, 8))
    subset = IntervalSet.of(
        [(pieces[2 * i], pieces[2 * i + 1]) for i in range(4)]
    )
    order = Order(0.7)
    a = 1.5
    gmin, argmin = density_profile(order, subset, a, 18.0, step=0.01)
    xs = a + 0.01 * np.arange(int((18.0 - a) / 0.01) + 1)
    ratios = []
    for x in xs:
        win = IntervalSet.of([(max(x - a, 0.0), x + a)])
        num = mu_measure(order, subset.intersect(win))
        ratios.append(num / mu_measure(order, win))
    k = int(np.argmin(ratios))
    assert gmin == pytest.approx(ratios[k], rel=1e-12)
    assert argmin == pytest.approx(xs[k], abs=1e-9)


def test_density_profile_domain_errors():
    s = IntervalSet.of([(0.0, 1.0)])
    with pytest.raises(DomainError):
        density_profile(Order(0.0), s, 2.0, 1.0)
    with pytest.raises(DomainError):
        density_profile(Order(0.0), s, -1.0, 5.0)


def test_density_profile_rows_shapes():
    s = IntervalSet.of([(0.0, 1.0), (2.0, 3.0)])
    xs, ratios = density_profile_rows(Order(0.0), s, 1.0, 3.0, step=0.5)
    assert len(xs) == len(ratios) == 5
    assert np.all((0.0 <= ratios) & (ratios <= 1.0))


def test_density_params_validation():
    with pytest.raises(DomainError):
        DensityParams(gamma=0.0, a=1.0)
    with pytest.raises(DomainError):
        DensityParams(gamma=1.1, a=1.0)
    with pytest.raises(DomainError):
        DensityParams(gamma=0.5, a=0.0)
    with pytest.raises(DomainError):
        ThinnessParams(eps=1.0)


def test_is_thin_separates_sparse_from_fat():
    order = Order(0.0)
    thin = IntervalSet.of([(k + 0.0, k + 0.001) for k in range(1, 30)])
    fat = IntervalSet.of([(k + 0.0, k + 0.9) for k in range(1, 30)])
    assert is_thin(order, thin, ThinnessParams(eps=0.05), 30.0)
    assert not is_thin(order, fat, ThinnessParams(eps=0.05), 30.0)


def test_is_thin_bruteforce_windows():
    order = Order(0.5)
    subset = IntervalSet.of([(2.0, 2.2), (5.0, 5.1), (9.0, 9.05)])
    eps = 0.2
    verdict = is_thin(order, subset, ThinnessParams(eps=eps), 12.0)
    worst = 0.0
    for x in np.linspace(0.0, 1.0, 2001):
        win = IntervalSet.of([(x, x + 1.0)])
        worst = max(worst, mu_measure(order, subset.intersect(win)) / mu_measure(order, win))
    for x in np.linspace(1.0, 12.0, 8001):
        win = IntervalSet.of([(x, x + 1.0 / x)])
        worst = max(worst, mu_measure(order, subset.intersect(win)) / mu_measure(order, win))
    assert verdict == (worst <= eps * (1 + 1e-9))


def test_load_interval_set(tmp_path):
    p = tmp_path / "sets.set"
    p.write_text("# comment\n0 1\n\n2.5 3.75\n")
    s = load_interval_set(str(p))
    assert s.intervals == ((0.0, 1.0), (2.5, 3.75))
    bad = tmp_path / "bad.set"
    bad.write_text("0 1\nnot numbers\n")
    with pytest.raises(UsageError, match=":2:"):
        load_interval_set(str(bad))
    with pytest.raises(UsageError):
        load_interval_set(str(tmp_path / "missing.set"))
