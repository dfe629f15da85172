import math

import numpy as np
import pytest
from scipy.integrate import quad

from hconc.bessel import Order, eval_j
from hconc.errors import DomainError
from hconc.measure import IntervalSet, mu_density_constant, mu_measure
from hconc.quadrature import (
    QuadratureRule,
    SampledFunction,
    build_rule,
    default_transform_nodes,
    panel_rule,
    set_rule,
)
from hconc.transform import dilate, forward, inverse, mu_weights, norm_l2, norm_lp


def test_build_rule_polynomial_exactness():
    rule = build_rule(0.5, 3.0, 8)
    for k in range(16):  # degree 2n-1 = 15
        exact = (3.0 ** (k + 1) - 0.5 ** (k + 1)) / (k + 1)
        assert rule.integrate(rule.nodes**k) == pytest.approx(exact, rel=1e-13)


def test_build_rule_validation():
    with pytest.raises(DomainError):
        build_rule(1.0, 1.0, 8)
    with pytest.raises(DomainError):
        build_rule(0.0, 1.0, 1)
    with pytest.raises(DomainError):
        build_rule(0.0, 1.0, 10**5 + 1)
    with pytest.raises(DomainError):
        build_rule(0.0, float("nan"), 8)


def test_panel_rule_oscillatory_vs_quad():
    rule = panel_rule(0.0, 30.0, 12.0)
    val = rule.integrate(np.cos(7.0 * rule.nodes) * np.exp(-0.1 * rule.nodes))
    ref = quad(lambda x: math.cos(7.0 * x) * math.exp(-0.1 * x), 0, 30, limit=400)[0]
    assert val == pytest.approx(ref, abs=1e-12)


def test_panel_rule_weight_total():
    rule = panel_rule(2.0, 9.5, 10.0)
    assert np.sum(rule.weights) == pytest.approx(7.5, rel=1e-14)
    assert np.all(rule.weights > 0)
    assert np.all((rule.nodes > 2.0) & (rule.nodes < 9.5))


def test_set_rule_matches_per_interval_quadrature():
    subset = IntervalSet.of([(0.0, 1.0), (2.0, 3.5)])
    nodes, weights = set_rule(subset, 20.0)
    assert np.sum(weights) == pytest.approx(2.5, rel=1e-14)
    val = float(np.dot(weights, np.exp(-nodes)))
    ref = sum(quad(lambda x: math.exp(-x), lo, hi)[0] for lo, hi in subset.intervals)
    assert val == pytest.approx(ref, rel=1e-13)
    empty_nodes, empty_weights = set_rule(IntervalSet.empty(), 20.0)
    assert len(empty_nodes) == 0 and len(empty_weights) == 0


def test_default_transform_nodes_heuristic():
    assert default_transform_nodes(1.0, 1.0) == 36
    assert default_transform_nodes(10.0, 5.0) > default_transform_nodes(5.0, 5.0)


def test_sampled_function_validation():
    rule = build_rule(0.0, 1.0, 8)
    with pytest.raises(DomainError):
        SampledFunction(rule=rule, values=np.zeros(7))
    with pytest.raises(DomainError):
        QuadratureRule((0.0, 1.0), np.zeros(4), np.zeros(5))


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.8, 2.0])
def test_mu_weights_total_mass(alpha):
    order = Order(alpha)
    rule = build_rule(0.3, 2.1, 48)
    total = float(np.sum(mu_weights(order, rule)))
    assert total == pytest.approx(
        mu_measure(order, IntervalSet.of([(0.3, 2.1)])), rel=1e-13
    )


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.3])
def test_gaussian_is_self_reciprocal(alpha):
    # exp(-pi x^2) is a fixed point of the transform at every order; fractional
    # alpha needs denser panels since x^(2 alpha + 1) is not polynomial at 0
    order = Order(alpha)
    rule = panel_rule(0.0, 8.0, 48.0)
    f = SampledFunction(rule=rule, values=np.exp(-np.pi * rule.nodes**2))
    ys = np.linspace(0.0, 3.0, 31)
    got = forward(order, f, ys)
    assert np.max(np.abs(got - np.exp(-np.pi * ys**2))) < 5e-12


def test_forward_matches_direct_quadrature_oracle():
    order = Order(0.7)
    rule = panel_rule(0.0, 7.0, 96.0)
    f = SampledFunction(rule=rule, values=np.exp(-rule.nodes**2))
    dens = mu_density_constant(order)
    for y in (0.3, 1.1):
        got = forward(order, f, np.array([y]))[0]
        ref = quad(
            lambda x: math.exp(-x * x)
            * float(eval_j(order, np.array([2.0 * np.pi * x * y]))[0])
            * dens
            * x ** (2 * 0.7 + 1),
            0.0,
            7.0,
            limit=400,
            epsabs=1e-13,
        )[0]
        assert got == pytest.approx(ref, rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0])
def test_transform_roundtrip_on_gaussian(alpha):
    order = Order(alpha)
    rule = panel_rule(0.0, 6.0, 34.0)
    f_vals = np.exp(-np.pi * rule.nodes**2)
    f = SampledFunction(rule=rule, values=f_vals)
    F = SampledFunction(rule=rule, values=forward(order, f, rule.nodes))
    back = inverse(order, F, rule.nodes)
    assert np.max(np.abs(back - f_vals)) < 1e-10


def test_plancherel_for_gaussian():
    # norm preservation, checked against the closed form of the x-side norm
    order = Order(0.5)
    rule = panel_rule(0.0, 8.0, 30.0)
    f = SampledFunction(rule=rule, values=np.exp(-np.pi * rule.nodes**2))
    F = SampledFunction(rule=rule, values=forward(order, f, rule.nodes))
    assert norm_l2(order, F) == pytest.approx(norm_l2(order, f), rel=1e-12)


def test_dilate_is_isometric_and_covariant():
    order = Order(0.3)
    rule = panel_rule(0.0, 5.0, 30.0)
    f = SampledFunction(rule=rule, values=np.exp(-rule.nodes**2) * rule.nodes)
    lam = 1.7
    g = dilate(order, lam, f)
    assert norm_l2(order, g) == pytest.approx(norm_l2(order, f), rel=1e-13)
    # transform swaps dilation by lam for dilation by 1/lam
    ys = np.linspace(0.1, 2.0, 7)
    lhs = forward(order, g, ys)
    rhs = lam ** (order.alpha + 1.0) * forward(order, f, lam * ys)
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    with pytest.raises(DomainError):
        dilate(order, 0.0, f)
    with pytest.raises(DomainError):
        dilate(order, float("inf"), f)


def test_norm_lp_consistency():
    order = Order(0.0)
    rule = build_rule(0.1, 2.0, 64)
    f = SampledFunction(rule=rule, values=np.sin(rule.nodes))
    assert norm_lp(order, f, 2.0) == pytest.approx(norm_l2(order, f), rel=1e-13)
    # p = 1 of a nonnegative function is its mu-integral
    g = SampledFunction(rule=rule, values=np.ones(len(rule)))
    assert norm_lp(order, g, 1.0) == pytest.approx(
        mu_measure(order, IntervalSet.of([(0.1, 2.0)])), rel=1e-13
    )
    with pytest.raises(DomainError):
        norm_lp(order, f, 0.5)
