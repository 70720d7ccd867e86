import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import points, rel, warps
from multiwarp.errors import DomainError, PositivityError
from multiwarp.jets import (Affine, Compose, Const, Inverse, Power, Quotient, ScalarJet, T, WarpFn, arccos,
                            arcsin, cos, eval_jet, exp, jet_power, power_rule_identities, sin, sqrt)
from multiwarp.presets import schwarzschild_lapse


def fd(f, t, h):
    """Richardson-extrapolated central differences of a scalar function."""
    def once(h):
        d1 = (f(t + h) - f(t - h)) / (2 * h)
        d2 = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)
        return d1, d2
    a1, a2 = once(h)
    b1, b2 = once(h / 2)
    return (4 * b1 - a1) / 3, (4 * b2 - a2) / 3


def test_polynomial_jet():
    assert (T ** 2).jet(3.0) == ScalarJet(9.0, 6.0, 2.0)


def test_exponential_jet():
    j = exp(2 * T).jet(0.0)
    assert (j.value, j.d1, j.d2) == (1.0, 2.0, 4.0)


@pytest.mark.parametrize("expr,t,expected", [
    (sin(T), 0.7, (math.sin(0.7), math.cos(0.7), -math.sin(0.7))),
    (cos(T), 0.7, (math.cos(0.7), -math.sin(0.7), -math.cos(0.7))),
    (sqrt(T), 4.0, (2.0, 0.25, -1.0 / 32.0)),
    (arcsin(T), 0.5, (math.asin(0.5), 1 / math.sqrt(0.75), 0.5 / 0.75 ** 1.5)),
    (arccos(T), 0.5, (math.acos(0.5), -1 / math.sqrt(0.75), -0.5 / 0.75 ** 1.5)),
    (Power(T, -0.5), 4.0, (0.5, -1.0 / 16.0, 3.0 / 128.0)),
    (Quotient(Const(1.0), T), 2.0, (0.5, -0.25, 0.25)),
    (Affine(T * T, 3.0, 1.0), 2.0, (13.0, 12.0, 6.0)),
])
def test_primitives_match_hand_derivatives(expr, t, expected):
    j = expr.jet(t)
    for got, want in zip((j.value, j.d1, j.d2), expected):
        assert got == pytest.approx(want, rel=1e-14, abs=1e-15)


def test_product_and_chain_rules():
    f = T ** 2 * exp(2 * T)
    j = f.jet(1.0)
    e2 = math.exp(2.0)
    assert j.value == pytest.approx(e2)
    assert j.d1 == pytest.approx((2 + 2) * e2)
    assert j.d2 == pytest.approx((2 + 8 + 4) * e2)
    g = Compose(sin(T), T * T)
    j = g.jet(0.8)
    x = 0.64
    assert j.d1 == pytest.approx(math.cos(x) * 1.6)
    assert j.d2 == pytest.approx(-math.sin(x) * 1.6 ** 2 + math.cos(x) * 2)


def test_domain_is_open():
    w = WarpFn(T, domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        w.jet(0.0)
    with pytest.raises(DomainError):
        w.jet(1.0)
    assert w.jet(0.5).value == 0.5


def test_positivity_error_for_warps():
    w = WarpFn(Affine(T, 1.0, -1.0), domain=(0.0, 2.0))
    with pytest.raises(PositivityError) as exc:
        eval_jet(w, 0.5, warp=True)
    assert exc.value.t == 0.5
    assert eval_jet(w, 0.5).value == -0.5


def test_real_power_of_negative_value_rejected():
    with pytest.raises(DomainError):
        Power(Affine(T, 1.0, -2.0), 0.5).value(1.0)
    with pytest.raises(DomainError):
        jet_power(ScalarJet(-1.0, 0.0, 0.0), 0.5)
    assert jet_power(ScalarJet(-2.0, 1.0, 0.0), 2.0).value == 4.0


def test_schwarzschild_warp_jet_matches_finite_differences():
    spec = schwarzschild_lapse(1.0)
    t = spec.F(1.0)
    assert t == pytest.approx(math.pi / 2 - 1, abs=1e-12)
    from multiwarp.btz import lapse_to_warps
    b1 = lapse_to_warps(spec).b1
    j = b1.jet(t)
    assert j.value == pytest.approx(1.0, abs=1e-11)
    for h in (1e-3, 1e-4):
        d1, d2 = fd(b1.value, t, h)
        assert d1 == pytest.approx(j.d1, rel=1e-6)
        assert d2 == pytest.approx(j.d2, rel=1e-4)


@pytest.mark.parametrize("v,p,expected", [
    (ScalarJet(1.0, 0.0, 0.0), 3.7, (0.0, 0.0)),
    (ScalarJet(2.0, 1.0, 0.0), 2.0, (4.0, 2.0)),
    (ScalarJet(math.e, math.e, math.e), 3.0, (3 * math.e ** 3, 9 * math.e ** 3)),
])
def test_power_rule_examples(v, p, expected):
    g, lap = power_rule_identities(v, p)
    assert g == pytest.approx(expected[0], rel=1e-14, abs=1e-300)
    assert lap == pytest.approx(expected[1], rel=1e-14, abs=1e-300)


def test_power_rule_needs_positive_value():
    with pytest.raises(PositivityError):
        power_rule_identities(ScalarJet(0.0, 1.0, 0.0), 2.0)


@given(v=st.floats(0.1, 10.0), d1=st.floats(-5.0, 5.0), d2=st.floats(-5.0, 5.0), p=st.floats(-3.0, 3.0))
def test_power_rule_equals_jet_power(v, d1, d2, p):
    jet = jet_power(ScalarJet(v, d1, d2), p)
    g, lap = power_rule_identities(ScalarJet(v, d1, d2), p)
    scale = max(1.0, abs(v) ** p * (1 + abs(d1) + abs(d2)) ** 2 * (1 + abs(p)) ** 2 / min(v, 1.0) ** 2)
    assert abs(g - jet.d1) <= 1e-12 * scale
    assert abs(lap - jet.d2) <= 1e-12 * scale


@given(f=warps(), t=points)
def test_random_expressions_match_finite_differences(f, t):
    j = f.jet(t)
    d1, d2 = fd(f.value, t, 1e-3)
    scale = max(1.0, abs(j.value))
    assert abs(d1 - j.d1) <= 1e-6 * max(scale, abs(j.d1))
    assert abs(d2 - j.d2) <= 1e-4 * max(scale, abs(j.d2), abs(j.d1))


@given(f=warps(), t=points)
def test_value_agrees_with_jet_value(f, t):
    assert rel(f.value(t), f.jet(t).value) <= 1e-13


def test_inverse_expression():
    inv = Inverse(exp(T), -5.0, 5.0)
    j = inv.jet(2.0)
    assert j.value == pytest.approx(math.log(2.0), rel=1e-14)
    assert j.d1 == pytest.approx(0.5, rel=1e-12)
    assert j.d2 == pytest.approx(-0.25, rel=1e-12)
    with pytest.raises(DomainError):
        inv.value(1e5)


def test_operator_overloads_build_expected_trees():
    f = (2 * T + 1) / (T - 0.5) - 3
    for t in np.linspace(1.0, 3.0, 5):
        assert f.value(t) == pytest.approx((2 * t + 1) / (t - 0.5) - 3)
    assert (-T).value(2.0) == -2.0
    assert (1 - T).value(2.0) == -1.0
