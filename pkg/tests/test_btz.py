import math

import numpy as np
import pytest

from multiwarp.btz import (LapseSpec, closed_form_check, constant_tau_fit, constant_tau_lapse,
                           derived_spacetime, einstein_lapse_fit, is_einstein_lapse, lapse_report,
                           lapse_to_warps, tau_of_lapse)
from multiwarp.curvature import scalar_curvature
from multiwarp.errors import DomainError, NonInvertibleError
from multiwarp.jets import Affine, Const, Quotient, T, sin
from multiwarp.presets import btz_lapse, btz_static, schwarzschild_lapse
from multiwarp.spacetime import sample_window


def family(c1, lam, c2):
    """``-c1/r + (lam/6) r^2 + c2``."""
    return Affine(Quotient(Const(-c1), T), 1.0, 0.0) + Affine(T * T, lam / 6.0, c2)


def r_grid(lo, hi, n=64):
    return np.linspace(lo, hi, n + 2)[1:-1]


def richardson_d1(f, t, h=1e-3):
    d = lambda h: (f(t + h) - f(t - h)) / (2 * h)  # noqa: E731
    return (4 * d(h / 2) - d(h)) / 3


class TestTransform:
    def test_schwarzschild(self):
        spec = schwarzschild_lapse(1.0)
        assert spec.F(1.0) == pytest.approx(math.pi / 2 - 1, abs=1e-12)
        assert spec.t_domain[1] == pytest.approx(math.pi, abs=1e-8)
        assert spec.F(2.0) == pytest.approx(math.pi, abs=1e-8)
        chk = closed_form_check(spec)
        assert chk["F"] <= 1e-10 and chk["F_inverse"] <= 1e-10 and chk["F_upper_limit"] <= 1e-8

    @pytest.mark.parametrize("m", [0.5, 3.0])
    def test_schwarzschild_limit_scales(self, m):
        assert schwarzschild_lapse(m).t_domain[1] == pytest.approx(m * math.pi, rel=1e-9)

    def test_btz_arcsin(self):
        spec = btz_lapse(1.0, 1.0)
        for r in (0.1, 0.5, 0.9):
            assert spec.F(r) == pytest.approx(math.asin(r), abs=1e-12)
        assert spec.t_domain[1] == pytest.approx(math.pi / 2, abs=1e-8)
        chk = closed_form_check(btz_lapse(2.0, 0.5))
        assert max(chk.values()) <= 1e-8

    def test_unit_lapse_is_identity(self):
        spec = LapseSpec(Const(1.0), 0.0, (0.0, 5.0))
        w = lapse_to_warps(spec)
        for t in (0.3, 2.0, 4.9):
            assert w.b2.value(t) == pytest.approx(t, abs=1e-13)
            assert w.b1.value(t) == pytest.approx(1.0, abs=1e-13)
        assert w.t_domain == (0.0, pytest.approx(5.0))

    def test_non_invertible(self):
        with pytest.raises(NonInvertibleError):
            LapseSpec(Affine(T, 1.0, -1.0), 0.0, (0.0, 2.0))
        with pytest.raises(NonInvertibleError):
            LapseSpec(Const(1.0), 3.0, (0.0, 2.0))
        with pytest.raises(DomainError):
            btz_lapse().F(2.0)
        with pytest.raises(DomainError):
            btz_lapse().F_inverse(10.0)
        with pytest.raises(ValueError):
            closed_form_check(LapseSpec(Const(1.0), 0.0, (0.0, 1.0)))


def random_lapses(seed, n):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a, b, c = rng.uniform(-0.5, 0.5, size=3)
        n2 = Affine(T * T, a, 4.0) + Affine(T, b, 0.0) + Affine(sin(Affine(T, 2.0, 0.0)), c, 0.0)
        out.append(LapseSpec(n2, 0.2, (0.2, 2.0)))
    return out


class TestChainIdentities:
    @pytest.mark.parametrize("spec", random_lapses(5, 6), ids=lambda s: "")
    def test_derivative_identities(self, spec):
        w = lapse_to_warps(spec)
        for t in sample_window(w.t_domain, 12)[1:-1]:
            t = float(t)
            b1 = w.b1.value(t)
            b2 = w.b2.value(t)
            assert abs(richardson_d1(w.b2.value, t) - b1) <= 1e-9
            n_prime = spec.lapse.jet(b2).d1
            assert abs(richardson_d1(w.b1.value, t) - n_prime * b1) <= 1e-8
            j1, j2 = w.b1.jet(t), w.b2.jet(t)
            assert j2.d1 == pytest.approx(b1, rel=1e-14)
            assert j2.d2 == pytest.approx(n_prime * b1, rel=1e-12)
            assert j1.d2 == pytest.approx(spec.lapse.jet(b2).d2 * b1 ** 2 + n_prime ** 2 * b1, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("spec", random_lapses(6, 4) + [btz_lapse(), schwarzschild_lapse(1.0)],
                             ids=lambda s: "")
    def test_lapse_operator_matches_engine(self, spec):
        st_ = derived_spacetime(spec)
        lo, hi = spec.r_domain
        for r in r_grid(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 8):
            t = spec.F(float(r))
            assert scalar_curvature(st_, t).tau_form1 == pytest.approx(tau_of_lapse(spec, float(r)), abs=1e-7)


class TestFamilies:
    def test_tau_examples(self):
        spec = btz_lapse()
        assert tau_of_lapse(spec, 0.3) == pytest.approx(-6.0)
        assert tau_of_lapse(LapseSpec(Const(2.0), 0.0, (0.0, 1.0)), 0.5) == 0.0
        spec = LapseSpec(family(3.0, 12.0, 0.0), 1.2, (1.2, 5.0))
        assert tau_of_lapse(spec, 2.0) == pytest.approx(12.0)
        with pytest.raises(DomainError):
            tau_of_lapse(btz_lapse(), 0.0)

    def test_einstein_examples(self):
        g = r_grid(0.0, 1.0)
        assert is_einstein_lapse(btz_lapse(), g) == pytest.approx(-2.0, abs=1e-8)
        fit = einstein_lapse_fit(btz_lapse(), g)
        assert (fit.lam, fit.c1, fit.c2) == (pytest.approx(-2.0), pytest.approx(0.0, abs=1e-10), pytest.approx(1.0))
        off = LapseSpec(Affine(T * T, 0.5, 1.0) + T, 0.0, (0.0, 3.0))
        assert is_einstein_lapse(off, r_grid(0.0, 3.0)) is None
        assert is_einstein_lapse(LapseSpec(Const(5.0), 0.0, (0.0, 3.0)), r_grid(0.0, 3.0)) == pytest.approx(0.0)

    def test_constant_tau_examples(self):
        spec = LapseSpec(family(3.0, 12.0, 7.0), 0.5, (0.5, 4.0))
        assert constant_tau_lapse(spec, r_grid(0.5, 4.0)) == pytest.approx(12.0)
        fit = constant_tau_fit(spec, r_grid(0.5, 4.0))
        assert (fit.c1, fit.lam, fit.c2) == (pytest.approx(3.0), pytest.approx(12.0), pytest.approx(7.0))
        assert constant_tau_lapse(btz_lapse(1.0, 2.0), r_grid(0.0, 2.0)) == pytest.approx(-1.5)
        assert constant_tau_lapse(LapseSpec(T, 0.1, (0.1, 5.0)), r_grid(0.1, 5.0)) is None

    @pytest.mark.parametrize("m,l", [(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)])
    def test_einstein_implies_three_lambda(self, m, l):
        spec = btz_lapse(m, l)
        g = r_grid(*spec.r_domain)
        lam = is_einstein_lapse(spec, g)
        assert lam == pytest.approx(-2 / l ** 2)
        assert constant_tau_lapse(spec, g) == pytest.approx(3 * lam, abs=1e-8)
        assert abs(constant_tau_fit(spec, g).c1) <= 1e-8

    def test_report(self):
        rep = lapse_report(btz_lapse(), r_grid(0.0, 1.0))
        assert rep["einstein_lambda"] == pytest.approx(-2.0)
        assert rep["tau"] == pytest.approx(-6.0)
        assert rep["t_domain"][1] == pytest.approx(math.pi / 2, abs=1e-8)


def test_btz_spacetime_uses_two_lines():
    st_ = btz_static()
    assert st_.dims == [1, 1] and st_.n == 3
