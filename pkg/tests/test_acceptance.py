"""End-to-end acceptance checks, each with a runtime budget.

Every check prints one ``PASS/FAIL criterion N`` line; the lines are also
repeated in the pytest terminal summary.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction as Q

import numpy as np
import pytest

from helpers import ACCEPTANCE_LOG, random_kasner, random_spacetime
from multiwarp.btz import (LapseSpec, closed_form_check, constant_tau_lapse, einstein_lapse_fit, is_einstein_lapse,
                          tau_of_lapse)
from multiwarp.cli.config import RunConfig
from multiwarp.cli.main import EXIT_OK, cmd_verify
from multiwarp.curvature import scalar_curvature
from multiwarp.einstein import einstein_residuals, infer_lambda
from multiwarp.errors import DegenerateError
from multiwarp.jets import Affine, Const, Quotient, ScalarJet, T, sin
from multiwarp.kasner import LgSpec, kasner_einstein_terms, lg_apply, printed_psi_reduction, psi_residual
from multiwarp.oracle import compare
from multiwarp.presets import btz_lapse, btz_static, kasner, schwarzschild_lapse
from multiwarp.roots import constant_solution_count, family_terms, threshold_tau
from multiwarp.spacetime import sample_window
from multiwarp.tables import TABLE1, TABLE2, TABLE3, matching_rows
from test_tables import T1_ROWS, T2_ROWS, T3_ROWS, _draw, _rand_q, _type2_sample, t1, t2, t3, zeta_eta


@contextmanager
def criterion(n: int, budget: float):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        verdict = "PASS" if ok and elapsed < budget else "FAIL"
        line = f"{verdict} criterion {n} ({elapsed:.2f} s, budget {budget:g} s)"
        ACCEPTANCE_LOG.append(line)
        print(line)
    assert elapsed < budget, f"criterion {n} took {elapsed:.2f} s"


def test_criterion_01_kasner_ricci_flat():
    with criterion(1, 1.0):
        st = kasner((-1 / 3, 2 / 3, 2 / 3))
        grid = np.linspace(0.05, 20.0, 128)
        rep = einstein_residuals(st, 0.0, grid)
        assert rep.residual_condition2 <= 1e-10 and max(rep.residual_condition3) <= 1e-10
        assert max(abs(scalar_curvature(st, float(t)).tau_form1) for t in grid) <= 1e-10


def test_criterion_02_static_btz():
    with criterion(2, 2.0):
        st = btz_static(1.0, 1.0)
        grid = sample_window(st.interval, 64)
        assert max(abs(scalar_curvature(st, float(t)).tau_form1 + 6.0) for t in grid) <= 1e-8
        assert infer_lambda(st, grid) == pytest.approx(-2.0, abs=1e-8)
        spec = btz_lapse(1.0, 1.0)
        r = np.linspace(0.0, 1.0, 66)[1:-1]
        fit = einstein_lapse_fit(spec, r)
        assert is_einstein_lapse(spec, r) == pytest.approx(-2.0, abs=1e-8)
        assert fit.lam == pytest.approx(-2.0, abs=1e-8)
        assert fit.c1 == pytest.approx(0.0, abs=1e-8) and fit.c2 == pytest.approx(1.0, abs=1e-8)


def _family(c1, lam, c2):
    return Affine(Quotient(Const(-c1), T), 1.0, 0.0) + Affine(T * T, lam / 6.0, c2)


def _positive_on(n2, lo, hi):
    return all(n2.jet(float(r)).value > 0 for r in np.linspace(lo, hi, 200))


def test_criterion_03_lapse_family():
    rng = np.random.default_rng(2024)
    lo, hi = 0.5, 2.0
    r = np.linspace(lo, hi, 34)[1:-1]
    with criterion(3, 5.0):
        inside = outside = 0
        while inside < 20:
            c1, lam, c2 = rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(0.5, 3)
            n2 = _family(c1, lam, c2)
            if not _positive_on(n2, lo, hi):
                continue
            spec = LapseSpec(n2, lo, (lo, hi))
            assert max(abs(tau_of_lapse(spec, float(x)) - lam) for x in r) <= 1e-8
            assert constant_tau_lapse(spec, r) == pytest.approx(lam, abs=1e-8)
            inside += 1
        while outside < 20:
            c1, lam, c2 = rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(2, 4)
            a = rng.uniform(0.2, 1.0) * rng.choice([-1, 1])
            extra = Affine(T * T * T, a / 10, 0.0) if rng.random() < 0.5 else Affine(sin(T), a, 0.0)
            n2 = _family(c1, lam, c2) + extra
            if not _positive_on(n2, lo, hi):
                continue
            assert constant_tau_lapse(LapseSpec(n2, lo, (lo, hi)), r) is None
            outside += 1


def test_criterion_04_scalar_forms():
    rng = np.random.default_rng(4)
    with criterion(4, 10.0):
        for _ in range(500):
            st = random_spacetime(rng)
            t = float(rng.uniform(*st.interval))
            f1, f2, fpsi = scalar_curvature(st, t)
            scale = max(1.0, abs(f1))
            assert abs(f1 - f2) <= 1e-10 * scale and abs(f1 - fpsi) <= 1e-10 * scale


def test_criterion_05_oracle():
    rng = np.random.default_rng(5)
    with criterion(5, 120.0):
        worst = 0.0
        for _ in range(200):
            st = random_spacetime(rng, with_model=True)
            grid = rng.uniform(st.interval[0] + 0.1, st.interval[1] - 0.1, size=2)
            for rep in compare(st, grid, tol=1e-6):
                worst = max(worst, max(c["rel_diff"] for c in rep.comparisons))
                assert rep.passed, rep.to_dict()
        assert worst <= 1e-6


def test_criterion_06_lg_identity():
    rng = np.random.default_rng(6)
    with criterion(6, 1.0):
        for _ in range(1000):
            terms = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(int(rng.integers(1, 5)))]
            spec = LgSpec(terms)
            v = ScalarJet(rng.uniform(0.3, 3.0), rng.uniform(-2, 2), rng.uniform(-2, 2))
            d, c, red = lg_apply(spec, v)
            scale = max(1.0, abs(d))
            assert abs(d - c) <= 1e-11 * scale
            if red is not None:
                assert abs(d - red) <= 1e-11 * scale


def test_criterion_07_tables():
    rng = np.random.default_rng(7)
    with criterion(7, 1.0):
        for row, args in T1_ROWS:
            got = t1(*map(Q, args))
            assert got.row == row and got.is_no_metric == (row in (3, 9))
        for row, args in T2_ROWS:
            assert t2(*map(Q, args)).row == row
        for row, (p, lam) in T3_ROWS:
            assert t3([Q(x) for x in p], Q(lam)).row == row
        for _ in range(1000):
            p1, p2 = _type2_sample(rng)
            lam = _draw(rng, [Q(0), _rand_q(rng)])
            lf = _draw(rng, [Q(0), lam, _rand_q(rng)])
            z, e = zeta_eta((1, 2), (p1, p2))
            assert len(matching_rows(TABLE1, (z, e, lam, lf, p1, p2))) <= 1
        for _ in range(1000):
            p1, p2 = _type2_sample(rng)
            z, e = zeta_eta((1, 2), (p1, p2))
            assert len(matching_rows(TABLE2, (z, e, _draw(rng, [Q(0), _rand_q(rng)]), p1, p2))) == 1
        for _ in range(1000):
            p = [_draw(rng, [Q(0), _rand_q(rng)]) for _ in range(3)]
            lam = _draw(rng, [Q(0), abs(_rand_q(rng)), -abs(_rand_q(rng))])
            z, e = zeta_eta((1, 1, 1), p)
            assert len(matching_rows(TABLE3, (z, e, lam, *p))) <= 1


def test_criterion_08_sphere_thresholds():
    with criterion(8, 2.0):
        for tau, count in ((11.9, 0), (12.0, 1), (12.1, 2)):
            assert constant_solution_count(tau, family_terms("IIIs2", tau_s3=6.0)).count == count
        terms = family_terms("IIIs", 6.0, 2.0)
        a, _ = threshold_tau(terms, n=10_000)
        b, _ = threshold_tau(terms, n=40_000)
        assert abs(a - b) <= 1e-6


def test_criterion_09_schwarzschild():
    with criterion(9, 10.0):
        rc = RunConfig.from_mapping({"preset": "schwarzschild_interior", "m": 1.0})
        payload, code = cmd_verify(rc, tol=1e-5)
        assert code == EXIT_OK and payload["passed"]
        spec = schwarzschild_lapse(1.0)
        assert spec.F(2.0) == pytest.approx(math.pi, abs=1e-8)
        assert closed_form_check(spec)["F_upper_limit"] <= 1e-8


def test_criterion_10_psi_coherence():
    rng = np.random.default_rng(10)
    with criterion(10, 5.0):
        printed_failures = 0
        for _ in range(200):
            k = random_kasner(rng)
            lam = float(rng.uniform(-2, 2))
            classical = abs(k.zeta - 1.0) < 1e-12 and abs(k.eta - 1.0) < 1e-12
            for t in rng.uniform(0.6, 2.4, size=2):
                terms = kasner_einstein_terms(k, lam, float(t))
                for i in range(len(k.exponents)):
                    try:
                        got = psi_residual(k, i, float(t))
                    except DegenerateError:
                        continue
                    want = terms["cond2"] - terms["cond3"][i]
                    assert abs(got - want) <= 1e-10 * max(1.0, abs(want), abs(terms["cond2"]) + abs(lam))
                    if classical:
                        continue
                    try:
                        bad = psi_residual(k, i, float(t), printed_psi_reduction(k, i))
                    except (DegenerateError, ArithmeticError, ValueError):
                        printed_failures += 1
                        continue
                    if not abs(bad - want) <= 1e-10 * max(1.0, abs(want)):
                        printed_failures += 1
        assert printed_failures >= 1
