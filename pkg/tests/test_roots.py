import math

import pytest

from multiwarp.errors import BracketError, ValidationError
from multiwarp.roots import constant_solution_count, family_terms, threshold_tau

TAU1 = 4 * math.sqrt(3)   # min of 6 u^(-2/3) + 2 u^(2/3), by AM-GM


@pytest.mark.parametrize("tau,count", [(11.9, 0), (12.0, 1), (12.1, 2), (6.0, 0), (30.0, 2)])
def test_two_sphere_family(tau, count):
    rc = constant_solution_count(tau, family_terms("IIIs2", tau_s3=6.0))
    assert rc.count == count
    assert list(rc.roots) == sorted(rc.roots)
    for u in rc.roots:
        assert tau * u * u == pytest.approx(6.0 * (1 + u ** 4), rel=1e-9)


def test_tangential_root_is_one():
    rc = constant_solution_count(12.0, family_terms("IIIs2"))
    assert rc.roots == (pytest.approx(1.0, abs=1e-6),)
    assert rc.tangential == rc.roots


def test_threshold_of_mixed_family():
    tau1, u1 = threshold_tau(family_terms("IIIs", 6.0, 2.0))
    assert tau1 == pytest.approx(TAU1, rel=1e-10)
    assert u1 == pytest.approx(3 ** 0.75, rel=1e-5)
    assert constant_solution_count(tau1 + 1, family_terms("IIIs")).count == 2
    assert constant_solution_count(tau1 - 1, family_terms("IIIs")).count == 0


def test_threshold_stable_under_refinement():
    terms = family_terms("IIIs")
    a, _ = threshold_tau(terms, n=10_000)
    b, _ = threshold_tau(terms, n=40_000)
    assert abs(a - b) <= 1e-6


def test_threshold_of_two_sphere_family():
    tau, u = threshold_tau(family_terms("IIIs2", 6.0))
    assert tau == pytest.approx(12.0, rel=1e-12) and u == pytest.approx(1.0, rel=1e-5)


def test_unstable_count_raises():
    with pytest.raises(BracketError):
        constant_solution_count(1.0, [(1.0 / 1.5e6, 2.0)])


def test_boundary_minimum_raises():
    with pytest.raises(BracketError):
        threshold_tau([(1.0, 2.0)])


@pytest.mark.parametrize("kwargs", [
    dict(tau=1.0, terms=[]), dict(tau=1.0, terms=[(math.inf, 1.0)]),
    dict(tau=1.0, terms=[(1.0, 2.0)], u_max=1e-9),
])
def test_validation(kwargs):
    with pytest.raises(ValidationError):
        constant_solution_count(**kwargs)


def test_unknown_family():
    with pytest.raises(ValidationError):
        family_terms("IV")


def test_record():
    d = constant_solution_count(12.1, family_terms("IIIs2")).to_dict()
    assert d["count"] == 2 and d["u_max"] == 1e6 and len(d["roots"]) == 2
