import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import grid, spacetimes
from multiwarp.curvature import scalar_curvature
from multiwarp.einstein import constant_scalar_check, einstein_auto, einstein_residuals, infer_lambda
from multiwarp.errors import MissingDataError
from multiwarp.jets import Affine, T, exp
from multiwarp.presets import btz_static, kasner
from multiwarp.spacetime import FiberSpec, KasnerSpec, WarpedSpacetime, kasner_to_mgrw


def trivial():
    return WarpedSpacetime((0.0, math.inf), ((FiberSpec(3, einstein_lambda=0.0), 1.0),))


def exponential_flat(dims, c):
    """Flat fibers all warped by ``e^{ct}``: Einstein with ``lambda = S c^2``."""
    w = exp(Affine(T, c, 0.0))
    return WarpedSpacetime((-1.0, 1.0), tuple((FiberSpec(s, einstein_lambda=0.0), w) for s in dims))


KASNER_GRID = np.linspace(0.1, 10.0, 128)


def test_trivial_product():
    rep = einstein_residuals(trivial(), 0.0, np.linspace(0.1, 5, 16))
    assert rep.verdict == "Einstein" and rep.lam == 0.0
    assert rep.residual_condition2 == 0.0 and rep.residual_condition3 == [0.0]


def test_kasner():
    rep = einstein_residuals(kasner(), 0.0, KASNER_GRID)
    assert rep.is_einstein
    assert rep.residual_condition2 <= 1e-10 and max(rep.residual_condition3) <= 1e-10
    assert infer_lambda(kasner(), KASNER_GRID) == pytest.approx(0.0, abs=1e-10)


def test_btz():
    st_ = btz_static(1.0, 1.0)
    pts = grid(32, st_.interval)
    rep = einstein_residuals(st_, -2.0, pts)
    assert rep.is_einstein
    assert rep.residual_condition2 <= 1e-8 and max(rep.residual_condition3) <= 1e-8
    assert rep.tau == pytest.approx(-6.0, abs=1e-8)
    assert infer_lambda(st_, pts) == pytest.approx(-2.0, abs=1e-8)
    assert constant_scalar_check(st_, pts) == pytest.approx(-6.0, abs=1e-8)


def test_non_einstein_warps():
    st_ = WarpedSpacetime((0.5, 2.0), ((FiberSpec(1), T), (FiberSpec(2, einstein_lambda=1.0), T ** 2)))
    pts = grid(16, st_.interval)
    assert infer_lambda(st_, pts) is None
    rep = einstein_auto(st_, pts)
    assert rep.verdict == "NotEinstein" and "not constant" in rep.reason
    assert rep.to_dict()["lambda"] is None


def test_non_einstein_fiber():
    st_ = WarpedSpacetime((0.0, 1.0), ((FiberSpec(3, tau=1.0), 1.0),))
    with pytest.raises(MissingDataError):
        einstein_residuals(st_, 0.0, [0.5])


def test_constant_scalar_trivial_and_kasner_nonconstant():
    assert constant_scalar_check(trivial(), np.linspace(0.5, 2, 8)) == 0.0
    # zeta = 0, eta = 6 with phi = t: tau = eta / t^2
    k = KasnerSpec(phi=T, exponents=(1.0, -1.0), fibers=(FiberSpec(3, einstein_lambda=0.0),
                                                         FiberSpec(3, einstein_lambda=0.0)),
                   interval=(0.0, math.inf))
    assert (k.zeta, k.eta) == (0.0, 6.0)
    st_ = kasner_to_mgrw(k)
    assert constant_scalar_check(st_, np.linspace(0.5, 3.0, 64)) is None
    for t in (0.5, 1.0, 2.0):
        assert scalar_curvature(st_, t).tau_form1 == pytest.approx(6.0 / t ** 2)


def test_low_dimension_flag():
    st_ = WarpedSpacetime((0.0, 1.0), ((FiberSpec(1), 1.0),))
    rep = einstein_residuals(st_, 0.0, [0.5])
    assert rep.is_einstein and rep.low_dimension_warning
    assert "lambda need not be constant" in rep.reason


@given(dims=st.lists(st.integers(1, 3), min_size=1, max_size=4), c=st.floats(-1.5, 1.5),
       delta=st.sampled_from([-0.1, 0.1]))
def test_exponential_family(dims, c, delta):
    st_ = exponential_flat(dims, c)
    lam = sum(dims) * c * c
    pts = np.linspace(-0.9, 0.9, 16)
    rep = einstein_residuals(st_, lam, pts)
    assert rep.is_einstein
    if st_.n >= 3:
        assert abs(rep.tau - st_.n * lam) <= rep.tolerance
        assert abs(lam - rep.tau / st_.n) <= rep.tolerance
    wrong = einstein_residuals(st_, lam + delta, pts)
    assert wrong.residual_condition2 >= abs(delta) / 2
    assert not wrong.is_einstein


@given(st_=spacetimes(), lam=st.floats(-3, 3))
def test_direct_and_divided_forms_agree(st_, lam):
    rep = einstein_residuals(st_, lam, grid(8, st_.interval))
    assert rep.form_disagreement <= 1e-10


def test_report_dict_has_lambda_key():
    d = einstein_residuals(btz_static(), -2.0, grid(4, (0.1, 1.4))).to_dict()
    assert "lambda" in d and "lam" not in d and d["lambda"] == -2.0
