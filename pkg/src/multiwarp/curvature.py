"""Closed-form curvature of a multiply generalized Robertson-Walker space-time.

Everything is pointwise in ``t``.  Warping-function derivatives come from
jets, and the base is the interval ``I`` with metric ``-dt^2``, so for every
warp ``b``::

    grad b = -b' d/dt,   |grad b|^2 = -(b')^2,   H^b(d/dt, d/dt) = b'',   Lap b = -b''.

Curvature follows the convention ``R(X,Y) = [D_X, D_Y] - D_[X,Y]`` with
``Ric(Y,Z) = tr(X -> R(X,Y)Z)``; a round unit sphere has ``Ric = (n-1) g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import MissingDataError, ValidationError
from .jets import ScalarJet, eval_jet, jet_power
from .spacetime import WarpedSpacetime

__all__ = [
    "ScalarForms", "RiemannBlocks", "CurvaturePoint",
    "scalar_curvature", "ricci_tt", "ricci_fiber_coeff", "ricci_quadratic",
    "riemann_frame", "curvature_point", "is_constant", "CONSTANCY_POINTS",
]

CONSTANCY_POINTS = 256


class ScalarForms(NamedTuple):
    tau_form1: float
    tau_form2: float
    tau_psi_form: float


def _jets(st: WarpedSpacetime, t: float) -> list[ScalarJet]:
    st.check(t)
    return [eval_jet(w, t, warp=True) for w in st.warps]


def _fiber_taus(st: WarpedSpacetime) -> list[float]:
    taus = []
    for i, spec in enumerate(st.specs):
        if spec.tau is None:
            raise MissingDataError(f"fiber[{i}] has no scalar curvature tau")
        taus.append(spec.tau)
    return taus


def _tau_form1(s, b, taus) -> float:
    m = len(s)
    out = 0.0
    for i in range(m):
        bi = b[i]
        out += 2.0 * s[i] * bi.d2 / bi.value
        out += taus[i] / bi.value ** 2
        out += s[i] * (s[i] - 1) * (bi.d1 / bi.value) ** 2
        for k in range(m):
            if k != i:
                out += s[k] * s[i] * bi.d1 * b[k].d1 / (bi.value * b[k].value)
    return out


def _tau_form2(s, b, taus) -> float:
    hess = sum(si * bi.d2 / bi.value for si, bi in zip(s, b))
    # mean-curvature-like sum  H = sum s_i b_i'/b_i  and its t-derivative
    h = sum(si * bi.d1 / bi.value for si, bi in zip(s, b))
    dh = sum(si * (bi.d2 / bi.value - (bi.d1 / bi.value) ** 2) for si, bi in zip(s, b))
    fib = sum(tau / bi.value ** 2 for tau, bi in zip(taus, b))
    return hess + dh + h * h + fib


def _tau_psi_form(s, b, taus) -> float:
    m = len(s)
    psi = [jet_power(bi, (si + 1) / 2.0) for si, bi in zip(s, b)]
    logd = []
    out = 0.0
    for si, p, tau in zip(s, psi, taus):
        out += 4.0 * si / (si + 1) * p.d2 / p.value
        out += tau / p.value ** (4.0 / (si + 1))
        q = jet_power(p, 2.0 / (si + 1))
        logd.append(q.d1 / q.value)
    for i in range(m):
        for k in range(m):
            if k != i:
                out += s[k] * s[i] * logd[i] * logd[k]
    return out


def scalar_curvature(st: WarpedSpacetime, t: float) -> ScalarForms:
    """Scalar curvature at ``t`` computed three independent ways.

    ``tau_form1`` expands every second-order term; ``tau_form2`` groups the
    first derivatives into ``H = sum s_i b_i'/b_i`` and uses ``H' + H^2``;
    ``tau_psi_form`` goes through ``psi_i = b_i**((s_i+1)/2)``.
    """
    taus = _fiber_taus(st)
    b = _jets(st, t)
    s = st.dims
    return ScalarForms(_tau_form1(s, b, taus), _tau_form2(s, b, taus), _tau_psi_form(s, b, taus))


def ricci_tt(st: WarpedSpacetime, t: float) -> float:
    """``Ric(d/dt, d/dt) = -sum s_i b_i''/b_i``."""
    b = _jets(st, t)
    return -sum(si * bi.d2 / bi.value for si, bi in zip(st.dims, b))


def _fiber_coeff(s, b, i) -> float:
    bi = b[i]
    cross = sum(s[k] * b[k].d1 / b[k].value for k in range(len(s)) if k != i)
    return bi.value * bi.d2 + (s[i] - 1) * bi.d1 ** 2 + bi.value * bi.d1 * cross


def ricci_fiber_coeff(st: WarpedSpacetime, i: int, t: float) -> float:
    """Bracket multiplying ``g_{F_i}(v, v)`` in the fiber Ricci block.

    The full block is ``Ric_{F_i}(v, v) + coeff * g_{F_i}(v, v)``.
    """
    if not 0 <= i < st.m:
        raise IndexError(f"fiber index {i} out of range for {st.m} fibers")
    return _fiber_coeff(st.dims, _jets(st, t), i)


def ricci_quadratic(st: WarpedSpacetime, t: float, fiber_data: Sequence) -> float:
    """``Ric(d/dt + v, d/dt + v)`` for ``v = sum v_i``.

    ``fiber_data[i] = (Ric_{F_i}(v_i, v_i), g_{F_i}(v_i, v_i))``.
    """
    if len(fiber_data) != st.m:
        raise ValidationError(f"fiber_data has {len(fiber_data)} entries for {st.m} fibers")
    s = st.dims
    b = _jets(st, t)
    out = 0.0
    for i, (ric_f, g_f) in enumerate(fiber_data):
        out += ric_f + _fiber_coeff(s, b, i) * g_f - s[i] * b[i].d2 / b[i].value
    return out


@dataclass(frozen=True)
class RiemannBlocks:
    """Nonzero scalar blocks of the Riemann tensor.

    For ``V, W`` tangent to ``F_i`` and ``U`` tangent to ``F_k`` (``k != i``):

    * ``mixed_base[i]``:   ``R(V, dt) dt = mixed_base[i] * V``            (= -b_i''/b_i)
    * ``base_along[i]``:   ``R(dt, V) W = base_along[i] * g(V, W) dt``     (= -b_i''/b_i)
    * ``pair[(i, k)]``:    ``R(U, V) W = pair[(i, k)] * g(V, W) U``        (= b_i' b_k'/(b_i b_k))
    * ``fiber_internal[i]``: ``R(V, W) U' = R_{F_i}(V, W) U'
      + fiber_internal[i] * (g(V, U') W - g(W, U') V)``                   (= -(b_i')^2/b_i^2)

    The base block and the mixed blocks listed in ``zero_items`` vanish.
    """

    t: float
    mixed_base: tuple
    base_along: tuple
    pair: dict = field(hash=False)
    fiber_internal: tuple
    zero_items: tuple = (
        "R(X,V)W, R(V,W)X, R(V,X)W for distinct fibers",
        "R(X,Y)V",
        "R(V,W)X within one fiber",
        "R(V,W)U with U in another fiber",
    )
    base: float = 0.0


def riemann_frame(st: WarpedSpacetime, t: float) -> RiemannBlocks:
    b = _jets(st, t)
    m = st.m
    mixed = tuple(-bi.d2 / bi.value for bi in b)
    # grad_B b_i . grad_B b_k = -b_i' b_k' on the Lorentzian line; the printed
    # coefficient carries a leading minus, so the product enters with a plus.
    pair = {(i, k): b[i].d1 * b[k].d1 / (b[i].value * b[k].value)
            for i in range(m) for k in range(m) if i != k}
    # |grad_B b_i|^2 = -(b_i')^2
    internal = tuple(-(bi.d1 / bi.value) ** 2 for bi in b)
    # D_dt(grad_B b_i) = -b_i'' dt
    along = tuple(-bi.d2 / bi.value for bi in b)
    return RiemannBlocks(t=float(t), mixed_base=mixed, base_along=along, pair=pair,
                         fiber_internal=internal)


@dataclass(frozen=True)
class CurvaturePoint:
    t: float
    tau_form1: float
    tau_form2: float
    tau_psi_form: float
    ricci_tt: float
    ricci_fiber_coeff: tuple
    riemann_blocks: RiemannBlocks

    def as_record(self) -> dict:
        rec = {
            "t": self.t,
            "tau_form1": self.tau_form1,
            "tau_form2": self.tau_form2,
            "tau_psi_form": self.tau_psi_form,
            "ricci_tt": self.ricci_tt,
        }
        for i, c in enumerate(self.ricci_fiber_coeff):
            rec[f"ricci_fiber_coeff_{i}"] = c
        return rec


def curvature_point(st: WarpedSpacetime, t: float) -> CurvaturePoint:
    forms = scalar_curvature(st, t)
    s = st.dims
    b = _jets(st, t)
    coeffs = tuple(_fiber_coeff(s, b, i) for i in range(st.m))
    return CurvaturePoint(
        t=float(t), tau_form1=forms.tau_form1, tau_form2=forms.tau_form2,
        tau_psi_form=forms.tau_psi_form,
        ricci_tt=-sum(si * bi.d2 / bi.value for si, bi in zip(s, b)),
        ricci_fiber_coeff=coeffs, riemann_blocks=riemann_frame(st, t))


def is_constant(values, rel: float = 1e-8) -> bool:
    """Grid constancy test: ``max - min <= rel * (1 + max|v|)``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return False
    return float(v.max() - v.min()) <= rel * (1.0 + float(np.abs(v).max()))


def interior_grid(st: WarpedSpacetime, n: int = CONSTANCY_POINTS) -> np.ndarray:
    from .spacetime import sample_window
    return sample_window(st.interval, n)

