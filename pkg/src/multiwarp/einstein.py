"""Einstein and constant-scalar-curvature decisions for MGRW space-times.

Both questions are posed as residual systems evaluated on a grid of ``t``
values.  The Einstein system has two parts for each fiber ``i``::

    (2)  sum_k s_k b_k''/b_k = lambda
    (3)  lambda_{F_i} + b_i b_i'' + (s_i - 1) b_i'^2 + b_i b_i' sum_{k != i} s_k b_k'/b_k = lambda b_i^2

and (3) is evaluated a second time in the divided form that uses
``(b_i^{s_i})''``; the two must agree.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .curvature import scalar_curvature
from .errors import MissingDataError
from .jets import eval_jet, jet_power
from .spacetime import WarpedSpacetime

__all__ = [
    "EinsteinReport", "einstein_residuals", "infer_lambda", "constant_scalar_check",
    "DEFAULT_TOL", "FORM_AGREEMENT",
]

DEFAULT_TOL = 1e-8
FORM_AGREEMENT = 1e-10


@dataclass
class EinsteinReport:
    lam: Optional[float]
    residual_condition2: float
    residual_condition3: list
    fibers_einstein: list
    verdict: str
    reason: str = ""
    tolerance: float = DEFAULT_TOL
    form_disagreement: float = 0.0
    low_dimension_warning: bool = False
    tau: Optional[float] = None
    n: int = 0

    @property
    def is_einstein(self) -> bool:
        return self.verdict == "Einstein"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def _grid(grid) -> list[float]:
    return [float(t) for t in np.asarray(grid, dtype=float).ravel()]


def _lambdas(st: WarpedSpacetime) -> list[float]:
    out = []
    for i, spec in enumerate(st.specs):
        if spec.einstein_lambda is None:
            raise MissingDataError(f"fiber[{i}] has no Einstein constant lambda")
        out.append(spec.einstein_lambda)
    return out


def _condition_terms(st: WarpedSpacetime, lam: float, t: float, lam_f: Sequence[float]):
    s = st.dims
    st.check(t)
    b = [eval_jet(w, t, warp=True) for w in st.warps]
    cond2 = sum(si * bi.d2 / bi.value for si, bi in zip(s, b)) - lam
    direct, divided = [], []
    for i, bi in enumerate(b):
        cross = sum(s[k] * b[k].d1 / b[k].value for k in range(len(s)) if k != i)
        direct.append(lam_f[i] + bi.value * bi.d2 + (s[i] - 1) * bi.d1 ** 2
                      + bi.value * bi.d1 * cross - lam * bi.value ** 2)
        pw = jet_power(bi, float(s[i]))
        divided.append(lam_f[i] / bi.value ** 2 + pw.d2 / (s[i] * pw.value)
                       + bi.d1 / bi.value * cross - lam)
    return cond2, direct, divided, [bi.value ** 2 for bi in b]


def einstein_residuals(st: WarpedSpacetime, lam: float, grid, tol: float = DEFAULT_TOL) -> EinsteinReport:
    """Grid residuals of the Einstein conditions for a trial constant ``lam``.

    The verdict uses ``tol * (1 + |lam| + max b_i^2)`` as the threshold.
    """
    lam_f = _lambdas(st)
    pts = _grid(grid)
    r2 = 0.0
    r3 = [0.0] * st.m
    disagreement = 0.0
    bmax = 0.0
    for t in pts:
        c2, direct, divided, bsq = _condition_terms(st, lam, t, lam_f)
        bmax = max(bmax, *bsq)
        r2 = max(r2, abs(c2))
        for i, (d, e) in enumerate(zip(direct, divided)):
            r3[i] = max(r3[i], abs(d))
            # the direct form is the divided form times b_i^2
            scale = max(1.0, abs(e), abs(lam), abs(lam_f[i]) / bsq[i])
            disagreement = max(disagreement, abs(d / bsq[i] - e) / scale)
    threshold = tol * (1.0 + abs(lam) + bmax)
    fibers_einstein = [spec.is_einstein for spec in st.specs]
    low_dim = st.n == 2
    if not all(fibers_einstein):
        verdict, reason = "NotEinstein", "a fiber is not Einstein"
    elif r2 > threshold:
        verdict, reason = "NotEinstein", f"time-time condition residual {r2:.3e} exceeds {threshold:.3e}"
    elif max(r3) > threshold:
        i = int(np.argmax(r3))
        verdict, reason = "NotEinstein", f"fiber[{i}] condition residual {r3[i]:.3e} exceeds {threshold:.3e}"
    else:
        verdict, reason = "Einstein", ""
    if low_dim and verdict == "Einstein":
        reason = "total dimension 2: lambda need not be constant"
    tau = None
    if verdict == "Einstein" and all(spec.tau is not None for spec in st.specs):
        tau = constant_scalar_check(st, pts, tol)
    return EinsteinReport(
        lam=float(lam) if verdict == "Einstein" else None,
        residual_condition2=r2, residual_condition3=r3, fibers_einstein=fibers_einstein,
        verdict=verdict, reason=reason, tolerance=threshold, form_disagreement=disagreement,
        low_dimension_warning=low_dim, tau=tau, n=st.n)


def _fsum_mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def infer_lambda(st: WarpedSpacetime, grid, tol: float = DEFAULT_TOL) -> Optional[float]:
    """Mean of ``sum s_i b_i''/b_i`` over the grid when it is constant, else ``None``."""
    pts = _grid(grid)
    if not pts:
        return None
    vals = []
    for t in pts:
        st.check(t)
        b = [eval_jet(w, t, warp=True) for w in st.warps]
        vals.append(sum(si * bi.d2 / bi.value for si, bi in zip(st.dims, b)))
    mean = _fsum_mean(vals)
    dev = max(abs(v - mean) for v in vals)
    if dev > tol * (1.0 + max(abs(v) for v in vals)):
        return None
    return mean


def constant_scalar_check(st: WarpedSpacetime, grid, tol: float = DEFAULT_TOL) -> Optional[float]:
    """Scalar curvature if it is constant over the grid, else ``None``."""
    for i, spec in enumerate(st.specs):
        if spec.tau is None:
            raise MissingDataError(f"fiber[{i}] has no scalar curvature tau")
    pts = _grid(grid)
    if not pts:
        return None
    vals = [scalar_curvature(st, t).tau_form1 for t in pts]
    mean = _fsum_mean(vals)
    dev = max(vals) - min(vals)
    if dev > tol * (1.0 + max(abs(v) for v in vals)):
        return None
    return mean


def einstein_auto(st: WarpedSpacetime, grid, tol: float = DEFAULT_TOL) -> EinsteinReport:
    """Infer the Einstein constant and test it; non-constancy gives ``NotEinstein``."""
    lam = infer_lambda(st, grid, tol)
    if lam is None:
        _lambdas(st)
        return EinsteinReport(
            lam=None, residual_condition2=math.nan, residual_condition3=[math.nan] * st.m,
            fibers_einstein=[spec.is_einstein for spec in st.specs], verdict="NotEinstein",
            reason="sum s_i b_i''/b_i is not constant on the grid", tolerance=tol,
            low_dimension_warning=st.n == 2, n=st.n)
    return einstein_residuals(st, lam, grid, tol)

