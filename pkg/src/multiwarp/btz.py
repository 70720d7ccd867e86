"""Static black-hole interiors written as (2+1) multi-warped space-times.

A square lapse ``N^2(r)`` is turned into warping functions through

    t = F(r) = int_a^r dmu / N(mu),     b_2 = F^{-1},     b_1 = N o F^{-1},

after which ``b_2' = b_1``, ``b_2'' = N'(b_2) b_1`` and
``b_1'' = N''(b_2) b_1^2 + N'(b_2)^2 b_1``.  Only ``F^{-1}`` itself is
numeric (quadrature plus bracketed root finding); all derivatives follow
from the chain identities and are exact given the root.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .errors import DomainError, NonInvertibleError
from .jets import Compose, Expr, Inverse, ScalarJet, WarpFn, as_expr, sqrt
from .spacetime import FiberModel, FiberSpec, WarpedSpacetime, sample_window

__all__ = [
    "LapseSpec", "DerivedWarps", "LapseFit", "lapse_to_warps", "tau_of_lapse",
    "is_einstein_lapse", "einstein_lapse_fit", "constant_tau_lapse", "constant_tau_fit",
    "derived_spacetime", "lapse_report", "closed_form_check", "QUAD_TOL", "HORIZON_MARGIN",
]

QUAD_TOL = 1e-12
HORIZON_MARGIN = 1e-9
TABLE_NODES = 65
INVERSE_XTOL = 1e-14
FAMILY_TOL = 1e-8


def _quad(f, a, b):
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return val


@dataclass(frozen=True, eq=False)
class LapseSpec:
    """Square lapse ``N^2(r)`` on an open ``r`` interval with anchor ``a``.

    ``closed_form_F`` optionally carries an exact expression for ``F`` used to
    cross-check the quadrature.
    """

    n_squared: Expr
    anchor: float
    r_domain: tuple
    params: dict = field(default_factory=dict)
    closed_form_F: Optional[Expr] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "n_squared", as_expr(self.n_squared))
        lo, hi = (float(x) for x in self.r_domain)
        if not lo < hi:
            raise NonInvertibleError(f"empty r domain {self.r_domain}")
        object.__setattr__(self, "r_domain", (lo, hi))
        if not lo <= self.anchor <= hi:
            raise NonInvertibleError(f"anchor {self.anchor} lies outside [{lo}, {hi}]")
        for r in sample_window((lo, hi)):
            try:
                v = self.n_squared.value(float(r))
            except (DomainError, ValueError, ZeroDivisionError) as exc:
                raise NonInvertibleError(f"N^2 cannot be evaluated at r={r}: {exc}") from exc
            if not v > 0.0:
                raise NonInvertibleError(f"N^2 = {v} <= 0 at r={r}; F is not invertible")
        object.__setattr__(self, "lapse", sqrt(self.n_squared))
        nodes = np.unique(np.concatenate([np.linspace(lo, hi, TABLE_NODES), [self.anchor]]))
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_table", self._tabulate(nodes))
        object.__setattr__(self, "_inverse_cached", lru_cache(maxsize=4096)(self._inverse))

    def _integrand(self, mu: float) -> float:
        v = self.n_squared.value(mu)
        # N^2 can round to 0 within an ulp of a simple horizon; the integrable
        # singularity then contributes nothing measurable at that node
        return 1.0 / math.sqrt(v) if v > 0.0 else 0.0

    def _tabulate(self, nodes):
        j0 = int(np.searchsorted(nodes, self.anchor))
        table = np.zeros_like(nodes)
        for j in range(j0 + 1, len(nodes)):
            table[j] = table[j - 1] + _quad(self._integrand, nodes[j - 1], nodes[j])
        for j in range(j0 - 1, -1, -1):
            table[j] = table[j + 1] - _quad(self._integrand, nodes[j], nodes[j + 1])
        return table

    @property
    def t_domain(self) -> tuple:
        return (float(self._table[0]), float(self._table[-1]))

    def F(self, r: float) -> float:
        lo, hi = self.r_domain
        if not lo <= r <= hi:
            raise DomainError(f"r={r} outside [{lo}, {hi}]")
        nodes = self._nodes
        j = int(np.clip(np.searchsorted(nodes, r), 1, len(nodes) - 1))
        left, right = nodes[j - 1], nodes[j]
        # integrate away from the domain ends, where 1/N may blow up
        use_left = r - left <= right - r
        if j == len(nodes) - 1:
            use_left = True
        elif j == 1:
            use_left = False
        if use_left:
            return float(self._table[j - 1]) + _quad(self._integrand, left, r)
        return float(self._table[j]) - _quad(self._integrand, r, right)

    def F_inverse(self, t: float) -> float:
        return self._inverse_cached(float(t))

    def _inverse(self, t: float) -> float:
        t0, t1 = self.t_domain
        if not t0 < t < t1:
            raise DomainError(f"t={t} outside the image ({t0}, {t1}) of F")
        j = int(np.clip(np.searchsorted(self._table, t), 1, len(self._table) - 1))
        a, b = float(self._nodes[j - 1]), float(self._nodes[j])
        fa, fb = float(self._table[j - 1]), float(self._table[j])
        # safeguarded Newton with F' = 1/N, falling back to Brent on trouble
        r = a + (b - a) * (t - fa) / (fb - fa) if fb > fa else 0.5 * (a + b)
        for _ in range(30):
            if not a < r < b:
                break
            resid = self.F(r) - t
            if resid > 0.0:
                b = r
            elif resid < 0.0:
                a = r
            else:
                return r
            step = resid * math.sqrt(self.n_squared.value(r))
            r_new = r - step
            if abs(step) <= INVERSE_XTOL * max(1.0, abs(r)):
                return r_new if a <= r_new <= b else r
            r = r_new if a < r_new < b else 0.5 * (a + b)
        return brentq(lambda x: self.F(x) - t, a, b, xtol=INVERSE_XTOL, rtol=4 * sys.float_info.epsilon, maxiter=200)

    def N_jet(self, r: float) -> ScalarJet:
        return self.lapse.jet(r)


@dataclass(frozen=True, eq=False)
class LapseInverse(Expr):
    """``t -> F^{-1}(t)`` with derivatives ``(N, N' N)`` at ``r = F^{-1}(t)``."""

    spec: LapseSpec

    def jet(self, t):
        r = self.spec.F_inverse(t)
        n = self.spec.N_jet(r)
        return ScalarJet(r, n.value, n.d1 * n.value)

    def value(self, t):
        return self.spec.F_inverse(t)


@dataclass(frozen=True)
class DerivedWarps:
    b1: WarpFn
    b2: WarpFn
    t_domain: tuple


def lapse_to_warps(spec: LapseSpec) -> DerivedWarps:
    t_domain = spec.t_domain
    inv = LapseInverse(spec)
    b2 = WarpFn(inv, domain=t_domain, label="F^-1")
    b1 = WarpFn(Compose(spec.lapse, inv), domain=t_domain, label="N o F^-1")
    return DerivedWarps(b1=b1, b2=b2, t_domain=t_domain)


def derived_spacetime(spec: LapseSpec, second_fiber: Optional[FiberSpec] = None) -> WarpedSpacetime:
    """MGRW space-time ``-dt^2 + b_1^2 dx^2 + b_2^2 g_F``.

    By default ``F`` is a flat circle, which is the (2+1) model the lapse
    operator is derived for.  Warp positivity is inherited from the lapse:
    ``b_2`` ranges over ``r_domain`` and ``b_1 = N(b_2)``.
    """
    w = lapse_to_warps(spec)
    first = FiberSpec(1, model=FiberModel.flat(1))
    second = second_fiber or FiberSpec(1, model=FiberModel.circle())
    return WarpedSpacetime(w.t_domain, ((first, w.b1), (second, w.b2)), name=spec.name,
                           sample_positivity=spec.r_domain[0] < 0.0)


def tau_of_lapse(spec: LapseSpec, r: float) -> float:
    """Scalar curvature ``(N^2)''(r) + 2 (N^2)'(r)/r`` of the (2+1) model."""
    lo, hi = spec.r_domain
    if not lo < r < hi or r == 0.0:
        raise DomainError(f"r={r} must be interior to {spec.r_domain} and nonzero")
    j = spec.n_squared.jet(r)
    return j.d2 + 2.0 * j.d1 / r


def _grid(grid):
    return np.asarray(grid, dtype=float).ravel()


@dataclass(frozen=True)
class LapseFit:
    lam: float
    c1: float
    c2: float
    residual: float
    system_residual: float = 0.0

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "c1": self.c1, "c2": self.c2,
                "residual": self.residual, "system_residual": self.system_residual}


def einstein_lapse_fit(spec: LapseSpec, grid) -> LapseFit:
    """Least-squares fit ``N^2 ~ (lam/2) r^2 + c1 r + c2`` plus the Einstein-system residual."""
    r = _grid(grid)
    y = np.array([spec.n_squared.value(x) for x in r])
    A = np.column_stack([r * r / 2.0, r, np.ones_like(r)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    lam, c1, c2 = (float(c) for c in coef)
    resid = float(np.max(np.abs(A @ coef - y)))
    sys_res = 0.0
    for x in r:
        j = spec.n_squared.jet(float(x))
        sys_res = max(sys_res, abs(j.d2 + j.d1 / x - 2.0 * lam), abs(j.d1 / x - lam))
    return LapseFit(lam, c1, c2, resid, sys_res)


def is_einstein_lapse(spec: LapseSpec, grid, tol: float = FAMILY_TOL) -> Optional[float]:
    """Einstein constant of the (2+1) model, or ``None`` if ``N^2`` is outside the family."""
    fit = einstein_lapse_fit(spec, grid)
    r = _grid(grid)
    scale = max(1.0, float(np.max(np.abs([spec.n_squared.value(x) for x in r]))))
    if fit.residual > tol * scale:
        return None
    if fit.system_residual > tol * (1.0 + abs(fit.lam)) * scale:
        return None
    return fit.lam


def constant_tau_fit(spec: LapseSpec, grid) -> LapseFit:
    """Least-squares fit ``N^2 ~ -c1/r + (lam/6) r^2 + c2``."""
    r = _grid(grid)
    y = np.array([spec.n_squared.value(x) for x in r])
    A = np.column_stack([-1.0 / r, r * r / 6.0, np.ones_like(r)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    c1, lam, c2 = (float(c) for c in coef)
    return LapseFit(lam, c1, c2, float(np.max(np.abs(A @ coef - y))))


def constant_tau_lapse(spec: LapseSpec, grid, tol: float = FAMILY_TOL) -> Optional[float]:
    """Constant scalar curvature of the (2+1) model over the ``r`` grid, else ``None``."""
    r = _grid(grid)
    taus = np.array([tau_of_lapse(spec, float(x)) for x in r])
    if float(taus.max() - taus.min()) > tol * (1.0 + float(np.abs(taus).max())):
        return None
    return math.fsum(taus) / len(taus)


def lapse_report(spec: LapseSpec, grid, tol: float = FAMILY_TOL) -> dict:
    r = _grid(grid)
    return {
        "lapse": spec.name,
        "einstein_lambda": is_einstein_lapse(spec, r, tol),
        "einstein_fit": einstein_lapse_fit(spec, r).to_dict(),
        "tau": constant_tau_lapse(spec, r, tol),
        "constant_tau_fit": constant_tau_fit(spec, r).to_dict(),
        "t_domain": list(spec.t_domain),
    }


def closed_form_check(spec: LapseSpec, n: int = 64) -> dict:
    """Compare quadrature ``F`` and root-found ``F^{-1}`` with ``spec.closed_form_F``.

    Returns the largest ``|F_quad(r) - F_closed(r)|`` over an ``r`` grid and the
    largest ``|F^{-1}_quad(t) - F^{-1}_closed(t)|`` over a ``t`` grid.
    """
    if spec.closed_form_F is None:
        raise ValueError(f"lapse {spec.name!r} carries no closed form for F")
    lo, hi = spec.r_domain
    closed = spec.closed_form_F
    f_err = max(abs(spec.F(float(r)) - closed.value(float(r))) for r in sample_window((lo, hi), n))
    pad = HORIZON_MARGIN * (hi - lo)
    closed_inv = Inverse(closed, lo + pad, hi - pad)
    inv_err = max(abs(spec.F_inverse(float(t)) - closed_inv.value(float(t)))
                  for t in sample_window(spec.t_domain, n))
    out = {"F": f_err, "F_inverse": inv_err}
    if "F_limit" in spec.params:
        out["F_upper_limit"] = abs(spec.t_domain[1] - spec.params["F_limit"])
    return out
