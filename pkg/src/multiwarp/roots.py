"""Positive constant solutions of ``-tau u + sum_i c_i u^(e_i) = 0``.

Simple roots are bracketed by sign changes on a log-spaced scan and refined
with Brent's method.  A double root (the curve only touches zero) shows no
sign change, so critical points of ``g`` are located the same way and kept
when ``|g|`` vanishes there to rounding.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import BracketError, ValidationError

__all__ = ["RootCount", "constant_solution_count", "threshold_tau", "family_terms", "FAMILIES"]

SCAN_POINTS = 10_000
U_MIN = 1e-6
U_MAX = 1e6
ROOT_XTOL = 1e-12
TANGENCY = 1e-12


@dataclass(frozen=True)
class RootCount:
    count: int
    roots: tuple
    tangential: tuple
    u_max: float

    def to_dict(self) -> dict:
        return {"count": self.count, "roots": list(self.roots),
                "tangential": list(self.tangential), "u_max": self.u_max}


def _check_terms(terms) -> list:
    out = []
    for c, e in terms:
        c, e = float(c), float(e)
        if not (math.isfinite(c) and math.isfinite(e)):
            raise ValidationError(f"non-finite term ({c}, {e})")
        out.append((c, e))
    if not out:
        raise ValidationError("at least one (coefficient, exponent) term is required")
    return out


def _g(tau, terms, u):
    return -tau * u + math.fsum(c * u ** e for c, e in terms)


def _dg(tau, terms, u):
    return -tau + math.fsum(c * e * u ** (e - 1.0) for c, e in terms)


def _scale(tau, terms, u):
    return abs(tau * u) + math.fsum(abs(c) * u ** e for c, e in terms)


def _brackets(f, grid, values):
    out = []
    for k in range(len(grid) - 1):
        a, b = values[k], values[k + 1]
        if a == 0.0:
            out.append((grid[k], grid[k]))
        elif a * b < 0.0:
            out.append((grid[k], grid[k + 1]))
    if values[-1] == 0.0:
        out.append((grid[-1], grid[-1]))
    return out


def _solve(f, lo, hi):
    if lo == hi:
        return lo
    return brentq(f, lo, hi, xtol=ROOT_XTOL, rtol=4 * sys.float_info.epsilon, maxiter=500)


def _count(tau, terms, u_min, u_max, n):
    grid = np.geomspace(u_min, u_max, n)
    g = lambda u: _g(tau, terms, u)  # noqa: E731
    dg = lambda u: _dg(tau, terms, u)  # noqa: E731
    gv = [g(float(u)) for u in grid]
    roots = [_solve(g, float(a), float(b)) for a, b in _brackets(g, grid, gv)]
    dv = [dg(float(u)) for u in grid]
    tangential = []
    for a, b in _brackets(dg, grid, dv):
        uc = _solve(dg, float(a), float(b))
        if abs(g(uc)) <= TANGENCY * max(1.0, _scale(tau, terms, uc)):
            if all(abs(uc - r) > 1e-9 * max(1.0, r) for r in roots):
                tangential.append(uc)
    return sorted(roots + tangential), tangential


def constant_solution_count(tau: float, terms: Sequence, u_max: float = U_MAX,
                            u_min: float = U_MIN, n: int = SCAN_POINTS) -> RootCount:
    """Positive roots of ``-tau u + sum c_i u^e_i`` in ``[u_min, u_max]``.

    The count is recomputed with ``u_max`` doubled and must not change.
    """
    terms = _check_terms(terms)
    if not 0.0 < u_min < u_max:
        raise ValidationError(f"need 0 < u_min < u_max, got ({u_min}, {u_max})")
    roots, tangential = _count(float(tau), terms, u_min, u_max, n)
    again, _ = _count(float(tau), terms, u_min, 2.0 * u_max, n)
    if len(again) != len(roots):
        raise BracketError(f"root count changed from {len(roots)} to {len(again)} when u_max was doubled")
    return RootCount(len(roots), tuple(roots), tuple(tangential), float(u_max))


def threshold_tau(terms: Sequence, n: int = SCAN_POINTS, u_min: float = U_MIN,
                  u_max: float = U_MAX) -> tuple:
    """``(tau_1, u_1)``: minimum over ``u > 0`` of ``sum c_i u^(e_i - 1)``.

    For ``tau > tau_1`` the line ``tau u`` cuts the curve twice, at
    ``tau = tau_1`` it is tangent.  Found by a log scan of ``n`` points
    followed by bounded Brent minimisation in ``log u``.
    """
    terms = _check_terms(terms)
    h = lambda x: math.fsum(c * math.exp((e - 1.0) * x) for c, e in terms)  # noqa: E731
    xs = np.linspace(math.log(u_min), math.log(u_max), n)
    hv = np.array([h(float(x)) for x in xs])
    k = int(np.argmin(hv))
    if k == 0 or k == n - 1:
        raise BracketError("the minimum lies on the scan boundary; widen [u_min, u_max]")
    res = minimize_scalar(h, bounds=(float(xs[k - 1]), float(xs[k + 1])), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.fun), float(math.exp(res.x))


def family_terms(name: str, tau_s3: float = 6.0, tau_s2: float = 2.0) -> list:
    """Algebraic terms of the two sphere examples.

    ``IIIs``:  fibers ``S^3 x S^2`` with ``p = (1, -1)``, ``u = phi^3``:
    ``-tau u + tau_S3 u^(1/3) + tau_S2 u^(5/3)``.
    ``IIIs2``: fibers ``S^3 x S^3`` with ``p = (1, -1)``, ``u = phi``:
    ``tau phi^2 = tau_S3 (1 + phi^4)`` divided by ``phi``.
    """
    if name == "IIIs":
        return [(tau_s3, 1.0 / 3.0), (tau_s2, 5.0 / 3.0)]
    if name == "IIIs2":
        return [(tau_s3, -1.0), (tau_s3, 3.0)]
    raise ValidationError(f"unknown family {name!r}; expected one of {FAMILIES}")


FAMILIES = ("IIIs", "IIIs2")
