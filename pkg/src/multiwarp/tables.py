"""Classification tables for 4-dimensional generalized Kasner space-times.

Type II has fibers of dimensions (1, 2) and Type III three 1-dimensional
fibers.  Each table row is a predicate over the parameter tuple; rows are
mutually exclusive, and a tuple that no row accepts is reported as
``NoMetric`` with ``row = None`` and the reason.

Structural zeros (``zeta = 0``, ``eta = zeta^2``, ...) are exact for
``Fraction``/``int`` inputs and use a relative epsilon for floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence

from .errors import InconsistentParameters

__all__ = [
    "TableRow", "classify_einstein_type2", "classify_einstein_type3",
    "classify_constant_tau_type2", "TABLE1", "TABLE2", "TABLE3", "EPS",
    "matching_rows", "parse_number",
]

EPS = 1e-12

PHI_KINDS = ("Constant", "System", "StarSystem", "Ode", "NoMetric", "FreeEquation")


def parse_number(text):
    """``"1/3"`` becomes an exact ``Fraction``; decimal text a ``float``."""
    if isinstance(text, (int, float, Fraction)):
        return text
    s = str(text).strip()
    if "/" in s or s.lstrip("+-").isdigit():
        return Fraction(s)
    return float(s)


class _Cmp:
    def __init__(self, eps: float):
        self.eps = eps

    def eq(self, a, b) -> bool:
        if isinstance(a, Rational) and isinstance(b, Rational):
            return a == b
        a, b = float(a), float(b)
        return abs(a - b) <= self.eps * max(1.0, abs(a), abs(b))

    def zero(self, a) -> bool:
        return self.eq(a, 0)

    def pos(self, a) -> bool:
        return not self.zero(a) and a > 0

    def neg(self, a) -> bool:
        return not self.zero(a) and a < 0


@dataclass(frozen=True)
class RowDef:
    index: int
    pattern: dict
    metric: str
    phi_kind: str
    phi: str
    test: Callable = field(repr=False, compare=False)


@dataclass(frozen=True)
class TableRow:
    table: str
    row: Optional[int]
    pattern: dict
    metric: str
    phi_requirement: str
    phi_detail: str
    reason: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def is_no_metric(self) -> bool:
        return self.phi_requirement == "NoMetric"

    def to_dict(self) -> dict:
        return {"table": self.table, "row": self.row, "pattern": dict(self.pattern),
                "metric": self.metric, "phi_requirement": self.phi_requirement,
                "phi_detail": self.phi_detail, "reason": self.reason, "extras": dict(self.extras)}


# -- TABLE1: Einstein, type II ---------------------------------------------------
# arguments: c, zeta, eta, lam, lam_f2, p1, p2

def _t1(c, z, e, lam, lf, p1, p2):
    z0, e0 = c.zero(z), c.zero(e)
    sq = (not z0) and c.eq(e, z * z)
    return [
        z0 and e0 and c.zero(lam) and c.zero(lf),
        z0 and not e0 and c.zero(lam) and c.zero(lf),
        z0 and not e0 and not c.zero(lf),
        sq and c.zero(lam) and c.zero(lf),
        sq and not c.zero(lam) and c.eq(lf, lam) and c.zero(p2),
        (not z0) and not sq and c.zero(lam) and c.zero(lf),
        (not z0) and not sq and c.zero(lam) and c.neg(lf) and c.zero(p1),
        (not z0) and not sq and c.pos(lam) and c.zero(lf) and c.eq(p1, p2),
        (not z0) and not sq and not c.zero(lam) and not c.zero(lf),
    ]


_PRODUCT2 = "-dt^2 + g_F1 + g_F2"
_CONST2 = "-dt^2 + phi0^(2p1) g_F1 + phi0^(2p2) g_F2"
TABLE1 = (
    RowDef(1, {"zeta": "0", "eta": "0", "lambda": "0", "lambda_F2": "0", "p1": "0", "p2": "0"},
           _PRODUCT2, "Constant", "-", _t1),
    RowDef(2, {"zeta": "0", "eta": "3/2 p1^2 != 0", "lambda": "0", "lambda_F2": "0", "p1": "!= 0", "p2": "-p1/2"},
           "-dt^2 + phi0^(2p1) g_F1 + phi0^(-p1) g_F2", "Constant", "phi0 = const > 0", _t1),
    RowDef(3, {"zeta": "0", "eta": "3/2 p1^2 != 0", "lambda": "-", "lambda_F2": "!= 0", "p1": "!= 0", "p2": "-p1/2"},
           "no metric", "NoMetric", "-", _t1),
    RowDef(4, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "lambda": "0", "lambda_F2": "0",
               "p1": "!= 0", "p2": "0 or -2 p1"},
           "-dt^2 + phi^(2p1) g_F1 + phi^(2p2) g_F2", "System", "(phi^zeta; 0)", _t1),
    RowDef(5, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "lambda": "!= 0", "lambda_F2": "lambda",
               "p1": "!= 0", "p2": "0"},
           "-dt^2 + phi^(2p1) g_F1 + g_F2", "System", "(phi^zeta; lambda)", _t1),
    RowDef(6, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "0", "lambda_F2": "0",
               "p1": "p1", "p2": "!= 0"},
           _CONST2, "Constant", "phi0 = const > 0", _t1),
    RowDef(7, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "0", "lambda_F2": "< 0",
               "p1": "0", "p2": "!= 0"},
           "-dt^2 + g_F1 + phi^(2p2) g_F2", "System", "(phi^(eta/zeta); 0)", _t1),
    RowDef(8, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "> 0", "lambda_F2": "0",
               "p1": "p2", "p2": "!= 0"},
           "-dt^2 + phi^(2p1) g_F1 + phi^(2p1) g_F2", "StarSystem", "(phi^zeta; 3 lambda; *)", _t1),
    RowDef(9, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "!= 0", "lambda_F2": "!= 0",
               "p1": "p1", "p2": "!= 0"},
           "no metric", "NoMetric", "-", _t1),
)


# -- TABLE2: constant scalar curvature, type II ----------------------------------
# arguments: c, zeta, eta, tau_f2, p1, p2

def _t2(c, z, e, tf, p1, p2):
    z0, e0 = c.zero(z), c.zero(e)
    sq = (not z0) and c.eq(e, z * z)
    third = (not z0) and c.eq(3 * e, z * z)
    generic = (not z0) and not sq
    return [
        z0 and e0,
        z0 and not e0 and c.zero(tf),
        z0 and not e0 and not c.zero(tf),
        sq and c.zero(tf) and c.zero(p2),
        sq and c.zero(tf) and c.eq(p2, -2 * p1),
        sq and not c.zero(tf) and c.zero(p2),
        sq and not c.zero(tf) and c.eq(p2, -2 * p1),
        generic and c.zero(tf),
        generic and not third and not c.zero(tf),
        third and not c.zero(tf),
    ]


_KII = "-dt^2 + phi^(2p1) g_F1 + phi^(2p2) g_F2"
_U_GEN = "u = (phi^zeta)^((1 + eta/zeta^2)/2)"
TABLE2 = (
    RowDef(1, {"zeta": "0", "eta": "0", "tau_F2": "tau_F2", "p1": "0", "p2": "0"},
           _PRODUCT2, "FreeEquation", "tau = tau_F2", _t2),
    RowDef(2, {"zeta": "0", "eta": "3/2 p1^2", "tau_F2": "0", "p1": "!= 0", "p2": "-p1/2"},
           _KII, "Ode", "tau = eta phi'^2/phi^2", _t2),
    RowDef(3, {"zeta": "0", "eta": "3/2 p1^2", "tau_F2": "!= 0", "p1": "!= 0", "p2": "-p1/2"},
           _KII, "Ode", "tau = eta phi'^2/phi^2 + tau_F2/phi^(2 p2)", _t2),
    RowDef(4, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "tau_F2": "0", "p1": "!= 0", "p2": "0"},
           _KII, "Ode", "-2 u'' = -tau u; u = phi^zeta", _t2),
    RowDef(5, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "tau_F2": "0", "p1": "!= 0", "p2": "-2 p1"},
           _KII, "Ode", "-2 u'' = -tau u; u = phi^zeta", _t2),
    RowDef(6, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "tau_F2": "!= 0", "p1": "!= 0", "p2": "0"},
           _KII, "Ode", "-2 u'' = -(tau - tau_F2) u; u = phi^zeta", _t2),
    RowDef(7, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "tau_F2": "!= 0", "p1": "!= 0", "p2": "-2 p1"},
           _KII, "Ode", "-2 u'' = -tau u + tau_F2 u^(-1/3); u = phi^zeta", _t2),
    RowDef(8, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "tau_F2": "0", "p1": "p1", "p2": "!= 0"},
           _KII, "Ode", "-4/(1 + eta/zeta^2) u'' = -tau u; " + _U_GEN, _t2),
    RowDef(9, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1, 1/3", "tau_F2": "!= 0", "p1": "p1", "p2": "!= 0"},
           _KII, "Ode",
           "-4/(1 + eta/zeta^2) u'' = -tau u + tau_F2 u^(1 - 4/(1 + eta/zeta^2) p2/zeta); " + _U_GEN, _t2),
    RowDef(10, {"zeta": "!= 0", "eta": "zeta^2/3", "eta/zeta^2": "1/3", "tau_F2": "!= 0",
                "p1": "zeta/3", "p2": "zeta/3"},
           _KII, "Ode", "-3 u'' = -tau u + tau_F2; u = phi^(2 zeta/3)", _t2),
)


# -- TABLE3: Einstein, type III ---------------------------------------------------
# arguments: c, zeta, eta, lam, p1, p2, p3

def _t3(c, z, e, lam, p1, p2, p3):
    z0, e0 = c.zero(z), c.zero(e)
    sq = (not z0) and c.eq(e, z * z)
    generic = (not z0) and not sq
    return [
        z0 and e0 and c.zero(lam),
        z0 and not e0 and c.zero(lam),
        sq and c.zero(lam),
        generic and c.zero(lam),
        generic and c.pos(lam) and c.eq(p1, p2) and c.eq(p2, p3),
    ]


_PRODUCT3 = "-dt^2 + g_F1 + g_F2 + g_F3"
_CONST3 = "-dt^2 + phi0^(2p1) g_F1 + phi0^(2p2) g_F2 + phi0^(2p3) g_F3"
TABLE3 = (
    RowDef(1, {"zeta": "0", "eta": "0", "lambda": "0", "p": "0, 0, 0"}, _PRODUCT3, "Constant", "-", _t3),
    RowDef(2, {"zeta": "0", "eta": "!= 0", "lambda": "0", "p": "p1, p2, p3"}, _CONST3, "Constant",
           "phi0 = const > 0", _t3),
    RowDef(3, {"zeta": "!= 0", "eta": "zeta^2", "eta/zeta^2": "1", "lambda": "0", "p": "p1, p2, p3"},
           "-dt^2 + phi^(2p1) g_F1 + phi^(2p2) g_F2 + phi^(2p3) g_F3", "System", "(phi^zeta; 0)", _t3),
    RowDef(4, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "0", "p": "p1, p2, p3"},
           _CONST3, "Constant", "phi0 = const > 0", _t3),
    RowDef(5, {"zeta": "!= 0", "eta": "!= 0", "eta/zeta^2": "!= 1", "lambda": "> 0", "p": "p1, p1, p1"},
           "-dt^2 + phi^(2p1) g_F1 + phi^(2p1) g_F2 + phi^(2p1) g_F3", "StarSystem",
           "(phi^zeta; 3 lambda; *)", _t3),
)


def _common(values: Sequence):
    """Promote to exact arithmetic when every input is rational."""
    if all(isinstance(v, Rational) for v in values):
        return [Fraction(v) for v in values], True
    return [float(v) for v in values], False


def _check_consistent(c: _Cmp, zeta, eta, dims, p) -> None:
    z = sum(s * q for s, q in zip(dims, p))
    e = sum(s * q * q for s, q in zip(dims, p))
    if not (c.eq(z, zeta) and c.eq(e, eta)):
        raise InconsistentParameters(
            f"p = {[str(q) for q in p]} gives zeta={z}, eta={e}; got zeta={zeta}, eta={eta}")


def matching_rows(table: Sequence[RowDef], args: tuple, eps: float = EPS) -> list:
    c = _Cmp(eps)
    flags = table[0].test(c, *args)
    return [row.index for row, hit in zip(table, flags) if hit]


def _result(name: str, table, args, eps, reason_if_none: str, extras=None) -> TableRow:
    hits = matching_rows(table, args, eps)
    if len(hits) > 1:
        raise AssertionError(f"{name}: rows {hits} overlap for {args}")
    if not hits:
        return TableRow(name, None, {}, "no metric", "NoMetric", "-", reason=reason_if_none,
                        extras=extras or {})
    row = table[hits[0] - 1]
    return TableRow(name, row.index, dict(row.pattern), row.metric, row.phi_kind, row.phi,
                    extras=extras or {})


def classify_einstein_type2(zeta, eta, lam, lambda_F2, p1, p2, eps: float = EPS) -> TableRow:
    (zeta, eta, lam, lambda_F2, p1, p2), _ = _common((zeta, eta, lam, lambda_F2, p1, p2))
    c = _Cmp(eps)
    _check_consistent(c, zeta, eta, (1, 2), (p1, p2))
    extras = {}
    if not c.zero(zeta) and c.eq(eta, zeta * zeta):
        extras["p2_patterns"] = ["0", "-2 p1"]
        extras["p2_matches"] = "0" if c.zero(p2) else "-2 p1"
    return _result("T1", TABLE1, (zeta, eta, lam, lambda_F2, p1, p2), eps,
                   "the Einstein system has no solution for these constants", extras)


def classify_constant_tau_type2(zeta, eta, tau_F2, p1, p2, eps: float = EPS) -> TableRow:
    (zeta, eta, tau_F2, p1, p2), _ = _common((zeta, eta, tau_F2, p1, p2))
    c = _Cmp(eps)
    _check_consistent(c, zeta, eta, (1, 2), (p1, p2))
    return _result("T2", TABLE2, (zeta, eta, tau_F2, p1, p2), eps,
                   "parameters fall outside every constant scalar curvature case")


def classify_einstein_type3(zeta, eta, lam, p: Sequence, eps: float = EPS) -> TableRow:
    if len(p) != 3:
        raise InconsistentParameters(f"type III needs 3 exponents, got {len(p)}")
    vals, _ = _common((zeta, eta, lam, *p))
    zeta, eta, lam, p1, p2, p3 = vals
    c = _Cmp(eps)
    _check_consistent(c, zeta, eta, (1, 1, 1), (p1, p2, p3))
    if c.neg(lam):
        reason = "lambda < 0 is impossible for type III"
    elif c.pos(lam) and not c.zero(zeta) and not c.eq(eta, zeta * zeta):
        reason = "lambda > 0 needs p1 = p2 = p3"
    else:
        reason = "these parameters force lambda = 0"
    return _result("T3", TABLE3, (zeta, eta, lam, p1, p2, p3), eps, reason)
