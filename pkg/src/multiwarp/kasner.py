"""Generalized Kasner space-times ``-dt^2 + sum_i phi^(2 p_i) g_{F_i}``.

The geometry only enters through ``zeta = sum s_i p_i``, ``eta = sum s_i p_i^2``
and the fiber constants, so everything here works on jets of ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateError, DomainError, MissingDataError, PositivityError, StarSystemError, ValidationError
from .jets import Affine, Expr, ScalarJet, T, WarpFn, cos, eval_jet, exp, jet_power, sin
from .spacetime import KasnerSpec, kasner_parameters_of, sample_window

__all__ = [
    "kasner_parameters", "LgSpec", "lg_apply",
    "KasnerEinsteinReport", "kasner_einstein_terms", "kasner_einstein_residuals",
    "PsiReduction", "psi_reduction", "printed_psi_reduction", "psi_residual",
    "OdeFamily", "solve_phi_sigma_nu", "solve_star_system",
    "KasnerTauReport", "kasner_scalar_curvature", "kasner_tau_residual",
    "USubstitution", "u_substitution",
]

AGREEMENT = 1e-10
DEFAULT_TOL = 1e-8


def kasner_parameters(s: Sequence[int], p: Sequence[float]) -> tuple:
    """``(zeta, eta, S)``; checks ``eta/zeta^2 >= 1/S`` when ``zeta != 0``."""
    if len(s) != len(p):
        raise ValidationError(f"{len(s)} dimensions for {len(p)} exponents")
    if any(int(si) != si or si < 1 for si in s):
        raise ValidationError(f"fiber dimensions must be positive integers, got {list(s)}")
    zeta, eta, S = kasner_parameters_of(s, p)
    if zeta != 0:
        # Cauchy-Schwarz: zeta^2 = (sum sqrt(s) * sqrt(s) p)^2 <= S * eta
        assert eta / zeta ** 2 >= (1.0 / S) * (1.0 - 1e-12), (zeta, eta, S)
    return zeta, eta, S


# -- the operator  L v = sum r_i (v^a_i)'' / v^a_i  ---------------------------

@dataclass(frozen=True)
class LgSpec:
    terms: tuple
    zeta_L: float = field(init=False)
    eta_L: float = field(init=False)
    alpha: Optional[float] = field(init=False)
    beta: Optional[float] = field(init=False)

    def __post_init__(self):
        terms = tuple((float(r), float(a)) for r, a in self.terms)
        if not terms:
            raise ValidationError("the operator needs at least one (r, a) term")
        object.__setattr__(self, "terms", terms)
        zeta = math.fsum(r * a for r, a in terms)
        eta = math.fsum(r * a * a for r, a in terms)
        object.__setattr__(self, "zeta_L", zeta)
        object.__setattr__(self, "eta_L", eta)
        ok = zeta != 0.0 and eta != 0.0
        object.__setattr__(self, "alpha", zeta / eta if ok else None)
        object.__setattr__(self, "beta", zeta * zeta / eta if ok else None)


def _log_ratio(v: ScalarJet, a: float) -> float:
    """``(v^a)''/v^a`` computed by jet composition."""
    w = jet_power(v, a)
    return w.d2 / w.value


def lg_apply(spec: LgSpec, v: ScalarJet) -> tuple:
    """``(direct, collapsed, reduced)`` values of the operator on the line.

    ``reduced`` is ``None`` when ``zeta_L`` or ``eta_L`` vanishes.
    """
    if not v.value > 0.0:
        raise PositivityError(f"operator needs v > 0, got {v.value}", t=None)
    direct = math.fsum(r * _log_ratio(v, a) for r, a in spec.terms)
    g = v.d1 / v.value
    collapsed = (spec.eta_L - spec.zeta_L) * g * g + spec.zeta_L * v.d2 / v.value
    reduced = None
    if spec.alpha is not None:
        reduced = spec.beta * _log_ratio(v, 1.0 / spec.alpha)
    return direct, collapsed, reduced


# -- Einstein system ------------------------------------------------------------

def _phi_jet(k: KasnerSpec, t: float) -> ScalarJet:
    if not (k.interval[0] < t < k.interval[1]):
        raise DomainError(f"t={t} is not interior to {k.interval}")
    return eval_jet(k.phi, t, warp=True)


def _fiber_lambdas(k: KasnerSpec) -> list:
    out = []
    for i, f in enumerate(k.fibers):
        if f.einstein_lambda is None:
            raise MissingDataError(f"fiber[{i}] has no Einstein constant lambda")
        out.append(f.einstein_lambda)
    return out


def _fiber_taus(k: KasnerSpec) -> list:
    out = []
    for i, f in enumerate(k.fibers):
        if f.tau is None:
            raise MissingDataError(f"fiber[{i}] has no scalar curvature tau")
        out.append(f.tau)
    return out


def kasner_einstein_terms(k: KasnerSpec, lam: float, t: float) -> dict:
    """Pointwise residuals of the Kasner Einstein system in both printed forms.

    ``cond2``/``cond2_alt`` are the time-time equation, ``cond3[i]``/``cond3_alt[i]``
    the fiber equations (divided by ``phi^(2 p_i)``).  The ``_alt`` forms exist
    only when ``zeta != 0``.
    """
    lam_f = _fiber_lambdas(k)
    z, e = k.zeta, k.eta
    ph = _phi_jet(k, t)
    g2 = (ph.d1 / ph.value) ** 2
    h = ph.d2 / ph.value
    cond2 = (e - z) * g2 + z * h - lam
    base = (z - 1.0) * g2 + h
    cond3 = [lf / ph.value ** (2.0 * p) + p * base - lam for lf, p in zip(lam_f, k.exponents)]
    out = {"cond2": cond2, "cond3": cond3, "cond2_alt": None, "cond3_alt": None}
    if z != 0.0:
        out["cond2_alt"] = (z * z / e) * _log_ratio(ph, e / z) - lam
        pz = _log_ratio(ph, z)
        out["cond3_alt"] = [lf / ph.value ** (2.0 * p) + (p / z) * pz - lam
                            for lf, p in zip(lam_f, k.exponents)]
    return out


@dataclass
class KasnerEinsteinReport:
    lam: float
    residual_condition2: float
    residual_condition3: list
    form_disagreement: float
    verdict: str
    tolerance: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def kasner_einstein_residuals(k: KasnerSpec, lam: float, grid, tol: float = DEFAULT_TOL) -> KasnerEinsteinReport:
    pts = [float(t) for t in np.asarray(grid, dtype=float).ravel()]
    r2, r3, dis = 0.0, [0.0] * len(k.fibers), 0.0
    for t in pts:
        d = kasner_einstein_terms(k, lam, t)
        r2 = max(r2, abs(d["cond2"]))
        r3 = [max(a, abs(b)) for a, b in zip(r3, d["cond3"])]
        if d["cond2_alt"] is not None:
            dis = max(dis, abs(d["cond2"] - d["cond2_alt"]) / max(1.0, abs(d["cond2"]) + abs(lam)))
            for a, b in zip(d["cond3"], d["cond3_alt"]):
                dis = max(dis, abs(a - b) / max(1.0, abs(a) + abs(lam)))
    threshold = tol * (1.0 + abs(lam))
    ok = r2 <= threshold and max(r3) <= threshold
    return KasnerEinsteinReport(lam=float(lam), residual_condition2=r2, residual_condition3=r3,
                                form_disagreement=dis, verdict="Einstein" if ok else "NotEinstein",
                                tolerance=threshold)


# -- psi reduction of the fiber equations -------------------------------------

@dataclass(frozen=True)
class PsiReduction:
    """``coefficient * psi''/psi = lambda_F / psi^rhs_exponent`` with ``psi = phi^exponent``."""

    exponent: float
    coefficient: float
    rhs_exponent: float


def _psi_hypotheses(k: KasnerSpec, i: int) -> float:
    if not 0 <= i < len(k.exponents):
        raise IndexError(f"fiber index {i} out of range")
    z, e, p = k.zeta, k.eta, k.exponents[i]
    for ok, what in ((z != 0.0, "zeta = 0"), (e != 0.0, "eta = 0"),
                     (z - p != 0.0, f"zeta - p_{i} = 0"), (e - p * z != 0.0, f"eta - p_{i} zeta = 0")):
        if not ok:
            raise DegenerateError(f"psi reduction undefined for fiber {i}: {what}")
    return p


def psi_reduction(k: KasnerSpec, i: int) -> PsiReduction:
    """Exponent ``(eta - p zeta)/(zeta - p)`` that makes the reduction exact."""
    p = _psi_hypotheses(k, i)
    z, e = k.zeta, k.eta
    return PsiReduction(exponent=(e - p * z) / (z - p), coefficient=(z - p) ** 2 / (e - p * z),
                        rhs_exponent=2.0 * p * (z - p) / (e - p * z))


def printed_psi_reduction(k: KasnerSpec, i: int) -> PsiReduction:
    """Variant with exponent ``(eta - p zeta)/(eta - p)``; agrees with
    :func:`psi_reduction` only when ``zeta == eta``.  Kept for comparison."""
    p = _psi_hypotheses(k, i)
    z, e = k.zeta, k.eta
    if e - p == 0.0:
        raise DegenerateError(f"printed exponent undefined for fiber {i}: eta - p_{i} = 0")
    return PsiReduction(exponent=(e - p * z) / (e - p), coefficient=(z - p) ** 2 / (e - p * z),
                        rhs_exponent=2.0 * p * (z - p) / (e - p * z))


def psi_residual(k: KasnerSpec, i: int, t: float, reduction: Optional[PsiReduction] = None) -> float:
    """``coefficient psi''/psi - lambda_F/psi^rhs_exponent`` at ``t``.

    With the exact exponent this equals ``cond2 - cond3[i]`` of
    :func:`kasner_einstein_terms` for any ``phi`` and any trial ``lambda``.
    """
    red = reduction or psi_reduction(k, i)
    lam_f = _fiber_lambdas(k)[i]
    ph = _phi_jet(k, t)
    psi = jet_power(ph, red.exponent)
    return red.coefficient * psi.d2 / psi.value - lam_f / psi.value ** red.rhs_exponent


# -- closed-form ODE families ---------------------------------------------------

BRANCHES = ("Oscillatory", "Affine", "Exponential")


@dataclass(frozen=True)
class OdeFamily:
    """``phi^sigma`` solving ``(phi^sigma)'' = nu phi^sigma``.

    ``Oscillatory``: ``A cos(sqrt(-nu) t) + B sin(sqrt(-nu) t)``;
    ``Affine``: ``A t + B``; ``Exponential``: ``A e^{sqrt(nu) t} + B e^{-sqrt(nu) t}``.
    """

    sigma: float
    nu: float
    branch: str
    A: float
    B: float
    interval: tuple
    star: bool = False

    @property
    def power_expr(self) -> Expr:
        """Expression for ``phi^sigma``."""
        if self.branch == "Affine":
            return Affine(T, self.A, self.B)
        w = math.sqrt(abs(self.nu))
        if self.branch == "Oscillatory":
            return Affine(cos(Affine(T, w, 0.0)), self.A, 0.0) + Affine(sin(Affine(T, w, 0.0)), self.B, 0.0)
        parts = []
        if self.A != 0.0:
            parts.append(Affine(exp(Affine(T, w, 0.0)), self.A, 0.0))
        if self.B != 0.0:
            parts.append(Affine(exp(Affine(T, -w, 0.0)), self.B, 0.0))
        return parts[0] if len(parts) == 1 else parts[0] + parts[1]

    @property
    def phi(self) -> WarpFn:
        """``phi = (phi^sigma)^(1/sigma)``; requires ``sigma != 0``."""
        if self.sigma == 0.0:
            raise DegenerateError("sigma = 0 does not determine phi")
        return WarpFn(self.power_expr ** (1.0 / self.sigma), domain=self.interval)

    def residuals(self, grid) -> dict:
        e = self.power_expr
        r1 = r2 = 0.0
        for t in np.asarray(grid, dtype=float).ravel():
            j = e.jet(float(t))
            scale = max(1.0, abs(j.value), abs(j.d2))
            r1 = max(r1, abs(j.d2 - self.nu * j.value) / scale)
            r2 = max(r2, abs(j.d1 ** 2 - self.nu * j.value ** 2) / max(1.0, j.d1 ** 2))
        out = {"linear": r1}
        if self.star:
            out["first_order"] = r2
        return out

    def describe(self) -> str:
        if self.branch == "Affine":
            return f"phi^{self.sigma:g} = {self.A:g} t + {self.B:g}"
        w = math.sqrt(abs(self.nu))
        if self.branch == "Oscillatory":
            return f"phi^{self.sigma:g} = {self.A:g} cos({w:g} t) + {self.B:g} sin({w:g} t)"
        return f"phi^{self.sigma:g} = {self.A:g} exp({w:g} t) + {self.B:g} exp(-{w:g} t)"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        d["solution"] = self.describe()
        return d


def _branch(nu: float) -> str:
    return "Oscillatory" if nu < 0 else "Affine" if nu == 0 else "Exponential"


def _check_family_positive(fam: OdeFamily) -> None:
    e = fam.power_expr
    for t in sample_window(fam.interval):
        v = e.value(float(t))
        if not v > 0.0:
            raise PositivityError(f"phi^sigma = {v} <= 0 at t={t}", t=float(t))


def solve_phi_sigma_nu(sigma: float, nu: float, A: float, B: float, interval=(0.0, 1.0)) -> OdeFamily:
    if A == 0.0 and B == 0.0:
        raise ValidationError("A and B cannot both vanish")
    fam = OdeFamily(float(sigma), float(nu), _branch(nu), float(A), float(B), tuple(map(float, interval)))
    _check_family_positive(fam)
    return fam


def solve_star_system(sigma: float, nu: float, A: float = 1.0, sign: int = 1,
                      interval=(0.0, 1.0)) -> OdeFamily:
    """``A e^{+-sqrt(nu) t}``, the only solutions of the overdetermined pair."""
    if not nu > 0.0:
        raise StarSystemError(f"nu must be > 0 for the starred system, got {nu}")
    if not A > 0.0:
        raise ValidationError(f"A must be positive, got {A}")
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign}")
    a, b = (float(A), 0.0) if sign == 1 else (0.0, float(A))
    return OdeFamily(float(sigma), float(nu), "Exponential", a, b, tuple(map(float, interval)), star=True)


# -- constant scalar curvature --------------------------------------------------

def kasner_scalar_curvature(k: KasnerSpec, t: float) -> float:
    """``2 zeta phi''/phi + [(zeta-2) zeta + eta] phi'^2/phi^2 + sum tau_F/phi^(2p)``."""
    taus = _fiber_taus(k)
    ph = _phi_jet(k, t)
    z, e = k.zeta, k.eta
    out = 2.0 * z * ph.d2 / ph.value + ((z - 2.0) * z + e) * (ph.d1 / ph.value) ** 2
    return out + math.fsum(tf / ph.value ** (2.0 * p) for tf, p in zip(taus, k.exponents))


def _tau_alt(k: KasnerSpec, t: float) -> float:
    taus = _fiber_taus(k)
    ph = _phi_jet(k, t)
    z, e = k.zeta, k.eta
    q = (z * z + e) / (2.0 * z)
    out = 4.0 * z * z / (z * z + e) * _log_ratio(ph, q)
    return out + math.fsum(tf / ph.value ** (2.0 * p) for tf, p in zip(taus, k.exponents))


@dataclass
class KasnerTauReport:
    tau: float
    residual: float
    residual_u_form: Optional[float]
    form_disagreement: float
    verdict: str
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def kasner_tau_residual(k: KasnerSpec, tau: float, grid, tol: float = DEFAULT_TOL) -> KasnerTauReport:
    pts = [float(t) for t in np.asarray(grid, dtype=float).ravel()]
    res, res_u, dis = 0.0, None, 0.0
    for t in pts:
        a = kasner_scalar_curvature(k, t)
        res = max(res, abs(a - tau))
        if k.zeta != 0.0:
            b = _tau_alt(k, t)
            res_u = max(res_u or 0.0, abs(b - tau))
            dis = max(dis, abs(a - b) / max(1.0, abs(a)))
    threshold = tol * (1.0 + abs(tau))
    return KasnerTauReport(tau=float(tau), residual=res, residual_u_form=res_u, form_disagreement=dis,
                           verdict="ConstantTau" if res <= threshold else "NotConstant",
                           tolerance=threshold)


@dataclass(frozen=True)
class USubstitution:
    """``-coefficient u'' = -tau u + sum tau_F_i u^rhs_exponents[i]`` with ``u = phi^u_exponent``."""

    u_exponent: float
    coefficient: float
    rhs_exponents: tuple
    fiber_taus: tuple

    def describe(self) -> str:
        rhs = " + ".join(f"{tf:g} u^{e:.6g}" for tf, e in zip(self.fiber_taus, self.rhs_exponents)
                         if tf != 0.0)
        return f"-{self.coefficient:.6g} u'' = -tau u" + (f" + {rhs}" if rhs else "")

    def residual(self, k: KasnerSpec, tau: float, t: float) -> float:
        """``-coefficient u'' + tau u - sum tau_F u^e`` evaluated on ``u = phi^u_exponent``."""
        u = jet_power(_phi_jet(k, t), self.u_exponent)
        rhs = math.fsum(tf * u.value ** e for tf, e in zip(self.fiber_taus, self.rhs_exponents))
        return -self.coefficient * u.d2 + tau * u.value - rhs

    def normalized_residual(self, k: KasnerSpec, tau: float, t: float) -> float:
        """``-residual/u``, directly comparable with ``tau(t) - tau``."""
        u = jet_power(_phi_jet(k, t), self.u_exponent)
        return -self.residual(k, tau, t) / u.value

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ode"] = self.describe()
        return d


def u_substitution(k: KasnerSpec) -> USubstitution:
    if k.zeta == 0.0:
        raise DegenerateError("u substitution needs zeta != 0")
    z, e = k.zeta, k.eta
    coef = 4.0 / (1.0 + e / (z * z))
    return USubstitution(u_exponent=(z * z + e) / (2.0 * z), coefficient=coef,
                         rhs_exponents=tuple(1.0 - coef * p / z for p in k.exponents),
                         fiber_taus=tuple(_fiber_taus(k)))
