"""Data model for multiply generalized Robertson-Walker and generalized Kasner space-times."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, PositivityError, ValidationError
from .jets import Const, Expr, Power, WarpFn, as_expr

__all__ = [
    "FiberModel", "FiberSpec", "WarpedSpacetime", "KasnerSpec",
    "build_spacetime", "kasner_to_mgrw", "sample_window", "finite_window", "POSITIVITY_SAMPLES",
]

POSITIVITY_SAMPLES = 1024
_REL = 1e-12

MODEL_KINDS = ("flat", "circle", "sphere2", "sphere3")


@dataclass(frozen=True)
class FiberModel:
    """Concrete Riemannian fiber used by the finite-difference oracle.

    ``flat`` is Euclidean space of dimension ``k``; ``circle`` a circle of
    the given radius; ``sphere2``/``sphere3`` round spheres of the given
    radius (sectional curvature ``1/radius**2``).
    """

    kind: str
    k: int = 1
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"unknown fiber model {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.kind == "flat" and self.k < 1:
            raise ValidationError("flat fiber model needs k >= 1")
        if not self.radius > 0:
            raise ValidationError(f"fiber model radius must be positive, got {self.radius}")

    @classmethod
    def flat(cls, k: int) -> "FiberModel":
        return cls("flat", k=int(k))

    @classmethod
    def circle(cls, radius: float = 1.0) -> "FiberModel":
        return cls("circle", k=1, radius=radius)

    @classmethod
    def sphere2(cls, radius: float = 1.0) -> "FiberModel":
        return cls("sphere2", k=2, radius=radius)

    @classmethod
    def sphere3(cls, radius: float = 1.0) -> "FiberModel":
        return cls("sphere3", k=3, radius=radius)

    @property
    def dim(self) -> int:
        return {"flat": self.k, "circle": 1, "sphere2": 2, "sphere3": 3}[self.kind]

    @property
    def sectional(self) -> float:
        return 1.0 / self.radius ** 2 if self.kind.startswith("sphere") else 0.0

    @property
    def einstein_lambda(self) -> float:
        return (self.dim - 1) * self.sectional

    @property
    def tau(self) -> float:
        return self.dim * (self.dim - 1) * self.sectional


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _REL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class FiberSpec:
    """Dimension and curvature constants of one fiber.

    Missing constants are completed where they are forced: a 1-dimensional
    fiber is flat, a fiber with Einstein constant ``lam`` has ``tau = dim*lam``,
    and a 2-dimensional fiber of constant scalar curvature is Einstein with
    ``lam = tau/2``.
    """

    dim: int
    einstein_lambda: Optional[float] = None
    tau: Optional[float] = None
    model: Optional[FiberModel] = None

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError(f"fiber dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        lam, tau = self.einstein_lambda, self.tau
        for name, x in (("lambda", lam), ("tau", tau)):
            if x is not None and not math.isfinite(x):
                raise ValidationError(f"fiber {name} must be finite, got {x}")
        if self.model is not None:
            if self.model.dim != self.dim:
                raise ValidationError(
                    f"fiber model {self.model.kind} has dimension {self.model.dim}, fiber declares {self.dim}")
            if lam is not None and not _close(lam, self.model.einstein_lambda):
                raise ValidationError(
                    f"fiber lambda={lam} contradicts model {self.model.kind} (lambda={self.model.einstein_lambda})")
            if tau is not None and not _close(tau, self.model.tau):
                raise ValidationError(
                    f"fiber tau={tau} contradicts model {self.model.kind} (tau={self.model.tau})")
            lam, tau = self.model.einstein_lambda, self.model.tau
        if self.dim == 1:
            if (lam is not None and lam != 0.0) or (tau is not None and tau != 0.0):
                raise ValidationError("a 1-dimensional fiber has lambda = tau = 0")
            lam, tau = 0.0, 0.0
        if lam is not None and tau is not None and not _close(tau, self.dim * lam):
            raise ValidationError(f"fiber tau={tau} must equal dim*lambda={self.dim * lam}")
        if lam is not None and tau is None:
            tau = self.dim * lam
        if tau is not None and lam is None and self.dim == 2:
            lam = tau / 2.0
        object.__setattr__(self, "einstein_lambda", None if lam is None else float(lam))
        object.__setattr__(self, "tau", None if tau is None else float(tau))

    @property
    def is_einstein(self) -> bool:
        return self.einstein_lambda is not None


def finite_window(interval: tuple) -> tuple:
    """``interval`` with infinite ends replaced so that the window has width 10."""
    t1, t2 = interval
    lo = t1 if math.isfinite(t1) else (t2 - 10.0 if math.isfinite(t2) else -10.0)
    hi = t2 if math.isfinite(t2) else lo + 10.0 if math.isfinite(t1) else 10.0
    return lo, hi


def sample_window(interval: tuple, n: int = POSITIVITY_SAMPLES) -> np.ndarray:
    """``n`` interior points of :func:`finite_window`."""
    lo, hi = finite_window(interval)
    return np.linspace(lo, hi, n + 2)[1:-1]


def _as_warp(w, interval) -> WarpFn:
    if isinstance(w, WarpFn):
        return w
    return WarpFn(as_expr(w), domain=tuple(interval))


def _check_positive(warp: WarpFn, grid, where: str) -> None:
    for t in grid:
        try:
            v = warp.expr.value(float(t))
        except (DomainError, ValueError, OverflowError, ZeroDivisionError) as exc:
            raise PositivityError(f"{where}: warp cannot be evaluated at t={t}: {exc}", t=float(t)) from exc
        if not v > 0.0:
            raise PositivityError(f"{where}: warp is {v} <= 0 at t={t}", t=float(t))


@dataclass(frozen=True)
class WarpedSpacetime:
    """``-dt^2 + sum_i b_i(t)^2 g_{F_i}`` on an open interval.

    Positivity of each warp is checked on a sample grid at construction;
    it is a sampling check, not a proof.  ``sample_positivity=False`` is for
    callers whose warps are positive by construction.
    """

    interval: tuple
    fibers: tuple
    name: str = field(default="", compare=False)
    sample_positivity: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        t1, t2 = (float(x) for x in self.interval)
        if not t1 < t2:
            raise ValidationError(f"interval ({t1}, {t2}) is empty")
        object.__setattr__(self, "interval", (t1, t2))
        if len(self.fibers) < 1:
            raise ValidationError("a space-time needs at least one fiber")
        fibers = []
        for i, entry in enumerate(self.fibers):
            try:
                spec, warp = entry
            except (TypeError, ValueError):
                raise ValidationError(f"fiber[{i}] must be a (FiberSpec, warp) pair") from None
            if not isinstance(spec, FiberSpec):
                raise ValidationError(f"fiber[{i}] has no FiberSpec")
            warp = _as_warp(warp, (t1, t2))
            fibers.append((spec, warp))
        object.__setattr__(self, "fibers", tuple(fibers))
        if self.sample_positivity:
            grid = sample_window((t1, t2))
            for i, (_, warp) in enumerate(fibers):
                _check_positive(warp, grid, f"fiber[{i}]")

    @property
    def m(self) -> int:
        return len(self.fibers)

    @property
    def dims(self) -> list[int]:
        return [spec.dim for spec, _ in self.fibers]

    @property
    def n(self) -> int:
        return 1 + sum(self.dims)

    @property
    def specs(self) -> list[FiberSpec]:
        return [spec for spec, _ in self.fibers]

    @property
    def warps(self) -> list[WarpFn]:
        return [w for _, w in self.fibers]

    def contains(self, t: float) -> bool:
        return self.interval[0] < t < self.interval[1]

    def check(self, t: float) -> None:
        if not self.contains(t):
            raise DomainError(f"t={t} is not interior to the interval {self.interval}")


def kasner_parameters_of(dims: Sequence[int], p: Sequence[float]):
    zeta = sum(s * q for s, q in zip(dims, p))
    eta = sum(s * q * q for s, q in zip(dims, p))
    return zeta, eta, int(sum(dims))


@dataclass(frozen=True)
class KasnerSpec:
    """``-dt^2 + sum_i phi^(2 p_i) g_{F_i}`` with derived ``zeta``, ``eta``, ``S``."""

    phi: WarpFn
    exponents: tuple
    fibers: tuple
    interval: tuple
    zeta: Optional[float] = None
    eta: Optional[float] = None
    S: Optional[int] = None

    def __post_init__(self):
        if len(self.exponents) != len(self.fibers):
            raise ValidationError(
                f"{len(self.exponents)} exponents for {len(self.fibers)} fibers")
        if not self.fibers:
            raise ValidationError("a Kasner space-time needs at least one fiber")
        object.__setattr__(self, "exponents", tuple(float(p) for p in self.exponents))
        object.__setattr__(self, "fibers", tuple(self.fibers))
        object.__setattr__(self, "interval", tuple(float(x) for x in self.interval))
        object.__setattr__(self, "phi", _as_warp(self.phi, self.interval))
        zeta, eta, S = kasner_parameters_of([f.dim for f in self.fibers], self.exponents)
        for name, given, actual in (("zeta", self.zeta, zeta), ("eta", self.eta, eta), ("S", self.S, S)):
            if given is not None and given != actual:
                raise ValidationError(f"stored {name}={given} does not match recomputed {actual}")
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "S", S)
        if zeta != 0.0 and eta == 0.0:
            raise ValidationError("zeta != 0 requires eta != 0")
        if zeta != 0.0 and eta / zeta ** 2 < 1.0 / S * (1.0 - 1e-12):
            raise ValidationError(f"eta/zeta^2 = {eta / zeta ** 2} violates the bound >= 1/S = {1.0 / S}")
        _check_positive(self.phi, sample_window(self.interval), "phi")

    @property
    def dims(self) -> list[int]:
        return [f.dim for f in self.fibers]


def kasner_to_mgrw(k: KasnerSpec) -> WarpedSpacetime:
    """Realise a generalized Kasner space-time with warps ``phi**p_i``."""
    fibers = []
    for spec, p in zip(k.fibers, k.exponents):
        expr: Expr = Const(1.0) if p == 0.0 else Power(k.phi.expr, p)
        fibers.append((spec, WarpFn(expr, domain=k.interval)))
    return WarpedSpacetime(k.interval, tuple(fibers), name="kasner")


def build_spacetime(config: dict) -> WarpedSpacetime:
    """Build a validated space-time from a parsed TOML-style mapping.

    Either ``preset = "<name>"`` (with its parameters) or a ``[base]`` table
    with ``interval`` and a list of ``[[fiber]]`` tables.
    """
    from . import presets
    from .schema import fiber_from_dict, interval_from

    if "preset" in config:
        return presets.from_config(config)
    if "base" not in config:
        raise ValidationError("config: missing [base] table (or preset)")
    interval = interval_from(config["base"].get("interval"), "base.interval")
    raw = config.get("fiber")
    if not raw:
        raise ValidationError("config: at least one [[fiber]] table is required")
    fibers = []
    for i, entry in enumerate(raw):
        fibers.append(fiber_from_dict(entry, interval, f"fiber[{i}]"))
    return WarpedSpacetime(interval, tuple(fibers), name=config.get("name", ""))
