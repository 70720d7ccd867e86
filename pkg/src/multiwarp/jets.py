"""Second-order forward-mode jets and the expression trees that produce them.

A :class:`ScalarJet` carries ``(f, f', f'')`` at a point.  Arithmetic on jets
applies the product, quotient and chain rules exactly, so every curvature
formula downstream receives warping-function derivatives without
finite-difference noise.

Expressions are small immutable trees built from a fixed set of primitives::

    >>> from multiwarp.jets import T, exp
    >>> f = T ** 2 * exp(2 * T)
    >>> f.jet(0.0)
    ScalarJet(value=0.0, d1=0.0, d2=2.0)
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence

from scipy.optimize import brentq

from .errors import DomainError, PositivityError

__all__ = [
    "ScalarJet", "Expr", "Const", "Identity", "Affine", "Power", "Apply",
    "Sum", "Product", "Quotient", "Compose", "Inverse", "WarpFn", "T",
    "const", "exp", "sin", "cos", "sqrt", "arccos", "arcsin",
    "eval_jet", "power_rule_identities", "as_expr",
]


@dataclass(frozen=True)
class ScalarJet:
    """Value, first and second derivative of a scalar function at a point."""

    value: float
    d1: float = 0.0
    d2: float = 0.0

    @classmethod
    def constant(cls, c: float) -> "ScalarJet":
        return cls(float(c), 0.0, 0.0)

    @classmethod
    def variable(cls, t: float) -> "ScalarJet":
        return cls(float(t), 1.0, 0.0)

    def chain(self, g0: float, g1: float, g2: float) -> "ScalarJet":
        """Compose an outer function with ``(g, g', g'')`` at ``self.value``."""
        return ScalarJet(g0, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)

    def __add__(self, other):
        other = _lift(other)
        return ScalarJet(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet(-self.value, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        o = _lift(other)
        return ScalarJet(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "ScalarJet":
        v = self.value
        if v == 0.0:
            raise DomainError("division by a jet with zero value")
        return self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __truediv__(self, other):
        return self * _lift(other).reciprocal()

    def __rtruediv__(self, other):
        return _lift(other) * self.reciprocal()

    def __pow__(self, p):
        if isinstance(p, ScalarJet):
            raise TypeError("jet exponents must be real constants")
        return jet_power(self, float(p))


def _lift(x) -> ScalarJet:
    if isinstance(x, ScalarJet):
        return x
    return ScalarJet.constant(x)


def _is_integer(p: float) -> bool:
    return float(p).is_integer()


def jet_power(v: ScalarJet, p: float) -> ScalarJet:
    x = v.value
    if p == 0.0:
        return ScalarJet.constant(1.0)
    if x <= 0.0 and not _is_integer(p):
        raise DomainError(f"real power {p} of non-positive value {x}")
    if x == 0.0 and p < 2.0:
        raise DomainError(f"power {p} is not twice differentiable at 0")
    return v.chain(x ** p, p * x ** (p - 1.0), p * (p - 1.0) * x ** (p - 2.0))


# (name) -> (f, f', f'', domain check)
def _acos_parts(x):
    s = 1.0 - x * x
    return math.acos(x), -1.0 / math.sqrt(s), -x / s ** 1.5


def _asin_parts(x):
    s = 1.0 - x * x
    return math.asin(x), 1.0 / math.sqrt(s), x / s ** 1.5


def _sqrt_parts(x):
    r = math.sqrt(x)
    return r, 0.5 / r, -0.25 / (r * x)


_UNARY: dict[str, tuple[Callable[[float], tuple[float, float, float]], Callable[[float], bool]]] = {
    "exp": (lambda x: (math.exp(x),) * 3, lambda x: True),
    "sin": (lambda x: (math.sin(x), math.cos(x), -math.sin(x)), lambda x: True),
    "cos": (lambda x: (math.cos(x), -math.sin(x), -math.cos(x)), lambda x: True),
    "sqrt": (_sqrt_parts, lambda x: x > 0.0),
    "arccos": (_acos_parts, lambda x: -1.0 < x < 1.0),
    "arcsin": (_asin_parts, lambda x: -1.0 < x < 1.0),
}


class Expr:
    """Node of a real expression tree in one variable."""

    def jet(self, t: float) -> ScalarJet:
        raise NotImplementedError

    def value(self, t: float) -> float:
        return self.jet(t).value

    def __call__(self, t: float) -> float:
        return self.value(t)

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Affine(as_expr(other), -1.0, 0.0)))

    def __rsub__(self, other):
        return Sum((as_expr(other), Affine(self, -1.0, 0.0)))

    def __neg__(self):
        return Affine(self, -1.0, 0.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Affine(self, float(other), 0.0)
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Affine(self, float(other), 0.0)
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Affine(self, 1.0 / float(other), 0.0)
        return Quotient(self, as_expr(other))

    def __rtruediv__(self, other):
        return Quotient(as_expr(other), self)

    def __pow__(self, p):
        return Power(self, float(p))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, WarpFn):
        return x.expr
    return Const(float(x))


@dataclass(frozen=True, eq=False)
class Const(Expr):
    c: float

    def jet(self, t):
        return ScalarJet.constant(self.c)

    def value(self, t):
        return self.c


@dataclass(frozen=True, eq=False)
class Identity(Expr):
    def jet(self, t):
        return ScalarJet.variable(t)

    def value(self, t):
        return float(t)


@dataclass(frozen=True, eq=False)
class Affine(Expr):
    """``scale * arg + shift``."""

    arg: Expr
    scale: float = 1.0
    shift: float = 0.0

    def jet(self, t):
        j = self.arg.jet(t)
        return ScalarJet(self.scale * j.value + self.shift, self.scale * j.d1, self.scale * j.d2)

    def value(self, t):
        return self.scale * self.arg.value(t) + self.shift


@dataclass(frozen=True, eq=False)
class Power(Expr):
    base: Expr
    p: float

    def jet(self, t):
        return jet_power(self.base.jet(t), self.p)

    def value(self, t):
        x = self.base.value(t)
        if x <= 0.0 and not _is_integer(self.p):
            raise DomainError(f"real power {self.p} of non-positive value {x} at t={t}")
        return x ** self.p


@dataclass(frozen=True, eq=False)
class Apply(Expr):
    """One of the elementary functions listed in ``_UNARY`` applied to ``arg``."""

    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in _UNARY:
            raise ValueError(f"unknown primitive {self.name!r}")

    def _parts(self, x, t):
        fn, ok = _UNARY[self.name]
        if not ok(x):
            raise DomainError(f"{self.name} undefined (or not C^2) at argument {x} (t={t})")
        return fn(x)

    def jet(self, t):
        j = self.arg.jet(t)
        return j.chain(*self._parts(j.value, t))

    def value(self, t):
        return self._parts(self.arg.value(t), t)[0]


@dataclass(frozen=True, eq=False)
class Sum(Expr):
    terms: tuple

    def jet(self, t):
        out = ScalarJet.constant(0.0)
        for term in self.terms:
            out = out + term.jet(t)
        return out

    def value(self, t):
        return sum(term.value(t) for term in self.terms)


@dataclass(frozen=True, eq=False)
class Product(Expr):
    factors: tuple

    def jet(self, t):
        out = ScalarJet.constant(1.0)
        for f in self.factors:
            out = out * f.jet(t)
        return out

    def value(self, t):
        return math.prod(f.value(t) for f in self.factors)


@dataclass(frozen=True, eq=False)
class Quotient(Expr):
    num: Expr
    den: Expr

    def jet(self, t):
        return self.num.jet(t) / self.den.jet(t)

    def value(self, t):
        d = self.den.value(t)
        if d == 0.0:
            raise DomainError(f"division by zero at t={t}")
        return self.num.value(t) / d


@dataclass(frozen=True, eq=False)
class Compose(Expr):
    """``outer(inner(t))``; ``outer`` is an expression in its own variable."""

    outer: Expr
    inner: Expr

    def jet(self, t):
        j = self.inner.jet(t)
        o = self.outer.jet(j.value)
        return j.chain(o.value, o.d1, o.d2)

    def value(self, t):
        return self.outer.value(self.inner.value(t))


@dataclass(frozen=True, eq=False)
class Inverse(Expr):
    """Inverse of a strictly monotone function ``forward`` on ``[lo, hi]``.

    The value is found by bracketed root finding; derivatives come from the
    inverse-function rule, so they are exact given the root.
    """

    forward: Expr
    lo: float
    hi: float
    xtol: float = 1e-14

    def solve(self, t: float) -> float:
        f_lo = self.forward.value(self.lo) - t
        f_hi = self.forward.value(self.hi) - t
        if f_lo == 0.0:
            return self.lo
        if f_hi == 0.0:
            return self.hi
        if f_lo * f_hi > 0.0:
            raise DomainError(f"t={t} is outside the range of the inverted function")
        return brentq(lambda r: self.forward.value(r) - t, self.lo, self.hi,
                      xtol=self.xtol, rtol=4 * sys.float_info.epsilon, maxiter=200)

    def jet(self, t):
        r = self.solve(t)
        f = self.forward.jet(r)
        if f.d1 == 0.0:
            raise DomainError(f"inverse is not differentiable at t={t}")
        return ScalarJet(r, 1.0 / f.d1, -f.d2 / f.d1 ** 3)

    def value(self, t):
        return self.solve(t)


T = Identity()


def const(c: float) -> Const:
    return Const(float(c))


def exp(arg) -> Apply:
    return Apply("exp", as_expr(arg))


def sin(arg) -> Apply:
    return Apply("sin", as_expr(arg))


def cos(arg) -> Apply:
    return Apply("cos", as_expr(arg))


def sqrt(arg) -> Apply:
    return Apply("sqrt", as_expr(arg))


def arccos(arg) -> Apply:
    return Apply("arccos", as_expr(arg))


def arcsin(arg) -> Apply:
    return Apply("arcsin", as_expr(arg))


@dataclass(frozen=True)
class WarpFn:
    """An expression together with the open interval it is declared on."""

    expr: Expr
    domain: tuple = (-math.inf, math.inf)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise DomainError(f"empty domain {self.domain}")
        object.__setattr__(self, "expr", as_expr(self.expr))

    def contains(self, t: float) -> bool:
        lo, hi = self.domain
        return lo < t < hi

    def check(self, t: float) -> None:
        if not self.contains(t):
            raise DomainError(f"t={t} outside open domain {self.domain}")

    def jet(self, t: float) -> ScalarJet:
        self.check(t)
        return self.expr.jet(t)

    def value(self, t: float) -> float:
        self.check(t)
        return self.expr.value(t)

    def __call__(self, t: float) -> float:
        return self.value(t)


def eval_jet(f, t: float, *, warp: bool = False) -> ScalarJet:
    """Return ``(f(t), f'(t), f''(t))``.

    ``f`` may be a :class:`WarpFn` (its domain is enforced) or a bare
    :class:`Expr`.  With ``warp=True`` a non-positive value raises
    :class:`PositivityError`.
    """
    j = f.jet(t)
    if warp and not j.value > 0.0:
        raise PositivityError(f"warping function is {j.value} <= 0 at t={t}", t=t)
    return j


def power_rule_identities(v: ScalarJet, t_exp: float) -> tuple[float, float]:
    """Gradient and Laplacian of ``v**t_exp`` on the Riemannian line.

    Returns ``(t v^(t-1) v', t[(t-1) v^(t-2) v'^2 + v^(t-1) v''])``, which are
    the first and second derivatives of ``v**t_exp`` written through the
    power rules rather than through jet composition.
    """
    x = v.value
    if not x > 0.0:
        raise PositivityError(f"power rule needs v > 0, got {x}")
    p = float(t_exp)
    grad = p * x ** (p - 1.0) * v.d1
    lap = p * ((p - 1.0) * x ** (p - 2.0) * v.d1 * v.d1 + x ** (p - 1.0) * v.d2)
    return grad, lap


def jets_of(warps: Sequence, t: float, *, warp: bool = True) -> list[ScalarJet]:
    return [eval_jet(f, t, warp=warp) for f in warps]
