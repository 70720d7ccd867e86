"""Named space-times: classical Kasner, Schwarzschild interior and static BTZ."""

from __future__ import annotations

import math
from typing import Sequence

from .btz import LapseSpec, derived_spacetime
from .errors import ValidationError
from .jets import Affine, Const, Product, Quotient, T, arccos, arcsin, sqrt
from .spacetime import FiberModel, FiberSpec, KasnerSpec, WarpedSpacetime, kasner_to_mgrw

__all__ = [
    "kasner_spec", "kasner", "schwarzschild_lapse", "schwarzschild_interior",
    "btz_lapse", "btz_static", "from_config", "PRESETS",
]

CLASSICAL_KASNER = (-1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0)


def kasner_spec(p: Sequence[float] = CLASSICAL_KASNER) -> KasnerSpec:
    """``phi = t`` on ``(0, inf)`` with one flat line per exponent."""
    fibers = tuple(FiberSpec(1, model=FiberModel.flat(1)) for _ in p)
    return KasnerSpec(phi=T, exponents=tuple(p), fibers=fibers, interval=(0.0, math.inf))


def kasner(p: Sequence[float] = CLASSICAL_KASNER) -> WarpedSpacetime:
    return kasner_to_mgrw(kasner_spec(p))


def _positive(name: str, x) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: expected a number, got {x!r}") from None
    if not v > 0.0 or not math.isfinite(v):
        raise ValidationError(f"{name}: must be positive and finite, got {x!r}")
    return v


def schwarzschild_lapse(m: float = 1.0) -> LapseSpec:
    """``N^2 = 2m/r - 1`` on ``(0, 2m)`` anchored at ``r = 0``."""
    m = _positive("m", m)
    n2 = Affine(Quotient(Const(2.0 * m), T), 1.0, -1.0)
    closed = (Affine(arccos(sqrt(Affine(T, -1.0 / (2.0 * m), 1.0))), 2.0 * m, 0.0)
              - sqrt(Product((T, Affine(T, -1.0, 2.0 * m)))))
    return LapseSpec(n2, 0.0, (0.0, 2.0 * m), params={"m": m, "F_limit": m * math.pi}, closed_form_F=closed,
                     name=f"schwarzschild_interior(m={m:g})")


def schwarzschild_interior(m: float = 1.0) -> WarpedSpacetime:
    """``-dt^2 + b_1^2 dx^2 + b_2^2 g_{S^2}``, ``b_2 = F^{-1}``, ``b_1 = sqrt(2m/b_2 - 1)``."""
    sphere = FiberSpec(2, model=FiberModel.sphere2(1.0))
    return derived_spacetime(schwarzschild_lapse(m), second_fiber=sphere)


def btz_lapse(m: float = 1.0, l: float = 1.0) -> LapseSpec:
    """``N^2 = m - r^2/l^2`` on ``(0, r_H)`` with ``r_H = l sqrt(m)``."""
    m, l = _positive("m", m), _positive("l", l)
    r_h = l * math.sqrt(m)
    n2 = Affine(T * T, -1.0 / l ** 2, m)
    closed = Affine(arcsin(Affine(T, 1.0 / r_h, 0.0)), l, 0.0)
    return LapseSpec(n2, 0.0, (0.0, r_h), params={"m": m, "l": l, "r_H": r_h, "F_limit": l * math.pi / 2.0},
                     closed_form_F=closed, name=f"btz_static(m={m:g},l={l:g})")


def btz_static(m: float = 1.0, l: float = 1.0) -> WarpedSpacetime:
    """(2+1) interior ``-dt^2 + b_1^2 dx^2 + b_2^2 dphi^2`` with flat circle fibers."""
    return derived_spacetime(btz_lapse(m, l))


PRESETS = {
    "kasner": (kasner, ()),
    "schwarzschild_interior": (schwarzschild_interior, ("m",)),
    "btz_static": (btz_static, ("m", "l")),
}


def from_config(config: dict) -> WarpedSpacetime:
    """``preset = "<name>"`` with parameters at top level or in a ``[params]`` table."""
    name = config.get("preset")
    if name not in PRESETS:
        raise ValidationError(f"preset: unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    fn, keys = PRESETS[name]
    params = dict(config.get("params", {}))
    for key in keys:
        if key in config:
            params.setdefault(key, config[key])
    if name == "kasner" and "p" in config:
        params["p"] = config["p"]
    unknown = set(params) - set(keys) - ({"p"} if name == "kasner" else set())
    if unknown:
        raise ValidationError(f"params: unknown parameter(s) {sorted(unknown)} for preset {name}")
    kwargs = {}
    for key, value in params.items():
        if key == "p":
            if not isinstance(value, list) or not value:
                raise ValidationError("params.p: expected a non-empty list of exponents")
            kwargs["p"] = tuple(float(x) for x in value)
        else:
            kwargs[key] = _positive(f"params.{key}", value)
    return fn(**kwargs)
