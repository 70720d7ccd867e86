"""TOML schema for expression trees and fibers.

An expression is a table with a ``kind`` key::

    { kind = "const", c = 2.0 }
    { kind = "identity" }                      # also the bare string "t"
    { kind = "affine", arg = {...}, scale = 1.0, shift = 0.0 }
    { kind = "power", base = {...}, p = 0.5 }
    { kind = "exp" | "sin" | "cos" | "sqrt" | "arccos" | "arcsin", arg = {...} }
    { kind = "sum", terms = [...] }
    { kind = "product", factors = [...] }
    { kind = "quotient", num = {...}, den = {...} }
    { kind = "compose", outer = {...}, inner = {...} }

A bare number is a constant.  ``arg``/``base`` default to the identity.

A fiber is ``{ dim, lambda, tau, model, warp }`` where ``model`` is either a
string (``"flat"``, ``"circle"``, ``"sphere2"``, ``"sphere3"``) or a table
``{ kind = "sphere2", radius = 1.0 }``.
"""

from __future__ import annotations

import math

from .errors import ValidationError
from .jets import (Affine, Apply, Compose, Const, Expr, Identity, Power, Product,
                   Quotient, Sum, WarpFn, _UNARY)

__all__ = ["expr_from_dict", "expr_to_dict", "fiber_from_dict", "interval_from", "model_from"]


def _num(d: dict, key: str, path: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ValidationError(f"{path}.{key}: missing")
        return default
    x = d[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(f"{path}.{key}: expected a number, got {x!r}")
    return float(x)


def expr_from_dict(node, path: str = "warp") -> Expr:
    if isinstance(node, bool):
        raise ValidationError(f"{path}: expected an expression, got {node!r}")
    if isinstance(node, (int, float)):
        return Const(float(node))
    if node == "t":
        return Identity()
    if not isinstance(node, dict):
        raise ValidationError(f"{path}: expected an expression table, got {node!r}")
    kind = node.get("kind")
    sub = lambda key: expr_from_dict(node.get(key, "t"), f"{path}.{key}")  # noqa: E731
    if kind == "const":
        return Const(_num(node, "c", path))
    if kind in ("identity", "t"):
        return Identity()
    if kind == "affine":
        return Affine(sub("arg"), _num(node, "scale", path, 1.0), _num(node, "shift", path, 0.0))
    if kind == "power":
        return Power(sub("base"), _num(node, "p", path))
    if kind in _UNARY:
        return Apply(kind, sub("arg"))
    if kind in ("sum", "product"):
        key = "terms" if kind == "sum" else "factors"
        items = node.get(key)
        if not isinstance(items, list) or not items:
            raise ValidationError(f"{path}.{key}: expected a non-empty list")
        parts = tuple(expr_from_dict(x, f"{path}.{key}[{j}]") for j, x in enumerate(items))
        return Sum(parts) if kind == "sum" else Product(parts)
    if kind == "quotient":
        return Quotient(sub("num"), sub("den"))
    if kind == "compose":
        return Compose(sub("outer"), sub("inner"))
    raise ValidationError(f"{path}.kind: unknown expression kind {kind!r}")


def expr_to_dict(e: Expr):
    if isinstance(e, Const):
        return {"kind": "const", "c": e.c}
    if isinstance(e, Identity):
        return {"kind": "identity"}
    if isinstance(e, Affine):
        return {"kind": "affine", "arg": expr_to_dict(e.arg), "scale": e.scale, "shift": e.shift}
    if isinstance(e, Power):
        return {"kind": "power", "base": expr_to_dict(e.base), "p": e.p}
    if isinstance(e, Apply):
        return {"kind": e.name, "arg": expr_to_dict(e.arg)}
    if isinstance(e, Sum):
        return {"kind": "sum", "terms": [expr_to_dict(x) for x in e.terms]}
    if isinstance(e, Product):
        return {"kind": "product", "factors": [expr_to_dict(x) for x in e.factors]}
    if isinstance(e, Quotient):
        return {"kind": "quotient", "num": expr_to_dict(e.num), "den": expr_to_dict(e.den)}
    if isinstance(e, Compose):
        return {"kind": "compose", "outer": expr_to_dict(e.outer), "inner": expr_to_dict(e.inner)}
    raise ValidationError(f"expression node {type(e).__name__} has no TOML form")


def interval_from(raw, path: str) -> tuple:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ValidationError(f"{path}: expected [t1, t2]")
    try:
        t1, t2 = float(raw[0]), float(raw[1])
    except (TypeError, ValueError):
        raise ValidationError(f"{path}: endpoints must be numbers") from None
    if math.isnan(t1) or math.isnan(t2) or not t1 < t2:
        raise ValidationError(f"{path}: need t1 < t2, got {raw}")
    return (t1, t2)


def model_from(raw, path: str):
    from .spacetime import FiberModel

    if raw is None:
        return None
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: expected a model name or table")
    kind = raw.get("kind")
    try:
        if kind == "flat":
            return FiberModel.flat(int(raw.get("k", raw.get("dim", 1))))
        return FiberModel(kind, radius=float(raw.get("radius", 1.0)))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def fiber_from_dict(entry: dict, interval: tuple, path: str):
    from .spacetime import FiberSpec

    if not isinstance(entry, dict):
        raise ValidationError(f"{path}: expected a table")
    model = model_from(entry.get("model"), f"{path}.model")
    if model is not None and model.kind == "flat" and "model" in entry and isinstance(entry["model"], str):
        model = type(model).flat(int(entry.get("dim", 1)))
    dim = entry.get("dim", model.dim if model is not None else None)
    if dim is None:
        raise ValidationError(f"{path}.dim: missing")
    try:
        spec = FiberSpec(dim, entry.get("lambda"), entry.get("tau"), model)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None
    if "warp" not in entry:
        raise ValidationError(f"{path}.warp: missing")
    warp = WarpFn(expr_from_dict(entry["warp"], f"{path}.warp"), domain=interval)
    return spec, warp
