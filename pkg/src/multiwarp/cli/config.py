"""Run configuration: TOML ingestion, subject construction and grids.

A config names exactly one subject::

    preset = "btz_static"          # or a [spacetime] table with preset/base/fiber
    m = 1.0

    [kasner]                       # phi, interval, exponents and [[kasner.fiber]]
    [lapse]                        # n_squared, anchor, domain, optional second_fiber

plus optional ``[grid]`` (``start``, ``end``, ``n`` or ``spec = "a:b:n"``),
``[tolerances]`` (``einstein``, ``oracle``, ``h``), ``[expect]``
(``lambda``) and ``[output]`` (``path``, ``format``).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..btz import LapseSpec, derived_spacetime
from ..errors import MultiwarpError, ValidationError
from ..presets import from_config as preset_from_config
from ..schema import expr_from_dict, interval_from, model_from
from ..spacetime import (FiberSpec, KasnerSpec, WarpedSpacetime, build_spacetime, finite_window,
                         kasner_to_mgrw, sample_window)

__all__ = ["ConfigError", "RunConfig", "Subject", "load_toml", "parse_grid", "build_subject",
           "resolve_grid", "env_tolerance", "GRID_MARGIN", "DEFAULT_POINTS"]

GRID_MARGIN = 1e-9
DEFAULT_POINTS = 32
SUBJECTS = ("spacetime", "kasner", "lapse")
# Einstein constants the presets are known to satisfy
PRESET_LAMBDA = {
    "kasner": lambda p: 0.0,
    "schwarzschild_interior": lambda p: 0.0,
    "btz_static": lambda p: -2.0 / float(p.get("l", 1.0)) ** 2,
}


class ConfigError(ValidationError):
    """Invalid run configuration; the message starts with the offending field."""


def load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"--config: file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"--config: {path}: malformed TOML: {exc}") from None


def env_tolerance(default: float) -> float:
    raw = os.environ.get("MULTIWARP_TOL")
    if raw is None or raw == "":
        return default
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"MULTIWARP_TOL: expected a number, got {raw!r}") from None
    if not (v > 0.0 and math.isfinite(v)):
        raise ConfigError(f"MULTIWARP_TOL: must be positive, got {raw!r}")
    return v


def parse_grid(text: str, where: str = "--grid") -> tuple:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{where}: expected start:end:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{where}: expected start:end:n, got {text!r}") from None
    return _check_grid(a, b, n, where)


def _check_grid(a, b, n, where) -> tuple:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ConfigError(f"{where}: endpoints must be finite")
    if n < 1:
        raise ConfigError(f"{where}: need at least one point, got n={n}")
    if n > 1 and not a < b:
        raise ConfigError(f"{where}: need start < end, got {a} >= {b}")
    return (a, b, n)


def _grid_from_table(raw, where="grid") -> tuple:
    if isinstance(raw, str):
        return parse_grid(raw, where)
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a table or \"start:end:n\"")
    if "spec" in raw:
        return parse_grid(raw["spec"], f"{where}.spec")
    try:
        return _check_grid(float(raw["start"]), float(raw["end"]), int(raw["n"]), where)
    except KeyError as exc:
        raise ConfigError(f"{where}.{exc.args[0]}: missing") from None
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: start, end must be numbers and n an integer") from None


def resolve_grid(grid: Optional[tuple], domain: tuple, n_default: int = DEFAULT_POINTS,
                 trim: float = 0.0) -> list:
    """Grid points inside the open ``domain``; endpoints are clipped by ``GRID_MARGIN``.

    Without an explicit grid, ``n_default`` interior points are spread over the
    domain (a width-10 window for infinite ends) after removing a fraction
    ``trim`` of it at each side.
    """
    lo, hi = domain
    if grid is None:
        a, b = finite_window(domain)
        cut = trim * (b - a)
        return [float(t) for t in sample_window((a + cut, b - cut), n_default)]
    a, b, n = grid
    pts = np.linspace(a, b, n) if n > 1 else np.array([a])
    out = []
    for t in pts:
        t = float(t)
        if t < lo or t > hi:
            raise ConfigError(f"grid: point {t!r} lies outside the domain ({lo}, {hi})")
        out.append(min(max(t, lo + GRID_MARGIN), hi - GRID_MARGIN))
    return out


@dataclass
class Subject:
    """What the commands operate on."""

    spacetime: WarpedSpacetime
    kind: str
    label: str
    expect_lambda: Optional[float] = None
    lapse: Optional[LapseSpec] = None
    kasner: Optional[KasnerSpec] = None


def _wrap(where: str, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except MultiwarpError as exc:
        if str(exc).startswith(f"{where}"):
            raise
        # keep the error class (and exit code), prefix the config field
        exc.args = (f"{where}: {exc}",) + exc.args[1:]
        raise


def _kasner_from(raw: dict) -> KasnerSpec:
    interval = interval_from(raw.get("interval"), "kasner.interval")
    if "phi" not in raw:
        raise ConfigError("kasner.phi: missing")
    phi = expr_from_dict(raw["phi"], "kasner.phi")
    exps = raw.get("exponents")
    if not isinstance(exps, list) or not exps:
        raise ConfigError("kasner.exponents: expected a non-empty list")
    fibers_raw = raw.get("fiber")
    if not isinstance(fibers_raw, list) or len(fibers_raw) != len(exps):
        raise ConfigError(f"kasner.fiber: expected {len(exps)} [[kasner.fiber]] tables, one per exponent")
    fibers = []
    for i, f in enumerate(fibers_raw):
        where = f"kasner.fiber[{i}]"
        model = model_from(f.get("model"), f"{where}.model")
        dim = f.get("dim", model.dim if model is not None else None)
        if dim is None:
            raise ConfigError(f"{where}.dim: missing")
        fibers.append(_wrap(where, FiberSpec, dim, f.get("lambda"), f.get("tau"), model))
    return _wrap("kasner", KasnerSpec, phi, tuple(float(p) for p in exps), tuple(fibers), interval)


def _lapse_from(raw: dict) -> tuple:
    if "n_squared" not in raw:
        raise ConfigError("lapse.n_squared: missing")
    n2 = expr_from_dict(raw["n_squared"], "lapse.n_squared")
    domain = interval_from(raw.get("domain"), "lapse.domain")
    anchor = float(raw.get("anchor", domain[0]))
    spec = _wrap("lapse", LapseSpec, n2, anchor, domain, {}, None, str(raw.get("name", "lapse")))
    second = None
    if "second_fiber" in raw:
        f = raw["second_fiber"]
        model = model_from(f.get("model"), "lapse.second_fiber.model")
        dim = f.get("dim", model.dim if model is not None else 1)
        second = _wrap("lapse.second_fiber", FiberSpec, dim, f.get("lambda"), f.get("tau"), model)
    return spec, second


def build_subject(config: dict) -> Subject:
    present = [k for k in SUBJECTS if k in config]
    if "preset" in config:
        present.append("preset")
    if len(present) != 1:
        raise ConfigError(f"config: exactly one subject (preset, {', '.join(SUBJECTS)}) is required, "
                          f"found {present or 'none'}")
    kind = present[0]
    expect = config.get("expect", {}).get("lambda")
    if expect is not None:
        try:
            expect = float(expect)
        except (TypeError, ValueError):
            raise ConfigError(f"expect.lambda: expected a number, got {expect!r}") from None
    if kind == "preset" or (kind == "spacetime" and "preset" in config["spacetime"]):
        raw = config if kind == "preset" else config["spacetime"]
        st = _wrap(f"{'spacetime.' if kind == 'spacetime' else ''}preset", preset_from_config, raw)
        name = raw["preset"]
        params = dict(raw.get("params", {}))
        params.update({k: raw[k] for k in ("m", "l", "p") if k in raw})
        if expect is None:
            expect = PRESET_LAMBDA[name](params)
        return Subject(st, "preset", st.name or name, expect)
    if kind == "spacetime":
        st = _wrap("spacetime", build_spacetime, config["spacetime"])
        return Subject(st, "spacetime", st.name or "spacetime", expect)
    if kind == "kasner":
        k = _kasner_from(config["kasner"])
        return Subject(_wrap("kasner", kasner_to_mgrw, k), "kasner", "kasner", expect, kasner=k)
    spec, second = _lapse_from(config["lapse"])
    st = _wrap("lapse", derived_spacetime, spec, second)
    return Subject(st, "lapse", spec.name, expect, lapse=spec)


@dataclass
class RunConfig:
    subject: Subject
    grid: Optional[tuple] = None
    tolerances: dict = field(default_factory=dict)
    out_path: Optional[str] = None
    out_format: Optional[str] = None

    @classmethod
    def from_mapping(cls, config: dict) -> "RunConfig":
        subject = build_subject(config)
        grid = _grid_from_table(config["grid"]) if "grid" in config else None
        tols = {}
        for key, value in dict(config.get("tolerances", {})).items():
            try:
                v = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"tolerances.{key}: expected a number, got {value!r}") from None
            if not v > 0.0:
                raise ConfigError(f"tolerances.{key}: must be positive, got {value!r}")
            tols[key] = v
        out = dict(config.get("output", {}))
        fmt = out.get("format")
        if fmt is not None and fmt not in ("json", "csv"):
            raise ConfigError(f"output.format: expected json or csv, got {fmt!r}")
        return cls(subject, grid, tols, out.get("path"), fmt)

    def points(self, n_default: int = DEFAULT_POINTS, trim: float = 0.0) -> list:
        return resolve_grid(self.grid, self.subject.spacetime.interval, n_default, trim)
