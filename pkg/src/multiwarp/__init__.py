"""Curvature of multiply warped space-times: closed forms, Einstein tests and a finite-difference oracle."""

from . import errors
from .errors import *  # noqa: F403
from .jets import ScalarJet, WarpFn, eval_jet, power_rule_identities
from .spacetime import FiberModel, FiberSpec, KasnerSpec, WarpedSpacetime, build_spacetime, kasner_to_mgrw
from .curvature import curvature_point, ricci_fiber_coeff, ricci_quadratic, ricci_tt, riemann_frame, scalar_curvature
from .einstein import EinsteinReport, constant_scalar_check, einstein_auto, einstein_residuals, infer_lambda

__version__ = "0.1.0"

__all__ = [name for name in dir(errors) if name.endswith("Error") or name == "InconsistentParameters"] + [
    "ScalarJet", "WarpFn", "eval_jet", "power_rule_identities",
    "FiberModel", "FiberSpec", "KasnerSpec", "WarpedSpacetime", "build_spacetime", "kasner_to_mgrw",
    "curvature_point", "ricci_fiber_coeff", "ricci_quadratic", "ricci_tt", "riemann_frame", "scalar_curvature",
    "EinsteinReport", "constant_scalar_check", "einstein_auto", "einstein_residuals", "infer_lambda",
]
