"""``multiwarp`` command line.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 mathematical domain error (positivity, non-invertibility, ...).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .. import __version__
from ..curvature import curvature_point
from ..einstein import DEFAULT_TOL as EINSTEIN_TOL
from ..einstein import einstein_auto, einstein_residuals
from ..errors import (InconsistentParameters, MissingDataError, MultiwarpError, NoModelError,
                      StepTooLargeError, ValidationError)
from ..kasner import solve_phi_sigma_nu, solve_star_system
from ..oracle import DEFAULT_H, DEFAULT_TOL as ORACLE_TOL, compare
from ..roots import FAMILIES, constant_solution_count, family_terms, threshold_tau
from ..tables import (classify_constant_tau_type2, classify_einstein_type2, classify_einstein_type3,
                      parse_number)
from .config import ConfigError, RunConfig, env_tolerance, load_toml, parse_grid, resolve_grid
from .output import emit

__all__ = ["main", "build_parser", "cmd_curvature", "cmd_einstein", "cmd_kasner", "cmd_verify",
           "EXIT_OK", "EXIT_VERIFY", "EXIT_CONFIG", "EXIT_DOMAIN"]

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3
VERIFY_POINTS = 8
VERIFY_TRIM = 0.1
CONFIG_ERRORS = (ConfigError, ValidationError, MissingDataError, InconsistentParameters, NoModelError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _subject_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--preset", choices=("kasner", "schwarzschild_interior", "btz_static"))
    p.add_argument("--m", type=float, help="mass parameter of the preset")
    p.add_argument("--l", type=float, help="AdS length of the BTZ preset")
    p.add_argument("--grid", help="start:end:n, endpoints clipped into the open domain")


def _output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multiwarp", description="Curvature and Einstein analysis of multiply warped space-times.")
    parser.add_argument("--version", action="version", version=f"multiwarp {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("curvature", help="closed-form curvature on a grid")
    _subject_options(p)
    _output_options(p)

    p = sub.add_parser("einstein", help="Einstein test with a given or inferred constant")
    _subject_options(p)
    _output_options(p)
    p.add_argument("--lambda", dest="lam", default="auto", help="'auto' or a number")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("verify", help="closed form against the finite-difference oracle")
    _subject_options(p)
    _output_options(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--h", type=float, default=None, help=f"finite-difference step (default {DEFAULT_H})")
    p.add_argument("--expect-lambda", type=float, dest="expect_lambda")

    p = sub.add_parser("kasner", help="generalized Kasner toolkit")
    ks = p.add_subparsers(dest="kasner_command", parser_class=_Parser, required=True)
    c = ks.add_parser("classify", help="table lookup for two or three fibers")
    _output_options(c)
    c.add_argument("--type", dest="ktype", choices=("II", "III"), required=True)
    for name in ("zeta", "eta", "lambda", "lambdaF2", "tauF2", "p1", "p2"):
        c.add_argument(f"--{name}", dest=name.replace("lambda", "lam"), type=str)
    c.add_argument("--p", nargs=3, type=str, help="three exponents (type III)")
    c.add_argument("--eps", type=float, default=1e-12)
    s = ks.add_parser("solve", help="closed-form solution of (phi^sigma)'' = nu phi^sigma")
    _output_options(s)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--A", type=float, default=1.0)
    s.add_argument("--B", type=float, default=0.0)
    s.add_argument("--star", action="store_true", help="also impose (phi^sigma)'^2 = nu (phi^sigma)^2")
    s.add_argument("--sign", type=int, default=1, choices=(1, -1))
    s.add_argument("--interval", default="0:1", help="a:b")
    s.add_argument("--grid", help="start:end:n for the residual check")
    r = ks.add_parser("roots", help="constant solutions of the sphere examples")
    _output_options(r)
    r.add_argument("--family", choices=FAMILIES, required=True)
    r.add_argument("--tau", type=float, required=True)
    r.add_argument("--tauS3", type=float, default=6.0)
    r.add_argument("--tauS2", type=float, default=2.0)
    r.add_argument("--u-max", type=float, default=1e6, dest="u_max")
    return parser


# -- subject resolution ---------------------------------------------------------

def _run_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("--preset: cannot be combined with --config")
    if args.config:
        mapping = load_toml(args.config)
        for flag in ("m", "l"):
            if getattr(args, flag) is not None:
                raise ConfigError(f"--{flag}: preset parameters belong in the config file")
    elif args.preset:
        mapping = {"preset": args.preset}
        for flag in ("m", "l"):
            value = getattr(args, flag)
            if value is not None:
                mapping[flag] = value
    else:
        raise ConfigError("--config/--preset: one of them is required")
    rc = RunConfig.from_mapping(mapping)
    if args.grid:
        rc.grid = parse_grid(args.grid)
    if getattr(args, "out", None):
        rc.out_path = args.out
    if getattr(args, "format", None):
        rc.out_format = args.format
    return rc


def _tolerance(args, rc: RunConfig, key: str, default: float) -> float:
    if getattr(args, "tol", None) is not None:
        if not args.tol > 0:
            raise ConfigError(f"--tol: must be positive, got {args.tol}")
        return args.tol
    if key in rc.tolerances:
        return rc.tolerances[key]
    return env_tolerance(default)


def _header(command: str, rc: RunConfig) -> dict:
    st = rc.subject.spacetime
    return {"command": command, "subject": rc.subject.label, "kind": rc.subject.kind,
            "interval": list(st.interval), "dims": st.dims}


# -- commands -------------------------------------------------------------------

def cmd_curvature(rc: RunConfig) -> tuple:
    st = rc.subject.spacetime
    pts = rc.points()
    records = [curvature_point(st, t).as_record() for t in pts]
    return {**_header("curvature", rc), "records": records}, EXIT_OK


def cmd_einstein(rc: RunConfig, lam: str = "auto", tol: float = EINSTEIN_TOL) -> tuple:
    st = rc.subject.spacetime
    pts = rc.points()
    if lam == "auto":
        rep = einstein_auto(st, pts, tol)
    else:
        try:
            value = float(lam)
        except ValueError:
            raise ConfigError(f"--lambda: expected 'auto' or a number, got {lam!r}") from None
        rep = einstein_residuals(st, value, pts, tol)
    payload = {**_header("einstein", rc), "grid": pts, "report": rep.to_dict()}
    if rc.subject.lapse is not None:
        from ..btz import lapse_report
        from ..spacetime import sample_window
        payload["lapse"] = lapse_report(rc.subject.lapse, sample_window(rc.subject.lapse.r_domain, len(pts)))
    return payload, EXIT_OK


def cmd_verify(rc: RunConfig, tol: float = ORACLE_TOL, h: Optional[float] = None,
               expect_lambda: Optional[float] = None) -> tuple:
    st = rc.subject.spacetime
    # finite differences degrade where a warp tends to 0, so the default grid stays clear of the ends
    pts = rc.points(VERIFY_POINTS, VERIFY_TRIM)
    lam = rc.subject.expect_lambda if expect_lambda is None else expect_lambda
    try:
        reports = compare(st, pts, h or rc.tolerances.get("h", DEFAULT_H), tol, lam)
    except StepTooLargeError as exc:
        # the oracle cannot certify this tolerance: a verification failure, not a domain error
        payload = {**_header("verify", rc), "tolerance": tol, "expect_lambda": lam,
                   "passed": False, "error": str(exc), "failed_points": [], "records": []}
        return payload, EXIT_VERIFY
    failed = [r.point[0] for r in reports if not r.passed]
    payload = {**_header("verify", rc), "tolerance": tol, "expect_lambda": lam,
               "passed": not failed, "failed_points": failed,
               "records": [{"t": r.point[0], **{c["quantity"]: c["rel_diff"] for c in r.comparisons},
                            "passed": r.passed} for r in reports],
               "reports": [r.to_dict() for r in reports]}
    return payload, EXIT_OK if not failed else EXIT_VERIFY


def _number(args, name: str, default="0"):
    raw = getattr(args, name)
    try:
        return parse_number(default if raw is None else raw)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"--{name}: expected a number or fraction, got {raw!r}") from None


def _kasner_classify(args) -> dict:
    zeta, eta = _number(args, "zeta"), _number(args, "eta")
    if args.ktype == "II":
        if args.p is not None:
            raise ConfigError("--p: type II takes --p1 and --p2")
        if args.p1 is None and args.p2 is None and (zeta != 0 or eta != 0):
            raise ConfigError("--p1/--p2: required unless zeta = eta = 0")
        p1, p2 = _number(args, "p1"), _number(args, "p2")
        if args.tauF2 is not None:
            if args.lam is not None or args.lamF2 is not None:
                raise ConfigError("--tauF2: selects the scalar-curvature table; drop --lambda/--lambdaF2")
            row = classify_constant_tau_type2(zeta, eta, _number(args, "tauF2"), p1, p2, args.eps)
        else:
            row = classify_einstein_type2(zeta, eta, _number(args, "lam"), _number(args, "lamF2"),
                                          p1, p2, args.eps)
    else:
        for flag in ("p1", "p2", "lamF2", "tauF2"):
            if getattr(args, flag) is not None:
                raise ConfigError(f"--{flag.replace('lam', 'lambda')}: not used by type III")
        if args.p is None and (zeta != 0 or eta != 0):
            raise ConfigError("--p: required unless zeta = eta = 0")
        try:
            p = [parse_number(x) for x in (args.p or ("0", "0", "0"))]
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"--p: expected three numbers, got {args.p}") from None
        row = classify_einstein_type3(zeta, eta, _number(args, "lam"), p, args.eps)
    return {"command": "kasner classify", "type": args.ktype,
            "inputs": {k.replace("lam", "lambda"): getattr(args, k)
                       for k in ("zeta", "eta", "lam", "lamF2", "tauF2", "p1", "p2", "p")
                       if getattr(args, k) is not None},
            "result": row.to_dict()}


def _interval(text: str) -> tuple:
    parts = str(text).split(":")
    try:
        a, b = float(parts[0]), float(parts[1])
    except (ValueError, IndexError):
        raise ConfigError(f"--interval: expected a:b, got {text!r}") from None
    if len(parts) != 2 or not a < b:
        raise ConfigError(f"--interval: expected a:b with a < b, got {text!r}")
    return (a, b)


def _kasner_solve(args) -> dict:
    interval = _interval(args.interval)
    if args.star:
        fam = solve_star_system(args.sigma, args.nu, args.A, args.sign, interval)
    else:
        fam = solve_phi_sigma_nu(args.sigma, args.nu, args.A, args.B, interval)
    grid = parse_grid(args.grid) if args.grid else None
    pts = resolve_grid(grid, interval, 16)
    return {"command": "kasner solve", "family": fam.to_dict(), "grid": pts, "residuals": fam.residuals(pts)}


def _kasner_roots(args) -> dict:
    terms = family_terms(args.family, args.tauS3, args.tauS2)
    count = constant_solution_count(args.tau, terms, u_max=args.u_max)
    tau1, u1 = threshold_tau(terms)
    variable = "phi" if args.family == "IIIs2" else "u = phi^3"
    return {"command": "kasner roots", "family": args.family, "tau": args.tau,
            "tau_S3": args.tauS3, "tau_S2": args.tauS2 if args.family == "IIIs" else None,
            "variable": variable, "terms": [list(t) for t in terms],
            **count.to_dict(), "threshold_tau": tau1, "threshold_u": u1}


def cmd_kasner(args) -> tuple:
    handler = {"classify": _kasner_classify, "solve": _kasner_solve, "roots": _kasner_roots}
    return handler[args.kasner_command](args), EXIT_OK


# -- entry point ------------------------------------------------------------------

def _dispatch(args) -> int:
    if args.command == "kasner":
        payload, code = cmd_kasner(args)
        emit(payload, args.out, args.format)
        return code
    rc = _run_config(args)
    if args.command == "curvature":
        payload, code = cmd_curvature(rc)
    elif args.command == "einstein":
        payload, code = cmd_einstein(rc, args.lam, _tolerance(args, rc, "einstein", EINSTEIN_TOL))
    else:
        payload, code = cmd_verify(rc, _tolerance(args, rc, "oracle", ORACLE_TOL), args.h, args.expect_lambda)
    emit(payload, rc.out_path, rc.out_format)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except CONFIG_ERRORS as exc:
        sys.stderr.write(f"multiwarp: config error: {exc}\n")
        return EXIT_CONFIG
    except (MultiwarpError, ArithmeticError, ValueError) as exc:
        sys.stderr.write(f"multiwarp: domain error: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        sys.stderr.write(f"multiwarp: output error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
