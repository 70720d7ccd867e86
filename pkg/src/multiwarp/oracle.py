"""Finite-difference curvature of the raw coordinate metric.

This is deliberately independent of the closed forms: the metric of the
multiply warped product is assembled as a matrix in coordinates, Christoffel
symbols come from central differences of ``g`` and the Riemann tensor from
central differences of the Christoffel symbols.  Two step sizes are combined
by Richardson extrapolation, which cancels the ``h^2`` error term.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .curvature import curvature_point
from .errors import NoModelError, SingularMetricError, StepTooLargeError
from .spacetime import FiberModel, WarpedSpacetime

__all__ = [
    "CoordinateChart", "OracleReport", "build_chart", "model_chart", "fd_geometry",
    "fd_curvature", "compare", "reports_to_csv", "DEFAULT_H", "DEFAULT_TOL",
]

DEFAULT_H = 1e-3
DEFAULT_TOL = 1e-6
# steps tried, as fractions of h, when a point does not settle at h
REFINE_FACTORS = (1.0, 1.0 / 3.0, 0.1)
# a step is settled once the extrapolation gap is this fraction of tol
SETTLED = 1e-2

# fiber coordinates used when a point is not given: away from the poles
_S2_POINT = (1.1, 0.3)
_S3_POINT = (1.2, 0.9, 0.4)


def _model_metric(model: FiberModel) -> Callable:
    r2 = model.radius ** 2
    if model.kind == "flat":
        eye = np.eye(model.k)
        return lambda y: eye
    if model.kind == "circle":
        return lambda y: np.array([[r2]])
    if model.kind == "sphere2":
        return lambda y: np.diag([r2, r2 * math.sin(y[0]) ** 2])
    s = lambda y: math.sin(y[0]) ** 2  # noqa: E731
    return lambda y: np.diag([r2, r2 * s(y), r2 * s(y) * math.sin(y[1]) ** 2])


def _model_labels(model: FiberModel, i: int) -> list:
    if model.kind == "flat":
        return [f"x{i}_{j}" for j in range(model.k)]
    if model.kind == "circle":
        return [f"phi{i}"]
    if model.kind == "sphere2":
        return [f"theta{i}", f"phi{i}"]
    return [f"chi{i}", f"theta{i}", f"phi{i}"]


def _model_point(model: FiberModel) -> list:
    if model.kind == "sphere2":
        return list(_S2_POINT)
    if model.kind == "sphere3":
        return list(_S3_POINT)
    return [0.0] * model.dim


@dataclass(frozen=True)
class CoordinateChart:
    """Metric ``x -> g(x)`` in coordinates with a declared signature."""

    dimension: int
    labels: tuple
    metric: Callable = field(repr=False, compare=False)
    signature: tuple = ()
    base_point: tuple = ()
    blocks: tuple = field(default=(), repr=False, compare=False)

    def point(self, t: Optional[float] = None) -> np.ndarray:
        x = np.array(self.base_point, dtype=float)
        if t is not None:
            x[0] = t
        return x

    def check(self, x) -> np.ndarray:
        g = np.asarray(self.metric(x), dtype=float)
        if g.shape != (self.dimension, self.dimension):
            raise SingularMetricError(f"metric has shape {g.shape}, expected {(self.dimension,) * 2}")
        if not np.allclose(g, g.T, rtol=0.0, atol=1e-14 * max(1.0, float(np.abs(g).max()))):
            raise SingularMetricError(f"metric is not symmetric at {list(x)}")
        ev = np.linalg.eigvalsh(g)
        scale = max(1.0, float(np.abs(ev).max()))
        if float(np.abs(ev).min()) <= 1e-13 * scale:
            raise SingularMetricError(f"metric is degenerate at {list(x)}")
        if self.signature:
            neg = int((ev < 0).sum())
            if neg != sum(1 for s in self.signature if s < 0):
                raise SingularMetricError(f"metric signature changed at {list(x)}")
        return g


def build_chart(st: WarpedSpacetime) -> CoordinateChart:
    """``diag(-1, b_1(t)^2 g_F1(y_1), ...)`` in ``(t, y_1, ..., y_m)``."""
    blocks = []
    labels = ["t"]
    point = [0.5 * sum(st.interval) if all(map(math.isfinite, st.interval)) else 1.0]
    offset = 1
    for i, (spec, warp) in enumerate(st.fibers):
        if spec.model is None:
            raise NoModelError(f"fiber[{i}] has no model fiber; the oracle needs one")
        k = spec.model.dim
        blocks.append((offset, k, warp, _model_metric(spec.model), spec))
        labels += _model_labels(spec.model, i)
        point += _model_point(spec.model)
        offset += k
    n = offset

    def metric(x):
        g = np.zeros((n, n))
        g[0, 0] = -1.0
        t = float(x[0])
        for off, k, warp, gf, _ in blocks:
            b = warp.value(t)
            g[off:off + k, off:off + k] = b * b * gf(x[off:off + k])
        return g

    return CoordinateChart(n, tuple(labels), metric, (-1,) + (1,) * (n - 1), tuple(point), tuple(blocks))


def model_chart(model: FiberModel) -> CoordinateChart:
    """Chart of a model fiber on its own (Riemannian)."""
    gf = _model_metric(model)
    k = model.dim
    return CoordinateChart(k, tuple(_model_labels(model, 0)), gf, (1,) * k, tuple(_model_point(model)))


def _christoffel(metric, x, h):
    n = len(x)
    g = np.asarray(metric(x), dtype=float)
    ginv = np.linalg.inv(g)
    dg = np.empty((n, n, n))
    for c in range(n):
        e = np.zeros(n)
        e[c] = h
        dg[c] = (np.asarray(metric(x + e)) - np.asarray(metric(x - e))) / (2.0 * h)
    # Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    lower = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("ad,dbc->abc", ginv, lower)


def _ricci_at(metric, x, h):
    n = len(x)
    gam = _christoffel(metric, x, h)
    dgam = np.empty((n, n, n, n))
    for e_ in range(n):
        e = np.zeros(n)
        e[e_] = h
        dgam[e_] = (_christoffel(metric, x + e, h) - _christoffel(metric, x - e, h)) / (2.0 * h)
    # R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
    riem = (np.einsum("cadb->abcd", dgam) - np.einsum("dacb->abcd", dgam)
            + np.einsum("ace,edb->abcd", gam, gam) - np.einsum("ade,ecb->abcd", gam, gam))
    ric = np.einsum("abad->bd", riem)
    ric = 0.5 * (ric + ric.T)
    ginv = np.linalg.inv(np.asarray(metric(x), dtype=float))
    return ric, float(np.einsum("bd,bd->", ginv, ric))


def fd_geometry(chart: CoordinateChart, x, h: float = DEFAULT_H) -> tuple:
    """Richardson-extrapolated ``(ricci, scalar, disagreement)`` at ``x``.

    The result combines steps ``h`` and ``h/2``.  ``disagreement`` is the
    relative gap to the same extrapolation from ``h/2`` and ``h/4``, an
    estimate of the error left after extrapolation.
    """
    x = np.asarray(x, dtype=float)
    chart.check(x)
    for s in (-1.0, 1.0):
        for c in range(chart.dimension):
            y = x.copy()
            y[c] += s * 2.0 * h
            chart.check(y)
    levels = [_ricci_at(chart.metric, x, h / 2.0 ** j) for j in range(3)]
    (r1, s1), (r2, s2), (r3, s3) = levels
    ric, scal = (4.0 * r2 - r1) / 3.0, (4.0 * s2 - s1) / 3.0
    ric_f, scal_f = (4.0 * r3 - r2) / 3.0, (4.0 * s3 - s2) / 3.0
    scale = max(1.0, float(np.abs(ric).max()), abs(scal))
    disagreement = max(float(np.abs(ric_f - ric).max()), abs(scal_f - scal)) / scale
    return ric, scal, disagreement


@dataclass
class OracleReport:
    point: list
    ricci_matrix: list
    scalar: float
    comparisons: list
    tolerance: float
    step_disagreement: float = 0.0
    step: float = DEFAULT_H

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.comparisons)

    def to_dict(self) -> dict:
        return {"point": self.point, "ricci_matrix": self.ricci_matrix, "scalar": self.scalar,
                "comparisons": self.comparisons, "tolerance": self.tolerance,
                "step_disagreement": self.step_disagreement, "step": self.step, "passed": self.passed}


def fd_curvature(chart: CoordinateChart, point, h: float = DEFAULT_H,
                 tol: float = DEFAULT_TOL, refine: bool = False) -> OracleReport:
    """Oracle curvature at ``point``.

    With ``refine`` the steps ``h * REFINE_FACTORS`` are tried in turn until
    one settles; the step with the smallest extrapolation gap is kept.
    """
    best = None
    for f in (REFINE_FACTORS if refine else (1.0,)):
        ric, scal, dis = fd_geometry(chart, point, h * f)
        if best is None or dis < best[2]:
            best = (ric, scal, dis, h * f)
        if dis <= SETTLED * tol:
            break
    ric, scal, dis, step = best
    if dis > 10.0 * tol:
        raise StepTooLargeError(
            f"extrapolation at h={step:g} is unsettled by {dis:.3e} (relative), above 10 x {tol:.1e}")
    return OracleReport(point=[float(v) for v in np.asarray(point, dtype=float)],
                        ricci_matrix=ric.tolist(), scalar=scal, comparisons=[],
                        tolerance=float("nan"), step_disagreement=dis, step=step)


def _entry(name, closed, oracle, tol):
    diff = abs(closed - oracle)
    rel = diff / max(1.0, abs(closed))
    return {"quantity": name, "closed_form": float(closed), "oracle": float(oracle),
            "abs_diff": float(diff), "rel_diff": float(rel), "passed": bool(rel <= tol)}


def compare(st: WarpedSpacetime, grid: Sequence[float], h: float = DEFAULT_H,
            tol: float = DEFAULT_TOL, expect_lambda: Optional[float] = None) -> list:
    """Closed-form vs finite-difference ``tau``, ``Ric(dt, dt)`` and fiber coefficients.

    With ``expect_lambda`` the oracle Ricci tensor is also checked against
    ``expect_lambda * g``, which catches a geometry that is computed
    consistently on both paths but is not the intended solution.
    """
    chart = build_chart(st)
    t1, t2 = st.interval
    out = []
    for t in grid:
        t = float(t)
        x = chart.point(t)
        # the stencil reaches 2h; keep it a small fraction of the distance to the ends
        h_t = min(h, (t - t1) / 8.0, (t2 - t) / 8.0)
        rep = fd_curvature(chart, x, h_t, tol, refine=True)
        ric = np.asarray(rep.ricci_matrix)
        cp = curvature_point(st, t)
        comps = [_entry("tau", cp.tau_form1, rep.scalar, tol),
                 _entry("ricci_tt", cp.ricci_tt, ric[0, 0], tol)]
        coeffs = cp.ricci_fiber_coeff
        for i, (off, k, _, gf, spec) in enumerate(chart.blocks):
            gfv = np.asarray(gf(x[off:off + k]))
            lam_f = spec.model.einstein_lambda
            for j in range(k):
                # Ric_jj = Ric_F(d_j, d_j) + coeff_i g_F(d_j, d_j) with Ric_F = lam_F g_F
                oracle_coeff = (ric[off + j, off + j] - lam_f * gfv[j, j]) / gfv[j, j]
                comps.append(_entry(f"ricci_fiber_coeff_{i}[{chart.labels[off + j]}]",
                                    coeffs[i], oracle_coeff, tol))
        if expect_lambda is not None:
            g = chart.metric(x)
            comps.append(_entry("einstein_tt", -expect_lambda, ric[0, 0], tol))
            for i, (off, k, _, _, _) in enumerate(chart.blocks):
                ratio = max((ric[off + j, off + j] / g[off + j, off + j] for j in range(k)),
                            key=lambda v: abs(v - expect_lambda))
                comps.append(_entry(f"einstein_fiber_{i}", expect_lambda, ratio, tol))
        off_diag = ric - np.diag(np.diag(ric))
        comps.append(_entry("ricci_offdiag_max", 0.0, float(np.abs(off_diag).max()), tol))
        rep.comparisons = comps
        rep.tolerance = tol
        out.append(rep)
    return out


def reports_to_csv(reports: Sequence[OracleReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "quantity", "closed_form", "oracle", "abs_diff", "rel_diff", "passed"])
    for rep in reports:
        for c in rep.comparisons:
            w.writerow([repr(rep.point[0]), c["quantity"], repr(c["closed_form"]), repr(c["oracle"]),
                        repr(c["abs_diff"]), repr(c["rel_diff"]), int(c["passed"])])
    return buf.getvalue()
