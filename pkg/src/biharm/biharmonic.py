"""Pointwise biharmonicity test for submersions with one-dimensional fibres.

For an adapted frame with data (f1, f2, kappa1, kappa2, sigma) the map is
biharmonic iff both

    r1 = -Lap k1 - 2 sum f_i e_i(k2) - k2 sum (e_i(f_i) - k_i f_i) + k1 (-K + sum f_i^2)
    r2 = -Lap k2 + 2 sum f_i e_i(k1) + k1 sum (e_i(f_i) - k_i f_i) + k2 (-K + sum f_i^2)

vanish (sums over i = 1, 2; K the base Gauss curvature pulled back to M).
Verdicts are certificates over a finite sample, never proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import geometry as geo
from .catalog import HARMONIC, INCONCLUSIVE, NOT_BIHARMONIC, PROPER
from .errors import NotAdapted
from .geometry import as_coords, cached, derivative_field, laplacian_field, riemann_component, values
from .submersion import (
    FrameTriple,
    IntegrabilityData,
    SubmersionSpec,
    base_curvature_direct,
    build_frame,
    gauss_curvature_field,
    integrability_data,
    require_riemannian,
    tension,
)

SCHEMA_VERSION = 1
ADAPTED_TOL = 1e-8


@dataclass(frozen=True)
class Tolerances:
    tol_h: float = 1e-7
    tol_b: float = 1e-6
    factor: float = 10.0
    tol_riemannian: float = 1e-9

    def __post_init__(self):
        if min(self.tol_h, self.tol_b, self.factor, self.tol_riemannian) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class SamplePlan:
    n_points: int = 50
    seed: int = 0
    margin: float = 1e-3

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("sample count must be >= 1")

    def points(self, spec: SubmersionSpec) -> np.ndarray:
        return spec.domain.sample(self.n_points, self.seed, self.margin)


def _batch(c):
    return c[0].batch_shape


@lru_cache(maxsize=256)
def _residual_fields(g, frame: FrameTriple, data: IntegrabilityData):
    e1, e2, _ = frame
    lap1 = laplacian_field(g, tuple(frame), data.kappa1)
    lap2 = laplacian_field(g, tuple(frame), data.kappa2)
    K = gauss_curvature_field(data, include_f3=False)
    d = {
        (i, name): derivative_field(e, getattr(data, name))
        for i, e in ((1, e1), (2, e2))
        for name in ("f1", "f2", "kappa1", "kappa2")
    }

    @cached
    def residuals(c):
        f1, f2 = data.f1(c), data.f2(c)
        k1, k2 = data.kappa1(c), data.kappa2(c)
        S = d[1, "f1"](c) + d[2, "f2"](c) - k1 * f1 - k2 * f2
        Q = -K(c) + f1 * f1 + f2 * f2
        r1 = -lap1(c) - 2 * (f1 * d[1, "kappa2"](c) + f2 * d[2, "kappa2"](c)) - k2 * S + k1 * Q
        r2 = -lap2(c) + 2 * (f1 * d[1, "kappa1"](c) + f2 * d[2, "kappa1"](c)) + k1 * S + k2 * Q
        return r1, r2

    return residuals


def biharmonic_residual(spec: SubmersionSpec, frame: FrameTriple, data: IntegrabilityData, p):
    c = as_coords(p)
    f3 = np.max(np.abs(values(data.f3(c), _batch(c))))
    if f3 > ADAPTED_TOL:
        raise NotAdapted(f"frame is not adapted (|f3| = {f3:.3e})")
    r1, r2 = _residual_fields(spec.metric, frame, data)(c)
    return values(r1, _batch(c)), values(r2, _batch(c))


def _e(frame, i):
    return frame[i - 1]


def jacobi_residuals(frame: FrameTriple, data: IntegrabilityData, g, p) -> list:
    c = as_coords(p)
    e1, e2, e3 = frame
    D = lambda e, u: derivative_field(e, u)(c)  # noqa: E731
    f1, f2, f3 = data.f1(c), data.f2(c), data.f3(c)
    k1, k2 = data.kappa1(c), data.kappa2(c)
    out = [
        D(e3, data.f1) + (k1 + f2) * f3 - D(e1, data.f3),
        D(e3, data.f2) + (k2 - f1) * f3 - D(e2, data.f3),
        2 * D(e3, data.sigma) + k1 * f1 + k2 * f2 + D(e2, data.kappa1) - D(e1, data.kappa2),
    ]
    return [values(r, _batch(c)) for r in out]


RC_LINES = ((1, 3, 1, 2), (1, 3, 1, 3), (1, 3, 2, 3), (1, 2, 1, 2), (1, 2, 2, 3), (2, 3, 1, 3), (2, 3, 2, 3))


def rc_predicted(frame: FrameTriple, data: IntegrabilityData, p) -> list:
    """Curvature components as predicted from the integrability data, in RC_LINES order."""
    c = as_coords(p)
    e1, e2, e3 = frame
    D = lambda e, u: derivative_field(e, u)(c)  # noqa: E731
    f1, f2, f3 = data.f1(c), data.f2(c), data.f3(c)
    k1, k2, s = data.kappa1(c), data.kappa2(c), data.sigma(c)
    out = [
        -D(e1, data.sigma) + 2 * k1 * s,
        D(e1, data.kappa1) + s * s - k1 * k1 + k2 * f1,
        D(e1, data.kappa2) - D(e3, data.sigma) - k1 * f1 - k1 * k2,
        D(e1, data.f2) - D(e2, data.f1) - f1 * f1 - f2 * f2 + 2 * f3 * s - 3 * s * s,
        -D(e2, data.sigma) + 2 * k2 * s,
        D(e2, data.kappa1) + D(e3, data.sigma) + k2 * f2 - k1 * k2,
        s * s + D(e2, data.kappa2) - k1 * f2 - k2 * k2,
    ]
    return [values(r, _batch(c)) for r in out]


def rc_residuals(frame: FrameTriple, data: IntegrabilityData, g, p) -> list:
    c = as_coords(p)
    pred = rc_predicted(frame, data, c)
    return [pr - riemann_component(g, tuple(frame), *idx, c) for pr, idx in zip(pred, RC_LINES)]


def fiber_constancy_residual(frame: FrameTriple, data: IntegrabilityData, p):
    """e3(K^N), which vanishes because K^N is pulled back from the base."""
    c = as_coords(p)
    return values(derivative_field(frame.e3, gauss_curvature_field(data))(c), _batch(c))


# -- reports -------------------------------------------------------------------


@dataclass
class BiharmonicReport:
    entry: str
    params: dict
    points: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    tension: np.ndarray
    K_N: np.ndarray
    jac: np.ndarray  # (n, 3)
    rc: np.ndarray  # (n, 7)
    fiber: np.ndarray
    f3: np.ndarray
    tolerances: Tolerances = field(default_factory=Tolerances)
    expected_verdict: str | None = None

    @property
    def residual(self) -> np.ndarray:
        return np.maximum(np.abs(self.r1), np.abs(self.r2))

    @property
    def verdict(self) -> str:
        t = self.tolerances
        max_tension = float(np.max(self.tension))
        max_r = float(np.max(self.residual))
        if max_tension < t.tol_h:
            return HARMONIC
        if max_r < t.tol_b:
            return PROPER
        if max_r >= t.factor * t.tol_b:
            return NOT_BIHARMONIC
        return INCONCLUSIVE

    def aggregate(self) -> dict:
        res = self.residual
        return {
            "n_points": int(len(self.points)),
            "max_r1": float(np.max(np.abs(self.r1))),
            "max_r2": float(np.max(np.abs(self.r2))),
            "max_residual": float(np.max(res)),
            "median_residual": float(np.median(res)),
            "max_tension": float(np.max(self.tension)),
            "min_tension": float(np.min(self.tension)),
            "max_jacobi": float(np.max(np.abs(self.jac))),
            "max_rc": float(np.max(np.abs(self.rc))),
            "max_fiber_constancy": float(np.max(np.abs(self.fiber))),
            "max_abs_f3": float(np.max(np.abs(self.f3))),
            "tol_h": self.tolerances.tol_h,
            "tol_b": self.tolerances.tol_b,
            "verdict": self.verdict,
        }

    def to_dict(self) -> dict:
        pts = []
        for i in range(len(self.points)):
            pts.append({
                "p": [float(v) for v in self.points[i]],
                "r1": float(self.r1[i]),
                "r2": float(self.r2[i]),
                "tension": float(self.tension[i]),
                "K_N": float(self.K_N[i]),
                "jac": [float(v) for v in self.jac[i]],
                "rc": [float(v) for v in self.rc[i]],
                "fiber": float(self.fiber[i]),
            })
        out = {
            "schema_version": SCHEMA_VERSION,
            "entry": self.entry,
            "params": dict(self.params),
            "points": pts,
            "aggregate": self.aggregate(),
        }
        if self.expected_verdict is not None:
            out["expected_verdict"] = self.expected_verdict
        return out

    CSV_HEADER = ("x", "y", "z", "r1", "r2", "tension", "K_N",
                  *(f"jac{i}" for i in range(1, 4)), *(f"rc{i}" for i in range(1, 8)), "fiber")

    def csv_rows(self):
        for i in range(len(self.points)):
            yield (*self.points[i], self.r1[i], self.r2[i], self.tension[i], self.K_N[i],
                   *self.jac[i], *self.rc[i], self.fiber[i])


def analyse(spec: SubmersionSpec, points, frame: FrameTriple | None = None,
            tolerances: Tolerances = Tolerances(), entry: str | None = None,
            expected_verdict: str | None = None) -> BiharmonicReport:
    """Evaluate every per-point quantity of a report at explicit points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    spec.domain.check(points)
    require_riemannian(spec, points, tolerances.tol_riemannian)
    frame = frame or build_frame(spec)
    g = spec.metric
    c = as_coords(points)
    data = integrability_data(frame, g, check_at=c)
    r1, r2 = biharmonic_residual(spec, frame, data, c)
    _, tn = tension(spec, frame, c)
    return BiharmonicReport(
        entry=entry or spec.name,
        params=dict(spec.params),
        points=points,
        r1=np.asarray(r1),
        r2=np.asarray(r2),
        tension=np.asarray(tn),
        K_N=np.asarray(values(gauss_curvature_field(data, include_f3=False)(c), _batch(c))),
        jac=np.stack(jacobi_residuals(frame, data, g, c), -1),
        rc=np.stack(rc_residuals(frame, data, g, c), -1),
        fiber=np.asarray(fiber_constancy_residual(frame, data, c)),
        f3=np.asarray(values(data.f3(c), _batch(c))),
        tolerances=tolerances,
        expected_verdict=expected_verdict,
    )


def classify_map(spec: SubmersionSpec, sample_plan: SamplePlan = SamplePlan(),
                 tolerances: Tolerances = Tolerances(), frame: FrameTriple | None = None,
                 entry: str | None = None, expected_verdict: str | None = None) -> BiharmonicReport:
    return analyse(spec, sample_plan.points(spec), frame, tolerances, entry, expected_verdict)


def base_curvature_mismatch(spec: SubmersionSpec, p) -> float:
    """max |K^N from the data - K^N computed from h directly| (both at pi(p))."""
    c = as_coords(p)
    data = integrability_data(build_frame(spec), spec.metric)
    K = values(gauss_curvature_field(data, include_f3=False)(c), _batch(c))
    return float(np.max(np.abs(K - base_curvature_direct(spec, c))))
