"""The two-parameter BCV family of homogeneous 3-metrics and its closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import ChartDomain, MetricField, cached

EQ_TOL = 1e-12


class ModelName(str, Enum):
    EUCLIDEAN3 = "Euclidean3"
    SPHERE3 = "Sphere3"
    S2XR = "S2xR"
    H2XR = "H2xR"
    SL2R = "SL2R~"
    NIL = "Nil"
    SU2 = "SU2"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BCVParams:
    m: float
    l: float

    @property
    def R_scalar(self) -> float:
        return 4 * self.m - self.l**2

    def F(self, x, y):
        return 1 + self.m * (x * x + y * y)

    @property
    def domain(self) -> ChartDomain:
        if self.m >= 0:
            return ChartDomain("R^3", (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0))
        # stay inside x^2 + y^2 <= -0.9/m, away from the circle where F vanishes
        r = min(1.0, math.sqrt(-0.9 / self.m))
        m = self.m
        return ChartDomain(
            f"x^2+y^2 < {-0.9 / m:g}",
            (-r, -r, -1.0),
            (r, r, 1.0),
            (lambda P: 0.9 / (-m) - (P[:, 0] ** 2 + P[:, 1] ** 2),),
        )

    @property
    def model(self) -> ModelName:
        return classify_bcv(self)


def classify_bcv(params: BCVParams) -> ModelName:
    m, l = params.m, params.l
    zero_m, zero_l = abs(m) <= EQ_TOL, abs(l) <= EQ_TOL
    if zero_m and zero_l:
        return ModelName.EUCLIDEAN3
    if abs(4 * m - l * l) <= EQ_TOL:
        return ModelName.SPHERE3
    if zero_l:
        return ModelName.S2XR if m > 0 else ModelName.H2XR
    if zero_m:
        return ModelName.NIL
    return ModelName.SL2R if m < 0 else ModelName.SU2


def bcv_metric(params: BCVParams) -> MetricField:
    m, l = params.m, params.l

    def comps(c):
        x, y = c[0], c[1]
        F = 1 + m * (x * x + y * y)
        inv = 1 / F
        w = (l / 2) * inv
        conf = inv * inv
        return (
            (conf + w * w * y * y, -(w * w) * x * y, w * y),
            (-(w * w) * x * y, conf + w * w * x * x, -w * x),
            (w * y, -w * x, 1.0),
        )

    return MetricField(comps, 3, params.domain, f"BCV(m={m:g}, l={l:g})")


def bcv_frame(params: BCVParams) -> tuple:
    """The global orthonormal frame (E1, E2, E3) as coordinate vector fields."""
    m, l = params.m, params.l

    @cached
    def frame(c):
        x, y = c[0], c[1]
        F = 1 + m * (x * x + y * y)
        return (F, 0.0, -(l / 2) * y), (0.0, F, (l / 2) * x), (0.0, 0.0, 1.0)

    return tuple((lambda c, i=i: frame(c)[i]) for i in range(3))


def bcv_connection_coefficients(params: BCVParams, i: int, j: int, points) -> np.ndarray:
    """Closed-form E-basis coefficients of nabla_{E_i} E_j (1-based), shape (..., 3)."""
    m, l = params.m, params.l
    P = np.asarray(points, dtype=float)
    x, y = P[..., 0], P[..., 1]
    zero = np.zeros_like(x)
    table = {
        (1, 1): (zero, 2 * m * y, zero),
        (2, 2): (2 * m * x, zero, zero),
        (1, 2): (-2 * m * y, zero, zero + l / 2),
        (2, 1): (zero, -2 * m * x, zero - l / 2),
        (3, 1): (zero, zero - l / 2, zero),
        (1, 3): (zero, zero - l / 2, zero),
        (3, 2): (zero + l / 2, zero, zero),
        (2, 3): (zero + l / 2, zero, zero),
    }
    return np.stack(table.get((i, j), (zero, zero, zero)), axis=-1)


def frame_to_coordinates(params: BCVParams, coeffs, points) -> np.ndarray:
    """Convert E-basis coefficients at ``points`` to coordinate components."""
    m, l = params.m, params.l
    P = np.asarray(points, dtype=float)
    x, y = P[..., 0], P[..., 1]
    a, b, c = coeffs[..., 0], coeffs[..., 1], coeffs[..., 2]
    F = 1 + m * (x * x + y * y)
    return np.stack([a * F, b * F, -a * l * y / 2 + b * l * x / 2 + c], axis=-1)


def bcv_connection_oracle(params: BCVParams, i: int, j: int):
    """nabla_{E_i} E_j as a closed-form function ``points -> coordinate components``."""
    def field(points):
        return frame_to_coordinates(params, bcv_connection_coefficients(params, i, j, points), points)
    return field


def bcv_curvature_oracle(params: BCVParams, idx) -> float:
    """R_ijkl = g(R(E_k, E_l) E_j, E_i) from the closed-form table (1-based indices)."""
    i, j, k, l_ = idx
    if i == j or k == l_:
        return 0.0
    sign = 1.0
    if i > j:
        i, j, sign = j, i, -sign
    if k > l_:
        k, l_, sign = l_, k, -sign
    if (i, j) != (k, l_):
        return 0.0
    if (i, j) == (1, 2):
        return sign * (4 * params.m - 3 * params.l**2 / 4)
    return sign * params.l**2 / 4
