"""Candidate Riemannian submersions M^3 -> N^2: frames and integrability data.

Frames are built by lifting a base orthonormal frame horizontally and taking
the unit vertical vector, so they are adapted by construction.  The vertical
vector is oriented so that (e1, e2, e3) is positively oriented in the chart,
which fixes the sign of sigma and f3 deterministically.

Evaluating the projection needs one jet order more than everything else
(the frame depends on d(pi)); frame closures therefore re-seed the chart
coordinates at ``order + 1`` and expect raw coordinate lifts as input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import geometry as geo
from .errors import InvalidSubmersion, RankDeficient, StructureViolation
from .geometry import ChartDomain, MetricField, as_coords, cached, values
from .jets import Jet, relift, sqrt


@dataclass(frozen=True, eq=False)
class SubmersionSpec:
    """pi = (pi1, pi2): (M, g) -> (N, h) with an h-orthonormal base frame (eta1, eta2).

    ``projection`` maps coordinate jets of M to the two component jets;
    ``base_frame`` fields are evaluated on base-coordinate jets.
    """

    name: str
    projection: Callable[[tuple], tuple]
    metric: MetricField
    base_metric: MetricField
    base_frame: tuple
    domain: ChartDomain
    params: dict = field(default_factory=dict)
    _local: Callable = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_local", cached(self._local_frame))

    def _local_frame(self, coords) -> dict:
        order = coords[0].order
        hi = relift(coords, order + 1)
        P = self.projection(hi)
        J = tuple(tuple(geo._d(P[a], i) for i in range(3)) for a in range(2))
        base_pt = tuple(
            P[a].truncate(order) if isinstance(P[a], Jet) else P[a] for a in range(2)
        )
        G, Ginv = self.metric(coords), self.metric.inverse(coords)

        r1, r2 = J
        n = (
            r1[1] * r2[2] - r1[2] * r2[1],
            r1[2] * r2[0] - r1[0] * r2[2],
            r1[0] * r2[1] - r1[1] * r2[0],
        )
        nn = geo.dot(G, n, n)
        nn_val = np.asarray(values(nn))
        if np.any(nn_val < 1e-24):
            raise RankDeficient("d(pi) has rank < 2 at a sample point")

        # raised gradients span the horizontal space
        grads = [geo.matvec(Ginv, J[a]) for a in range(2)]
        A = tuple(tuple(geo.dot(G, grads[a], grads[b]) for b in range(2)) for a in range(2))
        Ainv = geo.inverse(A)
        etas = [eta(base_pt) for eta in self.base_frame]

        def lift(w):
            coef = geo.matvec(Ainv, w)
            return tuple(geo._sum(geo._mul(coef[a], grads[a][k]) for a in range(2)) for k in range(3))

        e1, e2 = lift(etas[0]), lift(etas[1])

        # det(J [e1 e2]) = det[eta1 eta2] in base coordinates, so this sign
        # makes (e1, e2, e3) positively oriented in the chart
        eta_det = values(etas[0][0]) * values(etas[1][1]) - values(etas[0][1]) * values(etas[1][0])
        sgn = np.sign(eta_det)
        inv_norm = 1 / sqrt(nn) if isinstance(nn, Jet) else 1 / np.sqrt(nn)
        e3 = tuple(geo._mul(sgn * inv_norm, n[k]) for k in range(3))
        return {"J": J, "base_point": base_pt, "etas": etas, "frame": (e1, e2, e3), "grads": grads}


@dataclass(frozen=True, eq=False)
class FrameTriple:
    e1: Callable
    e2: Callable
    e3: Callable
    flag: str = "adapted"

    def __iter__(self):
        return iter((self.e1, self.e2, self.e3))

    def __getitem__(self, i):
        return (self.e1, self.e2, self.e3)[i]


@dataclass(frozen=True, eq=False)
class IntegrabilityData:
    """f1, f2, f3, kappa1, kappa2, sigma of a frame with vertical e3, as scalar fields.

    With f3 = 0 these are the (h1, h2, tau1, tau2, sigma) of an adapted frame.
    """

    frame: FrameTriple
    metric: MetricField
    _eval: Callable = field(init=False, repr=False)

    NAMES = ("f1", "f2", "f3", "kappa1", "kappa2", "sigma")

    def __post_init__(self):
        object.__setattr__(self, "_eval", cached(self._compute))
        for name in self.NAMES:
            object.__setattr__(self, name, (lambda c, n=name: self._eval(c)[n]))

    def _compute(self, c) -> dict:
        G = self.metric(c)
        e1, e2, e3 = (e(c) for e in self.frame)
        b12, b13, b23 = geo.bracket(e1, e2), geo.bracket(e1, e3), geo.bracket(e2, e3)
        f3 = geo.dot(G, b13, e2)
        return {
            "f1": geo.dot(G, b12, e1),
            "f2": geo.dot(G, b12, e2),
            "sigma": -0.5 * geo.dot(G, b12, e3),
            "f3": f3,
            "kappa1": geo.dot(G, b13, e3),
            "kappa2": geo.dot(G, b23, e3),
            # these vanish for the bracket structure of a Riemannian submersion
            "_s13_1": geo.dot(G, b13, e1),
            "_s23_2": geo.dot(G, b23, e2),
            "_s23_1": geo.dot(G, b23, e1) + f3,
        }

    def at(self, p) -> dict:
        c = as_coords(p)
        d = self._eval(c)
        return {n: values(d[n], c[0].batch_shape) for n in self.NAMES}

    def structure_residual(self, p) -> float:
        c = as_coords(p)
        d = self._eval(c)
        return float(max(np.max(np.abs(values(d[k], c[0].batch_shape)))
                         for k in ("_s13_1", "_s23_2", "_s23_1")))

    def check_structure(self, p, tol: float = 1e-8) -> float:
        r = self.structure_residual(p)
        if r > tol:
            raise StructureViolation(f"frame brackets not of the expected form (residual {r:.3e})")
        return r


def integrability_data(frame: FrameTriple, g: MetricField, check_at=None, tol: float = 1e-8) -> IntegrabilityData:
    data = IntegrabilityData(frame, g)
    if check_at is not None:
        data.check_structure(check_at, tol)
    return data


def differential(spec: SubmersionSpec, p) -> np.ndarray:
    """d(pi) at p as a (..., 2, 3) array."""
    c = as_coords(p, 1)
    spec.domain.check(np.atleast_2d(geo_point(c)))
    J = spec._local(c)["J"]
    b = c[0].batch_shape
    return np.stack([np.stack([values(J[a][i], b) for i in range(3)], -1) for a in range(2)], -2)


def geo_point(c) -> np.ndarray:
    return np.stack([np.asarray(values(x)) for x in c], -1)


def vertical_direction(spec: SubmersionSpec, p) -> np.ndarray:
    c = as_coords(p, 1)
    e3 = spec._local(c)["frame"][2]
    return geo._vec_values(e3, c)


def build_frame(spec: SubmersionSpec) -> FrameTriple:
    local = spec._local
    return FrameTriple(*((lambda c, i=i: local(c)["frame"][i]) for i in range(3)))


def rotate_frame(frame: FrameTriple, angle: Callable) -> FrameTriple:
    """(cos t e1 + sin t e2, -sin t e1 + cos t e2, e3) for an angle field t."""
    from .jets import cos, sin

    @cached
    def rotated(c):
        t = angle(c)
        ct, st = cos(t), sin(t)
        e1, e2 = frame.e1(c), frame.e2(c)
        return (
            tuple(ct * a + st * b for a, b in zip(e1, e2)),
            tuple(-st * a + ct * b for a, b in zip(e1, e2)),
        )

    return FrameTriple(lambda c: rotated(c)[0], lambda c: rotated(c)[1], frame.e3, flag="natural")


def _base_values(spec: SubmersionSpec, c):
    local = spec._local(c)
    b = c[0].batch_shape
    base = np.stack([np.asarray(values(x, b)) for x in local["base_point"]], -1)
    eta = np.stack([np.stack([values(local["etas"][i][a], b) for a in range(2)], -1) for i in range(2)], -1)
    return base, eta  # eta[..., a, i]: component a of eta_i


def is_riemannian_submersion(spec: SubmersionSpec, p, tol: float = 1e-9) -> tuple[bool, float]:
    """Compare h(d(pi)X, d(pi)Y) with g(X, Y) on a g-orthonormal horizontal basis."""
    c = as_coords(p, 1)
    J = differential(spec, c)
    Jb = J.reshape((-1, 2, 3))
    sv = np.linalg.svd(Jb, compute_uv=False)
    if np.any(sv[:, -1] < 1e-12):
        raise RankDeficient("d(pi) has rank < 2 at a sample point")
    G = spec.metric.matrix(c).reshape((-1, 3, 3))
    base, _ = _base_values(spec, c)
    H = spec.base_metric.matrix(base).reshape((-1, 2, 2))
    V = np.linalg.solve(G, np.swapaxes(Jb, -1, -2))  # raised gradients as columns
    M = np.swapaxes(V, -1, -2) @ G @ V
    L = np.linalg.cholesky(M)
    W = np.swapaxes(np.linalg.solve(L, np.swapaxes(V, -1, -2)), -1, -2)
    JW = Jb @ W
    dev = float(np.max(np.abs(np.swapaxes(JW, -1, -2) @ H @ JW - np.eye(2))))
    return dev <= tol, dev


def require_riemannian(spec: SubmersionSpec, points, tol: float = 1e-9) -> float:
    ok, dev = is_riemannian_submersion(spec, points, tol)
    if not ok:
        raise InvalidSubmersion(f"{spec.name}: not a Riemannian submersion (deviation {dev:.3e})", dev)
    return dev


def tension(spec: SubmersionSpec, frame: FrameTriple, p) -> tuple[np.ndarray, np.ndarray]:
    """tau(pi) = -d(pi)(nabla_{e3} e3) in the base frame, and its norm."""
    c = as_coords(p)
    v = geo.levi_civita(spec.metric, frame.e3, frame.e3, c)
    J = differential(spec, c)
    _, eta = _base_values(spec, c)
    tau = -np.linalg.solve(eta, (J @ v[..., None]))[..., 0]
    return tau, np.linalg.norm(tau, axis=-1)


@lru_cache(maxsize=256)
def gauss_curvature_field(data: IntegrabilityData, include_f3: bool = True) -> Callable:
    """K^N = e1(f2) - e2(f1) - f1^2 - f2^2 (+ 2 f3 sigma), as a scalar field on M.

    ``include_f3=False`` gives the adapted-frame form.
    """
    fr = data.frame
    d1f2 = geo.derivative_field(fr.e1, data.f2)
    d2f1 = geo.derivative_field(fr.e2, data.f1)

    @cached
    def K(c):
        f1, f2 = data.f1(c), data.f2(c)
        out = d1f2(c) - d2f1(c) - f1 * f1 - f2 * f2
        if include_f3:
            out = out + 2 * data.f3(c) * data.sigma(c)
        return out
    return K


def base_gauss_curvature(data: IntegrabilityData, frame: FrameTriple, p):
    c = as_coords(p)
    return values(gauss_curvature_field(data)(c), c[0].batch_shape)


def base_curvature_direct(spec: SubmersionSpec, p):
    """Gauss curvature of (N, h) at pi(p), computed from h alone."""
    c = as_coords(p, 1)
    base, _ = _base_values(spec, c)
    eta1, eta2 = spec.base_frame
    return geo.curvature_scalar(spec.base_metric, eta1, eta2, eta1, eta2, base)
