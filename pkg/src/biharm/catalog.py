"""Named submersions with closed-form integrability data and expected verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .bcv import BCVParams, ModelName, bcv_metric, classify_bcv
from .geometry import ChartDomain, MetricField, euclidean, whole_space
from .submersion import SubmersionSpec

HARMONIC = "harmonic"
PROPER = "proper_biharmonic_candidate"
NOT_BIHARMONIC = "not_biharmonic"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    params: dict
    spec: SubmersionSpec
    oracle: Callable[[np.ndarray], dict]
    expected_verdict: str
    model: ModelName
    param_ranges: dict = field(default_factory=dict)


def _zeros(points):
    return np.zeros(np.asarray(points).shape[:-1])


def _oracle(**consts_or_fns):
    """Oracle from constants or ``points -> array`` callables; unnamed data are 0."""
    def oracle(points):
        P = np.asarray(points, dtype=float)
        out = {}
        for name in ("f1", "f2", "f3", "kappa1", "kappa2", "sigma"):
            v = consts_or_fns.get(name, 0.0)
            out[name] = v(P) if callable(v) else _zeros(P) + v
        return out
    return oracle


def _const_field(*comps):
    return lambda c: comps


def pr1_family(a: float, b: float) -> CatalogEntry:
    """H^2 x R (b = 0) or universal cover of SL(2,R) (b != 0) projected onto (y, z)."""
    if a <= 0:
        raise ValueError("a must be positive")
    s = math.sqrt(1 + b * b)

    def g(c):
        y = c[1]
        iy = 1 / y
        return (
            (a * a * (1 + b * b) * iy * iy, 0.0, b * a * iy),
            (0.0, a * a * iy * iy, 0.0),
            (b * a * iy, 0.0, 1.0),
        )

    def h(c):
        iu = 1 / c[0]
        return ((a * a * iu * iu, 0.0), (0.0, 1 / (1 + b * b)))

    half = ChartDomain("y > 0", (0.0, 0.0), (2.0, 2.0), (lambda P: P[:, 0],))
    domain = ChartDomain("y > 0", (-1.0, 0.25, -1.0), (1.0, 2.0, 1.0), (lambda P: P[:, 1],))
    spec = SubmersionSpec(
        name="pr1",
        projection=lambda c: (c[1], c[2]),
        metric=MetricField(g, 3, domain, "pr1"),
        base_metric=MetricField(h, 2, half, "pr1-base"),
        base_frame=(lambda c: (c[0] / a, 0.0), _const_field(0.0, s)),
        domain=domain,
        params={"a": a, "b": b},
    )
    return CatalogEntry(
        "pr1", {"a": a, "b": b}, spec,
        _oracle(kappa1=1 / a, sigma=b / (2 * a)),
        PROPER,
        classify_bcv(BCVParams(-1 / (4 * a * a), b / a)),
        {"a": (0.5, 1.0, 2.0), "b": (0.0, 1.0, 3.0)},
    )


def h2r_exp_family(m: float) -> CatalogEntry:
    """H^2(4m) x R with metric exp(2 sqrt(-4m) y) dx^2 + dy^2 + dz^2, projected onto (y, z)."""
    if m >= 0:
        raise ValueError("m must be negative")
    c0 = math.sqrt(-4 * m)

    def g(c):
        return ((jets.exp(2 * c0 * c[1]), 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))

    domain = whole_space(3)
    spec = SubmersionSpec(
        name="h2r-exp",
        projection=lambda c: (c[1], c[2]),
        metric=MetricField(g, 3, domain, "h2r-exp"),
        base_metric=euclidean(2),
        base_frame=(_const_field(1.0, 0.0), _const_field(0.0, 1.0)),
        domain=domain,
        params={"m": m},
    )
    return CatalogEntry(
        "h2r-exp", {"m": m}, spec, _oracle(kappa1=-c0), PROPER, ModelName.H2XR,
        {"m": (-1.0, -0.25, -0.01)},
    )


def nil_example() -> CatalogEntry:
    """Nil -> (R^2, dx^2 + dt^2 / (1 + x^2)), (x, y, z) -> (x, z + x y / 2)."""
    base_domain = ChartDomain("R^2", (-2.0, -1.0), (2.0, 1.0))
    domain = ChartDomain("R^3", (-2.0, -1.0, -1.0), (2.0, 1.0, 1.0))
    spec = SubmersionSpec(
        name="nil",
        projection=lambda c: (c[0], c[2] + c[0] * c[1] / 2),
        metric=bcv_metric(BCVParams(0.0, 1.0)),
        base_metric=MetricField(lambda c: ((1.0, 0.0), (0.0, 1 / (1 + c[0] * c[0]))), 2, base_domain, "nil-base"),
        base_frame=(_const_field(1.0, 0.0), lambda c: (0.0, -jets.sqrt(1 + c[0] * c[0]))),
        domain=domain,
    )

    def f2(P):
        x = P[..., 0]
        return x / (1 + x * x)

    def sigma(P):
        x = P[..., 0]
        return (1 - x * x) / (2 * (1 + x * x))

    return CatalogEntry(
        "nil", {}, spec,
        _oracle(f2=f2, kappa1=lambda P: -f2(P), sigma=sigma),
        NOT_BIHARMONIC, ModelName.NIL,
    )


def flat_projection() -> CatalogEntry:
    domain = whole_space(3)
    spec = SubmersionSpec(
        name="flat",
        projection=lambda c: (c[0], c[1]),
        metric=euclidean(3),
        base_metric=euclidean(2),
        base_frame=(_const_field(1.0, 0.0), _const_field(0.0, 1.0)),
        domain=domain,
    )
    return CatalogEntry("flat", {}, spec, _oracle(), HARMONIC, ModelName.EUCLIDEAN3)


def bcv_z_projection(m: float, l: float) -> CatalogEntry:
    """BCV space -> (R^2, (du^2 + dv^2) / F^2) forgetting z; fibres are E3-lines."""
    params = BCVParams(m, l)

    def conformal(c):
        F = 1 + m * (c[0] * c[0] + c[1] * c[1])
        w = 1 / (F * F)
        return ((w, 0.0), (0.0, w))

    def F2(c):
        return 1 + m * (c[0] * c[0] + c[1] * c[1])

    dom = params.domain
    base_domain = ChartDomain(dom.description, dom.lower[:2], dom.upper[:2], dom.constraints)
    spec = SubmersionSpec(
        name="bcv-z",
        projection=lambda c: (c[0], c[1]),
        metric=bcv_metric(params),
        base_metric=MetricField(conformal, 2, base_domain, "bcv-z-base"),
        base_frame=(lambda c: (F2(c), 0.0), lambda c: (0.0, F2(c))),
        domain=dom,
        params={"m": m, "l": l},
    )
    return CatalogEntry(
        "bcv-z", {"m": m, "l": l}, spec,
        _oracle(f1=lambda P: -2 * m * P[..., 1], f2=lambda P: 2 * m * P[..., 0], sigma=-l / 2),
        HARMONIC, classify_bcv(params),
        {"m": (-1.0, -0.25, 0.0, 0.25, 1.0), "l": (0.0, 1.0, 2.0)},
    )


BUILDERS = {
    "pr1": (pr1_family, {"a": 1.0, "b": 0.0}),
    "h2r-exp": (h2r_exp_family, {"m": -0.25}),
    "nil": (nil_example, {}),
    "flat": (flat_projection, {}),
    "bcv-z": (bcv_z_projection, {"m": 0.0, "l": 1.0}),
}

DEFAULT_GRIDS = {
    "pr1": {"a": (0.5, 1.0, 2.0), "b": (0.0, 1.0, 3.0)},
    "h2r-exp": {"m": (-1.0, -0.25, -0.01)},
    "nil": {},
    "flat": {},
    "bcv-z": {"m": (-1.0, -0.25, 0.0, 0.25, 1.0), "l": (0.0, 1.0, 2.0)},
}


def get_entry(name: str, **params) -> CatalogEntry:
    try:
        builder, defaults = BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; choose from {sorted(BUILDERS)}") from None
    kwargs = {k: float(params[k]) if params.get(k) is not None else v for k, v in defaults.items()}
    return builder(**kwargs)


def all_entries() -> list[CatalogEntry]:
    """Every entry across its default parameter grid, in a fixed order."""
    import itertools

    out = []
    for name, grid in DEFAULT_GRIDS.items():
        keys = list(grid)
        for combo in itertools.product(*(grid[k] for k in keys)):
            out.append(get_entry(name, **dict(zip(keys, combo))))
    return out
