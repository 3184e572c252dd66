"""Metric-agnostic differential geometry on a single chart, computed with jets.

Fields are plain callables of the coordinate jets:

* a scalar field maps ``coords -> Jet`` (or a float for constants),
* a vector field maps ``coords -> tuple`` of components in the coordinate basis,
* a :class:`MetricField` maps ``coords -> n x n`` nested tuples.

Every derived quantity (brackets, connections, curvature) is again such a
callable, so expressions compose lazily and a single evaluation at order-3
seeds carries all the derivatives the biharmonicity test needs.  Anything
that accepts a point ``p`` also accepts an already-lifted coordinate tuple,
which keeps repeated queries at the same points on one shared evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import FrameNotOrthonormal, OutOfDomain, SingularMetric
from .jets import DEFAULT_ORDER, Jet, coordinates, recip

ScalarField = Callable[[tuple], "Jet | float"]
VectorField = Callable[[tuple], tuple]


def cached(fn):
    """Single-entry memo keyed on the identity of the coordinate tuple."""
    slot = [(None, None)]

    def wrapper(coords):
        key, val = slot[0]
        if key is coords:
            return val
        val = fn(coords)
        slot[0] = (coords, val)
        return val

    wrapper.__wrapped__ = fn
    return wrapper


def as_coords(p, order: int = DEFAULT_ORDER) -> tuple:
    if isinstance(p, tuple) and p and isinstance(p[0], Jet):
        return p
    return coordinates(p, order)


def values(u, batch_shape=()) -> np.ndarray | float:
    """Point values of a jet or constant, broadcast to the batch."""
    v = u.value if isinstance(u, Jet) else u
    if batch_shape:
        return np.broadcast_to(np.asarray(v, dtype=float), batch_shape).copy()
    return float(v) if np.ndim(v) == 0 else np.asarray(v)


def _batch(coords) -> tuple:
    return coords[0].batch_shape


# -- chart domains ------------------------------------------------------------


@dataclass(frozen=True)
class ChartDomain:
    """Sampling box plus inequality constraints ``c(points) > 0``.

    Only the constraints define membership; the box is where samples are drawn.
    """

    description: str
    lower: tuple
    upper: tuple
    constraints: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.lower)

    def margin(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        m = np.full(points.shape[0], np.inf)
        for c in self.constraints:
            m = np.minimum(m, c(points))
        return m

    def contains(self, points, margin: float = 0.0) -> np.ndarray:
        return self.margin(points) > margin

    def check(self, points) -> None:
        if not np.all(self.contains(points)):
            raise OutOfDomain(f"point outside chart domain ({self.description})")

    def sample(self, n: int, seed: int = 0, margin: float = 1e-3) -> np.ndarray:
        """Deterministic scrambled-Halton points inside the domain."""
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        engine = qmc.Halton(d=self.dim, scramble=True, seed=seed)
        out = np.empty((0, self.dim))
        for _ in range(64):
            cand = lo + (hi - lo) * engine.random(max(2 * n, 16))
            out = np.vstack([out, cand[self.contains(cand, margin)]])
            if len(out) >= n:
                return out[:n]
        raise OutOfDomain(f"could not place {n} samples in {self.description}")


def whole_space(dim: int, half_width: float = 1.0) -> ChartDomain:
    return ChartDomain(f"R^{dim}", (-half_width,) * dim, (half_width,) * dim)


# -- metrics -------------------------------------------------------------------


@dataclass(frozen=True)
class MetricField:
    components: Callable[[tuple], Sequence[Sequence]]
    dim: int
    domain: ChartDomain | None = None
    name: str = ""
    _eval: Callable = field(init=False, repr=False, compare=False)
    _inv: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_eval", cached(self.components))
        object.__setattr__(self, "_inv", cached(lambda c: inverse(self._eval(c))))

    def __call__(self, coords) -> Sequence[Sequence]:
        return self._eval(coords)

    def inverse(self, coords) -> Sequence[Sequence]:
        return self._inv(coords)

    @classmethod
    def from_entries(cls, dim: int, entries: dict, domain=None, name: str = "") -> "MetricField":
        """Build from upper-triangle entries ``{(i, j): ScalarField}``; missing entries are 0."""
        def comps(c):
            vals = {k: f(c) for k, f in entries.items()}
            return tuple(
                tuple(vals.get((min(i, j), max(i, j)), 0.0) for j in range(dim)) for i in range(dim)
            )
        return cls(comps, dim, domain, name)

    def matrix(self, p) -> np.ndarray:
        coords = as_coords(p, 1)
        G = self(coords)
        b = _batch(coords)
        return np.stack([np.stack([values(G[i][j], b) for j in range(self.dim)], -1)
                         for i in range(self.dim)], -2)

    def check_spd(self, points, margin: float = 1e-12) -> None:
        mats = np.atleast_3d(self.matrix(points))
        for k in range(1, self.dim + 1):
            minors = np.linalg.det(mats[..., :k, :k])
            if np.any(minors <= margin):
                raise SingularMetric(f"metric {self.name or ''} not positive definite at a sample point")


def euclidean(dim: int = 3, scale: float = 1.0) -> MetricField:
    ones = tuple(tuple(scale if i == j else 0.0 for j in range(dim)) for i in range(dim))
    return MetricField(lambda c: ones, dim, whole_space(dim), "euclidean")


# -- pointwise algebra on evaluated components ------------------------------


def _d(u, axis):
    return u.partial(axis) if isinstance(u, Jet) else 0.0


def _is_zero(x) -> bool:
    if type(x) is float:
        return x == 0.0
    return not isinstance(x, Jet) and np.ndim(x) == 0 and x == 0.0


def _sum(terms):
    total = 0.0
    for t in terms:
        if not _is_zero(t):
            total = t + total
    return total


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return 0.0
    return a * b


def directional(X, u):
    """X(u) = sum_i X^i d_i u."""
    return _sum(_mul(X[i], _d(u, i)) for i in range(len(X)))


def bracket(X, Y) -> tuple:
    n = len(X)
    return tuple(
        _sum(_mul(X[i], _d(Y[k], i)) for i in range(n)) - _sum(_mul(Y[i], _d(X[k], i)) for i in range(n))
        for k in range(n)
    )


def dot(G, X, Y):
    n = len(X)
    return _sum(_mul(G[i][j], _mul(X[i], Y[j])) for i in range(n) for j in range(n))


def lower(G, X) -> tuple:
    n = len(X)
    return tuple(_sum(_mul(G[k][j], X[j]) for j in range(n)) for k in range(n))


def det(G):
    n = len(G)
    if n == 2:
        return G[0][0] * G[1][1] - G[0][1] * G[1][0]
    if n == 3:
        return (
            G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1])
            - G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0])
            + G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0])
        )
    raise ValueError("only 2x2 and 3x3 matrices are supported")


def inverse(G) -> tuple:
    n = len(G)
    D = det(G)
    dv = np.abs(np.asarray(D.value if isinstance(D, Jet) else D))
    if np.any(dv < 1e-300) or not np.all(np.isfinite(dv)):
        raise SingularMetric("metric matrix is singular at a sample point")
    inv_d = recip(D) if isinstance(D, Jet) else 1.0 / D
    if n == 2:
        adj = ((G[1][1], -G[0][1]), (-G[1][0], G[0][0]))
    else:
        def cof(i, j):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            m = G[r[0]][c[0]] * G[r[1]][c[1]] - G[r[0]][c[1]] * G[r[1]][c[0]]
            return m if (i + j) % 2 == 0 else -m
        adj = tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))
    return tuple(tuple(_mul(adj[i][j], inv_d) for j in range(n)) for i in range(n))


def matvec(A, v) -> tuple:
    return tuple(_sum(_mul(A[i][j], v[j]) for j in range(len(v))) for i in range(len(A)))


def koszul(G, Ginv, X, Y) -> tuple:
    """Coordinate components of nabla_X Y from the Koszul formula with Z = d_k."""
    n = len(X)
    XY = bracket(X, Y)
    lY, lX, lXY = lower(G, Y), lower(G, X), lower(G, XY)
    gXY = dot(G, X, Y)
    rhs = []
    for k in range(n):
        dX = tuple(_d(X[i], k) for i in range(n))
        dY = tuple(_d(Y[i], k) for i in range(n))
        # [Y, d_k] = -d_k Y and [X, d_k] = -d_k X
        rhs.append(
            directional(X, lY[k]) + directional(Y, lX[k]) - _d(gXY, k)
            + lXY[k] + dot(G, dY, X) + dot(G, dX, Y)
        )
    return tuple(0.5 * c for c in matvec(Ginv, rhs))


# -- field-level operations ----------------------------------------------------


# Field constructors below are memoized on their (hashable) arguments so that
# repeated queries share sub-fields and hence their per-point caches.


def vector_field(*components: ScalarField) -> VectorField:
    @cached
    def field(c):
        return tuple(f(c) for f in components)
    return field


def coordinate_field(k: int, dim: int = 3) -> VectorField:
    comps = tuple(1.0 if i == k else 0.0 for i in range(dim))
    return lambda c: comps


@lru_cache(maxsize=1024)
def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    @cached
    def field(c):
        return bracket(X(c), Y(c))
    return field


def scale_field(f: ScalarField, X: VectorField) -> VectorField:
    @cached
    def field(c):
        s = f(c)
        return tuple(_mul(s, v) for v in X(c))
    return field


@lru_cache(maxsize=1024)
def derivative_field(X: VectorField, u: ScalarField) -> ScalarField:
    """The scalar field X(u)."""
    @cached
    def field(c):
        return directional(X(c), u(c))
    return field


@lru_cache(maxsize=1024)
def connection(g: MetricField, X: VectorField, Y: VectorField) -> VectorField:
    """The vector field nabla_X Y (one jet order lower than its inputs)."""
    @cached
    def field(c):
        return koszul(g(c), g.inverse(c), X(c), Y(c))
    return field


@lru_cache(maxsize=1024)
def curvature_field(g: MetricField, X: VectorField, Y: VectorField, Z: VectorField) -> VectorField:
    """R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z."""
    a = connection(g, X, connection(g, Y, Z))
    b = connection(g, Y, connection(g, X, Z))
    cterm = connection(g, lie_bracket(X, Y), Z)

    @cached
    def field(c):
        return tuple(u - v - w for u, v, w in zip(a(c), b(c), cterm(c)))
    return field


def _vec_values(V, coords) -> np.ndarray:
    b = _batch(coords)
    return np.stack([np.asarray(values(v, b), dtype=float) for v in V], axis=-1)


def inner(g: MetricField, X: VectorField, Y: VectorField, p) -> Jet:
    c = as_coords(p)
    out = dot(g(c), X(c), Y(c))
    if not isinstance(out, Jet):
        out = Jet.constant(np.broadcast_to(out, _batch(c)), c[0].order, c[0].nvars)
    return out


def levi_civita(g: MetricField, X: VectorField, Y: VectorField, p) -> np.ndarray:
    c = as_coords(p)
    return _vec_values(connection(g, X, Y)(c), c)


def curvature(g: MetricField, X, Y, Z, p) -> np.ndarray:
    c = as_coords(p)
    return _vec_values(curvature_field(g, X, Y, Z)(c), c)


def curvature_scalar(g: MetricField, X, Y, Z, W, p):
    """g(R(Z, W) Y, X), i.e. R(X, Y, Z, W) in the convention R_ijkl = g(R(E_k, E_l) E_j, E_i)."""
    c = as_coords(p)
    return values(dot(g(c), curvature_field(g, Z, W, Y)(c), X(c)), _batch(c))


def riemann_component(g: MetricField, frame: Sequence[VectorField], i: int, j: int, k: int, l: int, p):
    """R_ijkl of a frame, 1-based indices, sign convention pinned in one place."""
    e = list(frame)
    return curvature_scalar(g, e[i - 1], e[j - 1], e[k - 1], e[l - 1], p)


def gram(g: MetricField, frame: Sequence[VectorField], p) -> np.ndarray:
    c = as_coords(p)
    G = g(c)
    vecs = [e(c) for e in frame]
    b = _batch(c)
    n = len(vecs)
    return np.stack([np.stack([values(dot(G, vecs[i], vecs[j]), b) for j in range(n)], -1)
                     for i in range(n)], -2)


def check_orthonormal(g: MetricField, frame, p, tol: float = 1e-9) -> float:
    dev = float(np.max(np.abs(gram(g, frame, p) - np.eye(len(frame)))))
    if dev > tol:
        raise FrameNotOrthonormal(f"frame Gram matrix deviates from identity by {dev:.3e}")
    return dev


def laplacian_field(g: MetricField, frame: Sequence[VectorField], u: ScalarField) -> ScalarField:
    """sum_i e_i(e_i(u)) - (nabla_{e_i} e_i)(u) for an orthonormal frame."""
    parts = [(e, connection(g, e, e)) for e in frame]

    @cached
    def field(c):
        uc = u(c)
        total = 0.0
        for e, nee in parts:
            ec = e(c)
            total = total + directional(ec, directional(ec, uc)) - directional(nee(c), uc)
        return total
    return field


def laplacian_frame(g: MetricField, frame: Sequence[VectorField], u: ScalarField, p, check: bool = True):
    c = as_coords(p)
    if check:
        check_orthonormal(g, frame, c)
    return values(laplacian_field(g, frame, u)(c), _batch(c))
