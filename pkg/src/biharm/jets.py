"""Truncated multivariate Taylor jets (forward-mode AD of arbitrary order).

A :class:`Jet` stores Taylor coefficients ``c[alpha] = d^alpha f / alpha!`` for
every multi-index ``alpha`` with ``|alpha| <= order``, in graded order, so that
truncating to a lower order is a slice and multiplication is a truncated
Cauchy convolution.  Coefficient arrays carry trailing batch dimensions, which
lets one jet describe the same field at many points at once.

Taking a partial derivative lowers the order by one.  This is how the rest of
the engine re-differentiates: a frame known to order 3 yields brackets to
order 2, integrability data to order 2, and Laplacians of the data to order 0.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import DivisionByZeroAtPoint, DomainError, IndexOutOfOrder, NonFiniteJet

DEFAULT_ORDER = 3


@lru_cache(maxsize=None)
def multi_indices(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices of total degree <= order, graded, lexicographically descending within a degree."""
    out = []
    for deg in range(order + 1):
        level = [a for a in itertools.product(range(deg + 1), repeat=nvars) if sum(a) == deg]
        out.extend(sorted(level, reverse=True))
    return tuple(out)


@lru_cache(maxsize=None)
def n_coeffs(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


@lru_cache(maxsize=None)
def _position(nvars: int, order: int) -> dict:
    return {a: i for i, a in enumerate(multi_indices(nvars, order))}


@lru_cache(maxsize=None)
def _factorials(nvars: int, order: int) -> np.ndarray:
    return np.array(
        [math.prod(math.factorial(k) for k in a) for a in multi_indices(nvars, order)], dtype=float
    )


@lru_cache(maxsize=None)
def _mul_table(nvars: int, order: int):
    idx = multi_indices(nvars, order)
    pos = _position(nvars, order)
    pairs = []
    for i, a in enumerate(idx):
        for j, b in enumerate(idx):
            s = tuple(x + y for x, y in zip(a, b))
            if sum(s) <= order:
                pairs.append((pos[s], i, j))
    pairs.sort()
    k = np.array([p[0] for p in pairs])
    left = np.array([p[1] for p in pairs])
    right = np.array([p[2] for p in pairs])
    starts = np.searchsorted(k, np.arange(len(idx)))
    return left, right, starts


@lru_cache(maxsize=None)
def _partial_table(nvars: int, order: int, axis: int):
    pos = _position(nvars, order)
    src, fac = [], []
    for a in multi_indices(nvars, order - 1):
        up = list(a)
        up[axis] += 1
        src.append(pos[tuple(up)])
        fac.append(up[axis])
    return np.array(src), np.array(fac, dtype=float)


class Jet:
    """Immutable truncated Taylor expansion in ``nvars`` variables."""

    __slots__ = ("coeffs", "order", "nvars")
    __array_ufunc__ = None  # make ndarray * Jet dispatch to Jet.__rmul__

    def __init__(self, coeffs, order: int, nvars: int = 3, check: bool = True):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[0] != n_coeffs(nvars, order):
            raise ValueError(
                f"expected {n_coeffs(nvars, order)} coefficients for order {order} "
                f"in {nvars} variables, got {coeffs.shape[0]}"
            )
        if check and not np.isfinite(coeffs).all():
            raise NonFiniteJet("non-finite Taylor coefficient produced")
        self.coeffs = coeffs
        self.order = order
        self.nvars = nvars

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER, nvars: int = 3) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((n_coeffs(nvars, order),) + value.shape)
        c[0] = value
        return cls(c, order, nvars)

    # -- basic accessors -------------------------------------------------
    @property
    def value(self):
        v = self.coeffs[0]
        return float(v) if v.ndim == 0 else v

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, value={self.value!r})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise IndexOutOfOrder(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[: n_coeffs(self.nvars, order)], order, self.nvars, check=False)

    def extract(self, multi_index) -> float | np.ndarray:
        """Partial derivative d^|a| f / dx^a (undoes the factorial scaling)."""
        a = tuple(int(k) for k in multi_index)
        if len(a) != self.nvars or min(a) < 0:
            raise IndexOutOfOrder(f"bad multi-index {multi_index!r} for {self.nvars} variables")
        if sum(a) > self.order:
            raise IndexOutOfOrder(f"multi-index {a} exceeds jet order {self.order}")
        i = _position(self.nvars, self.order)[a]
        out = self.coeffs[i] * _factorials(self.nvars, self.order)[i]
        return float(out) if np.ndim(out) == 0 else out

    def partial(self, axis: int) -> "Jet":
        if self.order < 1:
            raise IndexOutOfOrder("cannot differentiate an order-0 jet")
        src, fac = _partial_table(self.nvars, self.order, axis)
        fac = fac.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.coeffs[src] * fac, self.order - 1, self.nvars, check=False)

    def gradient(self) -> list["Jet"]:
        return [self.partial(i) for i in range(self.nvars)]

    # -- arithmetic ------------------------------------------------------
    def _match(self, other: "Jet") -> tuple[np.ndarray, np.ndarray, int]:
        if other.nvars != self.nvars:
            raise ValueError("jets over different numbers of variables")
        order = min(self.order, other.order)
        n = n_coeffs(self.nvars, order)
        return self.coeffs[:n], other.coeffs[:n], order

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._match(other)
            return Jet(a + b, order, self.nvars)
        other = np.asarray(other, dtype=float)
        c = self.coeffs.copy() if other.ndim == 0 else np.broadcast_to(
            self.coeffs, self.coeffs.shape[:1] + np.broadcast_shapes(self.batch_shape, other.shape)
        ).copy()
        c[0] = c[0] + other
        return Jet(c, self.order, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.order, self.nvars, check=False)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._match(other)
            left, right, starts = _mul_table(self.nvars, order)
            prod = a[left] * b[right]
            return Jet(np.add.reduceat(prod, starts, axis=0), order, self.nvars)
        return Jet(self.coeffs * np.asarray(other, dtype=float), self.order, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * recip(other)
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise DivisionByZeroAtPoint("division by a zero constant")
        return Jet(self.coeffs / other, self.order, self.nvars)

    def __rtruediv__(self, other):
        return recip(self) * other

    def __pow__(self, exponent):
        if isinstance(exponent, (int, np.integer)):
            return powi(self, int(exponent))
        return power(self, float(exponent))

    # -- univariate composition -----------------------------------------
    def compose(self, derivs) -> "Jet":
        """f(self), given the derivatives f^(n)(value) for n = 0..order."""
        nil = self.coeffs.copy()
        nil[0] = 0.0
        nil = Jet(nil, self.order, self.nvars, check=False)
        out = np.zeros_like(self.coeffs)
        out[0] = derivs[0]
        term = None
        for n in range(1, self.order + 1):
            term = nil if term is None else term * nil
            out = out + term.coeffs * (np.asarray(derivs[n]) / math.factorial(n))
        return Jet(out, self.order, self.nvars)


# -- constructors -----------------------------------------------------------


def lift_coordinate(axis: int, p, order: int = DEFAULT_ORDER, nvars: int | None = None) -> Jet:
    """Seed jet for chart coordinate ``axis`` at point(s) ``p`` (shape (..., nvars))."""
    if order < 1:
        raise ValueError("order must be >= 1")
    p = np.asarray(p, dtype=float)
    nvars = p.shape[-1] if nvars is None else nvars
    if not 0 <= axis < nvars:
        raise IndexError(f"axis {axis} out of range for {nvars} variables")
    c = np.zeros((n_coeffs(nvars, order),) + p.shape[:-1])
    c[0] = p[..., axis]
    unit = [0] * nvars
    unit[axis] = 1
    c[_position(nvars, order)[tuple(unit)]] = 1.0
    return Jet(c, order, nvars)


def coordinates(p, order: int = DEFAULT_ORDER) -> tuple[Jet, ...]:
    p = np.asarray(p, dtype=float)
    return tuple(lift_coordinate(i, p, order) for i in range(p.shape[-1]))


def point_of(coords) -> np.ndarray:
    """Recover the base point(s) from a tuple of coordinate jets."""
    return np.stack([np.asarray(c.coeffs[0]) for c in coords], axis=-1)


def relift(coords, order: int) -> tuple[Jet, ...]:
    """Fresh coordinate seeds at the same point(s), at a different order."""
    return coordinates(point_of(coords), order)


def value(x):
    return x.value if isinstance(x, Jet) else x


# -- elementary functions ---------------------------------------------------


def recip(a):
    if not isinstance(a, Jet):
        if np.any(np.asarray(a) == 0):
            raise DivisionByZeroAtPoint("reciprocal of zero")
        return 1.0 / a
    v = a.coeffs[0]
    if np.any(v == 0):
        raise DivisionByZeroAtPoint("reciprocal of a jet with zero value")
    derivs = [(-1) ** n * math.factorial(n) / v ** (n + 1) for n in range(a.order + 1)]
    return a.compose(derivs)


def sqrt(a):
    v = a.coeffs[0] if isinstance(a, Jet) else np.asarray(a)
    if np.any(v <= 0):
        # the value alone is fine at 0 but no derivative exists
        if not isinstance(a, Jet) and np.all(v >= 0):
            return np.sqrt(a)
        raise DomainError("sqrt of a non-positive value")
    if not isinstance(a, Jet):
        return np.sqrt(a)
    derivs = []
    c = 1.0
    for n in range(a.order + 1):
        derivs.append(c * v ** (0.5 - n))
        c *= 0.5 - n
    return a.compose(derivs)


def power(a, r: float):
    """Real power a**r for positive base values."""
    if float(r).is_integer():
        return powi(a, int(r))
    v = a.coeffs[0] if isinstance(a, Jet) else np.asarray(a)
    if np.any(v <= 0):
        raise DomainError("non-integer power of a non-positive value")
    if not isinstance(a, Jet):
        return np.power(a, r)
    derivs = []
    c = 1.0
    for n in range(a.order + 1):
        derivs.append(c * v ** (r - n))
        c *= r - n
    return a.compose(derivs)


def powi(a, n: int):
    if not isinstance(a, Jet):
        if n < 0:
            return recip(a ** (-n))
        return a**n
    if n < 0:
        return recip(powi(a, -n))
    result = Jet.constant(np.ones(a.batch_shape), a.order, a.nvars)
    base = a
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.coeffs[0])
    return a.compose([e] * (a.order + 1))


def log(a):
    v = a.coeffs[0] if isinstance(a, Jet) else np.asarray(a)
    if np.any(v <= 0):
        raise DomainError("log of a non-positive value")
    if not isinstance(a, Jet):
        return np.log(a)
    derivs = [np.log(v)] + [(-1) ** (n - 1) * math.factorial(n - 1) / v**n for n in range(1, a.order + 1)]
    return a.compose(derivs)


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    s, c = np.sin(a.coeffs[0]), np.cos(a.coeffs[0])
    cycle = [s, c, -s, -c]
    return a.compose([cycle[n % 4] for n in range(a.order + 1)])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    s, c = np.sin(a.coeffs[0]), np.cos(a.coeffs[0])
    cycle = [c, -s, -c, s]
    return a.compose([cycle[n % 4] for n in range(a.order + 1)])


FUNCTIONS = {
    "sqrt": sqrt,
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "recip": recip,
}


def jet_fn(a, fn: str, n: int | None = None):
    """Apply a named elementary function; ``powi`` takes the integer exponent ``n``."""
    if fn == "powi":
        return powi(a, n)
    return FUNCTIONS[fn](a)


def jet_arith(a, b, op: str):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")
