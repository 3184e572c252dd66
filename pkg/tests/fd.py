"""Finite-difference oracles shared by the tests."""

import itertools

import numpy as np

# second-order central stencils (offsets, weights) for derivative orders 0..3
STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
}


def central(f, p, alpha, h):
    """Tensor-product central difference for d^alpha f at p; error O(h^2)."""
    p = np.asarray(p, dtype=float)
    axes = [STENCILS[a] for a in alpha]
    total = 0.0
    for combo in itertools.product(*(range(len(s[0])) for s in axes)):
        shift = np.array([axes[i][0][k] for i, k in enumerate(combo)], dtype=float)
        w = np.prod([axes[i][1][k] for i, k in enumerate(combo)])
        q = p + h * shift
        total += w * f(tuple(q))
    return total / h ** sum(alpha)


def richardson(f, p, alpha, h=0.02):
    """One Richardson step on the O(h^2) central difference."""
    return (4 * central(f, p, alpha, h / 2) - central(f, p, alpha, h)) / 3


def multi_indices(order, nvars=3):
    return [a for a in itertools.product(range(order + 1), repeat=nvars) if sum(a) <= order]
