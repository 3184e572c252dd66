"""Symbolic values for the Nil non-example at x = 1, used as frozen test constants.

Laplace-Beltrami is taken from the coordinate metric, the base curvature from
h = dx^2 + dt^2 / (1 + x^2) alone, so neither depends on the frame machinery.
"""

import sympy as sp

x, y, z, t = sp.symbols("x y z t", real=True)


def nil_metric():
    w = sp.Rational(1, 2)
    return sp.Matrix([
        [1 + w**2 * y**2, -(w**2) * x * y, w * y],
        [-(w**2) * x * y, 1 + w**2 * x**2, -w * x],
        [w * y, -w * x, 1],
    ])


def laplace_beltrami(u, g, coords):
    ginv = g.inv()
    vol = sp.sqrt(g.det())
    return sp.simplify(sum(
        sp.diff(vol * ginv[i, j] * sp.diff(u, coords[j]), coords[i])
        for i in range(3) for j in range(3)
    ) / vol)


def main():
    f2 = x / (1 + x**2)
    kappa1 = -f2
    lap = laplace_beltrami(kappa1, nil_metric(), (x, y, z))
    # orthogonal base metric dx^2 + G dt^2: K = -(sqrt G)_xx / sqrt G
    sqrtG = 1 / sp.sqrt(1 + x**2)
    K = sp.simplify(-sp.diff(sqrtG, x, 2) / sqrtG)
    # f1 = kappa2 = 0 and the data depend on x only, so r2 vanishes
    r1 = sp.simplify(-lap + kappa1 * (-K + f2**2))
    for name, expr in (("lap_kappa1", lap), ("K_N", K), ("r1", r1)):
        v = expr.subs(x, 1)
        print(f"{name:12s} {sp.nsimplify(v)!s:>10s} = {float(v):.17g}    ({sp.factor(expr)})")


if __name__ == "__main__":
    main()
