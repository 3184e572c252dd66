"""Engine vs symbolic residual r1(x) of the Nil non-example along a line in x.

    python3 scripts/nil_residual_profile.py
"""

import numpy as np

from biharm import biharmonic as bh
from biharm import catalog
from biharm.submersion import build_frame, integrability_data


def symbolic_r1(x):
    # from scripts/nil_oracle.py
    return -x * (x * x + 5) / (x * x + 1) ** 3


def main():
    spec = catalog.nil_example().spec
    fr = build_frame(spec)
    data = integrability_data(fr, spec.metric)
    xs = np.linspace(-2, 2, 17)
    P = np.stack([xs, np.full_like(xs, 0.3), np.full_like(xs, -0.2)], -1)
    r1, r2 = bh.biharmonic_residual(spec, fr, data, P)
    print(f"{'x':>6s} {'r1 engine':>14s} {'r1 symbolic':>14s} {'r2':>10s}")
    for x, a, b in zip(xs, r1, r2):
        print(f"{x:6.2f} {a:14.10f} {symbolic_r1(x):14.10f} {b:10.1e}")
    print(f"max |engine - symbolic| = {np.max(np.abs(r1 - symbolic_r1(xs))):.2e}")


if __name__ == "__main__":
    main()
