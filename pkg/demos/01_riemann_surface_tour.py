"""A tour of the Riemann-surface engine on two small curves.

1. The lemniscate y^2 = 1 - x^4: half of the branch-pair period between
   -1 and 1 is the lemniscate constant, Gamma(1/4)^2 / (2 sqrt(2 pi)).
2. Monodromy: continuing y once around a branch point flips its sign, and
   going around twice brings it back.
3. Elementary periods of a random genus-2 curve from the DoubleCoverK3 family.

Run with ``python demos/01_riemann_surface_tour.py``.
"""
from math import gamma, pi, sqrt

import numpy as np

from hyperint.abel_jacobi import elementary_periods
from hyperint.instances import random_instance
from hyperint.poly import Poly
from hyperint.riemann import HyperellipticCurve, Path, branch_pair_period, continue_y

# -- lemniscate
curve = HyperellipticCurve.from_poly(Poly([1, 0, 0, 0, -1]), 1)
bp = curve.branch_points
i, j = int(np.argmin(np.abs(bp + 1))), int(np.argmin(np.abs(bp - 1)))
half = 0.5 * branch_pair_period(curve, 1, i, j, ref_y=1.0)
exact = gamma(0.25) ** 2 / (2 * sqrt(2 * pi))
print(f"lemniscate integral   {half.real:.15f}")
print(f"Gamma-function value  {exact:.15f}   (difference {abs(half - exact):.1e})")

# -- monodromy around x = 1
loop = 1 + 0.5 * np.exp(2j * np.pi * np.arange(49) / 48)
y0 = np.sqrt(complex(curve.F(loop[0])))
once = continue_y(curve, Path(loop, y0))
twice = continue_y(curve, Path(np.concatenate([loop, loop[1:]]), y0))
print(f"\ny at start {y0:.6f}; after one loop {once:.6f}; after two loops {twice:.6f}")

# -- periods of a genus-2 curve
inst = random_instance("DoubleCoverK3", 0)
pd = elementary_periods(inst.family, inst.u)
print(f"\nDoubleCoverK3 seed 0, u = {np.round(inst.u, 4)}")
for (a, b), e in zip(pd.pairs, pd.e):
    print(f"  cycle around branch points {a}, {b}: e = {np.round(e, 6)}")
