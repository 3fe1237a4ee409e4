"""The Neumann oscillator checked against its spectral curve.

A random tangent state on the sphere |q| = 1 with constants c = (1, 2, 3)
is integrated mechanically.  Along the trajectory the Uhlenbeck integrals
stay fixed, the separated roots stay in their intervals [c_n, c_n+1], and
the Abel-Jacobi image of the separated points moves on a straight line with
velocity (4i/r) dH/du.
"""
import numpy as np

from hyperint import neumann as nm
from hyperint.instances import rng

params = nm.NeumannParams(np.array([1.0, 2.0, 3.0]), 1.0)
state = nm.random_state(params, rng(3))
print("q0 =", np.round(state.q, 6), " p0 =", np.round(state.p, 6))

P, u = nm.spectral_data(params, state)
print("u from spectral data      ", np.round(u.real, 10))
print("F_n                       ", np.round(nm.uhlenbeck_integrals(params, state), 10))
print("H, 1/2 sum c_n F_n        ", nm.energy(params, state),
      0.5 * params.c @ nm.uhlenbeck_integrals(params, state))

tr = nm.integrate(params, state, 10.0, n_samples=6)
F0 = nm.uhlenbeck_integrals(params, state)
print("\n   t    max|F_n(t) - F_n(0)|   separated roots")
for t, s in zip(tr.times, tr.states):
    x = nm.separated_points(params, s).x.real
    dF = np.max(np.abs(nm.uhlenbeck_integrals(params, s) - F0))
    print(f"  {t:4.1f}       {dF:.1e}          {np.round(np.sort(x), 6)}")

T = 0.1 * nm.turning_time(params, state)
res = nm.linearization_check(params, state, T)
print(f"\naffine fit of psi(t) on [0, {T:.4f}]: residual {res.fit_residual:.1e}")
print("fitted slopes  ", np.round(res.slopes, 8))
print("(4i/r) dH/du   ", np.round(res.expected, 8))
