"""The classical Neumann system as an independent check of the rational family.

A particle on the sphere ``|q| = r`` in ``R^{N+1}`` moves in the quadratic
potential ``1/2 sum c_n q_n**2``.  Its Uhlenbeck integrals ``F_n`` assemble
into the spectral polynomial

    P(x) = Q(x) sum_n F_n / (x - c_n),      Q(x) = prod_n (x - c_n),

whose lower coefficients are the Hamiltonians ``u`` of
:class:`~hyperint.surface.NeumannRational`.  The ellipsoidal coordinates
(roots of ``U(x) = sum_n q_n**2 prod_{m != n} (x - c_m)``) place ``N`` points
on the curve ``y**2 = P Q``, and their Abel-Jacobi image moves linearly in
mechanical time.

Time normalization
------------------
For real states ``r**2 P(x_j) Q(x_j) = -(Q(x_j) sum_n q_n p_n / (x_j - c_n))**2``,
so ``y_j`` is imaginary.  We take

    y_j = (i / r) Q(x_j) sum_n q_n p_n / (x_j - c_n),

which is the sign for which the velocity of ``x_j`` along the mechanical
trajectory is the surface flow of ``H`` rescaled by the constant

    TIME_SCALE = 4 i / r .

Mechanical time ``t`` is therefore the flow parameter of ``TIME_SCALE * H``,
and the slope of ``psi_k`` is ``TIME_SCALE * dH/du_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .abel_jacobi import abel_jacobi_along
from .errors import (BranchPointHit, DegenerateSeparation, NonPolynomialResidue,
                     NumericalFailure)
from .poly import Poly, roots
from .riemann import QuadratureSettings
from .surface import Configuration, NeumannRational, SurfacePoint

__all__ = [
    "NeumannParams",
    "NeumannState",
    "NeumannTrajectory",
    "time_scale",
    "mechanical_rhs",
    "energy",
    "uhlenbeck_integrals",
    "spectral_data",
    "separation_polynomial",
    "separated_points",
    "integrate",
    "hamiltonian_of_u",
    "LinearizationResult",
    "linearization_check",
    "random_state",
    "turning_time",
]


@dataclass(frozen=True)
class NeumannParams:
    c: np.ndarray
    r: float = 1.0

    def __post_init__(self):
        c = np.sort(np.asarray(self.c, dtype=float).ravel())
        if len(c) < 2:
            raise ValueError("need at least two constants c_n")
        if np.any(np.diff(c) <= 0):
            raise ValueError("the constants c_n must be distinct")
        if not self.r > 0:
            raise ValueError("r must be positive")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", float(self.r))

    @property
    def N(self) -> int:
        return len(self.c) - 1

    @property
    def Q(self) -> Poly:
        return Poly.from_roots(self.c)

    def family(self) -> NeumannRational:
        return NeumannRational(self.c, self.r)


@dataclass(frozen=True)
class NeumannState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).ravel()
        p = np.asarray(self.p, dtype=float).ravel()
        if q.shape != p.shape:
            raise ValueError("q and p differ in length")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def constraint_residual(self, params: NeumannParams) -> float:
        """``max(|q.q - r^2|, |q.p|)``."""
        return max(abs(self.q @ self.q - params.r ** 2), abs(self.q @ self.p))

    def projected(self, params: NeumannParams) -> "NeumannState":
        """Nearest state on the constraint surface (radial then tangential)."""
        q = self.q * (params.r / np.linalg.norm(self.q))
        p = self.p - (q @ self.p) / (q @ q) * q
        return NeumannState(q, p)

    def reversed(self) -> "NeumannState":
        return NeumannState(self.q, -self.p)


def time_scale(params: NeumannParams) -> complex:
    return 4j / params.r


def mechanical_rhs(params: NeumannParams, state: NeumannState):
    """``(dq, dp)`` with the multiplier that keeps both constraints."""
    q, p, c = state.q, state.p, params.c
    lam = (q @ (c * q) - p @ p) / params.r ** 2
    return p.copy(), -c * q + lam * q


def energy(params: NeumannParams, state: NeumannState) -> float:
    return 0.5 * (state.p @ state.p + params.c @ (state.q ** 2))


def uhlenbeck_integrals(params: NeumannParams, state: NeumannState,
                        dtype=np.float64) -> np.ndarray:
    """``F_n = q_n^2 + r^-2 sum_{m != n} (q_n p_m - q_m p_n)^2 / (c_n - c_m)``.

    Without the factor ``r^-2`` one finds ``dF_n/dt = 2 q_n p_n (1 - r^2)``;
    with it the ``F_n`` are conserved on a sphere of any radius, and for
    ``r = 1`` this is the usual normalization.
    """
    q, p, c = (v.astype(dtype) for v in (state.q, state.p, params.c))
    L = np.outer(q, p) - np.outer(p, q)
    dc = c[:, None] - c[None, :]
    np.fill_diagonal(dc, np.inf)
    return q ** 2 + np.sum(L ** 2 / dc, axis=1) / dtype(params.r) ** 2


def spectral_data(params: NeumannParams, state: NeumannState,
                  tol: float = 1e-10, extended: bool = False) -> tuple[Poly, np.ndarray]:
    """``P = Q sum F_n/(x - c_n)`` and its Hamiltonians ``u``.

    The sum is recombined exactly as ``sum F_n Q_n`` with ``Q_n = Q/(x - c_n)``.
    The degree ``N+1`` coefficient of that combination is zero by construction;
    the leading coefficient must equal ``r^2``.  A mismatch beyond ``tol``
    means the state is off the constraint surface.

    With ``extended`` the integrals, ``P`` and ``u`` are in ``clongdouble``.
    Branch points that nearly coincide (a root of ``P`` next to a ``c_n``)
    are then located well enough for points sitting between them.
    """
    rt, ct = (np.longdouble, np.clongdouble) if extended else (np.float64, np.complex128)
    F = uhlenbeck_integrals(params, state, rt)
    c = params.c.astype(rt)
    P = Poly(np.zeros(1, dtype=ct))
    for n in range(len(c)):
        P = P + F[n] * Poly.from_roots(np.delete(c, n).astype(ct))
    lead = P.coeff(params.N)
    if abs(lead - params.r ** 2) > tol * max(1.0, params.r ** 2):
        raise NonPolynomialResidue(
            f"leading coefficient {complex(lead).real:.12g} differs from r^2 = {params.r ** 2:.12g}")
    fam = params.family()
    # pin the leading coefficient exactly so both routes share the same section
    coeffs = np.array(P.coeffs, dtype=ct)
    coeffs[params.N] = params.r ** 2
    P = Poly(coeffs)
    return P, fam.u_from_section(P)


def separation_polynomial(params: NeumannParams, state: NeumannState,
                          dtype=np.complex128) -> Poly:
    """``U(x) = sum_n q_n^2 prod_{m != n} (x - c_m)``; its roots are the ellipsoidal coordinates."""
    c = params.c.astype(np.longdouble if dtype == np.clongdouble else float)
    q = state.q.astype(c.dtype)
    U = Poly(np.zeros(1, dtype=dtype))
    for n in range(len(c)):
        U = U + q[n] ** 2 * Poly.from_roots(np.delete(c, n).astype(dtype))
    return U


def _separated_x(params: NeumannParams, state: NeumannState, disc_tol: float) -> np.ndarray:
    # a point close to a branch point has a large 1/y, which amplifies any
    # error in x; the roots are polished in extended precision and then rounded
    U = separation_polynomial(params, state, np.clongdouble)
    if U.degree != params.N:
        raise DegenerateSeparation("separation polynomial lost degree")
    if params.N == 1:
        xs = np.array([-U.coeff(0) / U.coeff(1)])
    else:
        xs = roots(U)
    xs = xs.astype(complex)
    xs = np.where(np.abs(xs.imag) < 1e-9 * max(1.0, np.max(np.abs(params.c))), xs.real + 0j, xs)
    scale = max(1.0, float(np.ptp(params.c)))
    d = np.abs(xs[:, None] - xs[None, :])
    d[np.diag_indices_from(d)] = np.inf
    if len(xs) > 1 and d.min() < disc_tol * scale:
        raise DegenerateSeparation(f"separated coordinates nearly coincide (gap {d.min():.2e})")
    return np.sort_complex(xs)


def separated_points(params: NeumannParams, state: NeumannState,
                     trajectory_hint: tuple[NeumannState, float] | None = None,
                     disc_tol: float = 1e-10, branch_tol: float = 1e-10) -> Configuration:
    """Points ``(x_j, y_j, z_j)`` of ``y^2 = z Q(x)``, ``z = P(x)``, for a state.

    ``y_j = s_j (i/r) Q(x_j) sum_n q_n p_n / (x_j - c_n)``, a square root of
    ``P(x_j) Q(x_j)`` that stays accurate near the branch points.  The signs follow from the velocity of
    ``x_j``: with ``trajectory_hint = (later_state, dt)`` it is the forward
    difference of the roots along the trajectory, otherwise the exact
    tangent ``dx_j/dt = -dU/dt(x_j) / U'(x_j)``.  ``s_j`` is the sign for which
    ``dx_j/dt`` equals the surface flow of ``TIME_SCALE * H``, i.e.
    ``(TIME_SCALE/2) y_j / prod_{m != j} (x_j - x_m)``.

    A point sitting on a ``c_n`` (``q_n = 0``) is a branch point; it is
    accepted with ``y_j = 0``.
    """
    P, _ = spectral_data(params, state)
    Q = params.Q
    xs = _separated_x(params, state, disc_tol)
    if trajectory_hint is not None:
        later, dt = trajectory_hint
        vel = (_separated_x(params, later, disc_tol) - xs) / dt
    else:
        Ut = Poly()
        for n in range(len(params.c)):
            Ut = Ut + float(2 * state.q[n] * state.p[n]) * Poly.from_roots(np.delete(params.c, n))
        U = separation_polynomial(params, state)
        vel = -Ut(xs) / U.deriv()(xs)
    kappa = time_scale(params)
    pts = []
    for j, x in enumerate(xs):
        z = complex(P(x))
        if np.min(np.abs(x - params.c)) < branch_tol * max(1.0, abs(x)):
            pts.append(SurfacePoint(complex(x), 0j, z))
            continue
        # r^2 P Q = -(Q sum q p / (x - c))^2 on real states; the right side
        # has no cancellation near a branch point, unlike the product P Q
        w = 1j * complex(Q(x)) * np.sum(state.q * state.p / (x - params.c)) / params.r
        gap = np.prod(x - np.delete(xs, j))
        pred = 0.5 * kappa * w / gap
        s = 1 if abs(vel[j] - pred) <= abs(vel[j] + pred) else -1
        pts.append(SurfacePoint(complex(x), s * w, z))
    return Configuration.from_points(pts)


# -----------------------------------------------------------------------------
# mechanics

@dataclass
class NeumannTrajectory:
    times: np.ndarray
    states: list
    projections: list = field(default_factory=list)

    def drift(self, params: NeumannParams) -> float:
        return max(s.constraint_residual(params) for s in self.states)


def integrate(params: NeumannParams, state0: NeumannState, T: float,
              n_samples: int = 101, rtol: float = 1e-11, atol: float = 1e-14,
              drift_tol: float = 1e-11) -> NeumannTrajectory:
    """DOP853 between sample times; re-project when the drift exceeds ``drift_tol``.

    Each projection is logged as ``(time, drift_before)``.
    """
    if state0.constraint_residual(params) > 1e-10 * max(1.0, params.r ** 2):
        raise ValueError("initial state violates the constraints")
    n = len(state0.q)
    if n != len(params.c):
        raise ValueError("state dimension does not match the constants c")

    def rhs(t, v):
        dq, dp = mechanical_rhs(params, NeumannState(v[:n], v[n:]))
        return np.concatenate([dq, dp])

    times = np.linspace(0.0, T, n_samples)
    states = [state0]
    proj = []
    cur = state0
    for t0, t1 in zip(times[:-1], times[1:]):
        sol = solve_ivp(rhs, (t0, t1), np.concatenate([cur.q, cur.p]), method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise NumericalFailure(f"mechanical integration failed: {sol.message}")
        cur = NeumannState(sol.y[:n, -1], sol.y[n:, -1])
        d = cur.constraint_residual(params)
        if d > drift_tol:
            proj.append((float(t1), float(d)))
            cur = cur.projected(params)
        states.append(cur)
    return NeumannTrajectory(times, states, proj)


def hamiltonian_of_u(params: NeumannParams, u) -> complex:
    """``H(u) = 1/2 sum_n c_n P(c_n) / Q'(c_n)`` with ``P`` the section of ``u``."""
    fam = params.family()
    P = fam.section(u)
    dQ = params.Q.deriv()
    return 0.5 * sum(cn * complex(P(cn)) / complex(dQ(cn)) for cn in params.c)


def _dH_du(params: NeumannParams, u, h: float = 1e-6) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    out = np.zeros(len(u), dtype=complex)
    for k in range(len(u)):
        e = np.zeros(len(u))
        e[k] = h
        out[k] = (hamiltonian_of_u(params, u + e) - hamiltonian_of_u(params, u - e)) / (2 * h)
    return out


@dataclass
class LinearizationResult:
    """Outcome of :func:`linearization_check`.

    ``residual`` is the worst affine-fit residual plus the worst slope error.
    """

    residual: float
    fit_residual: float
    slope_error: float
    slopes: np.ndarray
    expected: np.ndarray
    time_scale: complex
    times: np.ndarray
    psi: np.ndarray
    energy_gap: float

    def to_dict(self) -> dict:
        cl = lambda a: [[float(v.real), float(v.imag)] for v in np.ravel(a)]
        return {"residual": self.residual, "fit_residual": self.fit_residual,
                "slope_error": self.slope_error, "slopes": cl(self.slopes),
                "expected": cl(self.expected),
                "time_scale": cl([self.time_scale])[0], "energy_gap": self.energy_gap}


def linearization_check(params: NeumannParams, state0: NeumannState, T: float,
                        settings: QuadratureSettings | None = None,
                        n_samples: int = 9) -> LinearizationResult:
    """Fit ``psi(t)`` of the separated points to affine functions of time.

    The expected slopes are ``TIME_SCALE * dH/du_k`` with ``dH/du`` by central
    differences of :func:`hamiltonian_of_u`.  ``energy_gap`` compares that
    ``H`` with the mechanical energy.  The curve is built in extended
    precision (see :func:`spectral_data`).
    """
    settings = settings or QuadratureSettings()
    fam = params.family()
    traj = integrate(params, state0, T, n_samples=n_samples)
    _, u = spectral_data(params, state0, extended=True)
    cfgs = []
    for st in traj.states:
        cfg = separated_points(params, st)
        if np.any(cfg.y == 0):
            raise BranchPointHit("trajectory sample sits on a branch point")
        cfgs.append(cfg)
    psi = abel_jacobi_along(fam, u, cfgs, settings).astype(complex)
    t = traj.times
    A = np.vstack([np.ones_like(t), t]).T
    coef, *_ = np.linalg.lstsq(A.astype(complex), psi, rcond=None)
    fit = np.max(np.abs(A @ coef - psi))
    slopes = coef[1]
    u = u.astype(complex)
    expected = time_scale(params) * _dH_du(params, u)
    err = float(np.max(np.abs(slopes - expected)))
    gap = abs(hamiltonian_of_u(params, u) - energy(params, state0))
    return LinearizationResult(float(fit) + err, float(fit), err, slopes, expected,
                               time_scale(params), t, psi, float(gap))


def turning_time(params: NeumannParams, state: NeumannState) -> float:
    """Time for the fastest separated point to reach the nearest ``c_n`` at its current speed.

    Linearization runs use a fraction of this so that no point turns back
    (passes a branch point) during the sampled window.
    """
    xs = _separated_x(params, state, 1e-10).real
    U = separation_polynomial(params, state)
    Ut = Poly()
    for n in range(len(params.c)):
        Ut = Ut + float(2 * state.q[n] * state.p[n]) * Poly.from_roots(np.delete(params.c, n))
    vel = np.abs(Ut(xs) / U.deriv()(xs))
    P, _ = spectral_data(params, state)
    stops = np.concatenate([params.c, roots(P).real]) if P.degree > 0 else params.c
    dist = np.min(np.abs(xs[:, None] - stops[None, :]), axis=1)
    return float(np.min(dist / np.maximum(vel, 1e-300)))


def random_state(params: NeumannParams, gen: np.random.Generator,
                 speed: float = 1.0) -> NeumannState:
    """Uniform point on the sphere with a Gaussian tangent velocity."""
    q = gen.standard_normal(len(params.c))
    q *= params.r / np.linalg.norm(q)
    p = gen.standard_normal(len(params.c)) * speed
    p -= (q @ p) / (q @ q) * q
    return NeumannState(q, p)
