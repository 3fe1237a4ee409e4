"""Symplectic form on the symmetric product and the linear flows of ``u``.

Coordinates of a configuration are ordered ``(a_1, b_1, ..., a_g, b_g)``
where ``(a_j, b_j)`` are the family's local coordinates of point ``j``:
``(z_j, x_j)`` for the Weierstrass, double-cover and Neumann families and
``(y_j, x_j)`` for Seiberg-Witten.  In these coordinates

    Omega = sum_j  da_j ^ db_j / y_j .

The Poisson bracket is its inverse,

    {F, G} = BRACKET_SIGN * sum_j y_j (dF/db_j dG/da_j - dF/da_j dG/db_j),

and time evolution is ``dF/dt = {F, H}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .abel_jacobi import abel_jacobi, abel_jacobi_along
from .errors import BranchApproach, NonConvergence
from .riemann import QuadratureSettings
from .surface import (Configuration, SeibergWitten, SurfaceFamily, cut_curve,
                      interpolation_gradients, points_to_u)

__all__ = [
    "BRACKET_SIGN",
    "omega_matrix",
    "canonical_form",
    "coordinate_jacobian",
    "canonical_residual",
    "CanonicalStudy",
    "canonical_study",
    "poisson_bracket",
    "involutivity_residual",
    "hamiltonian_vector_field",
    "calibrate_bracket_sign",
    "FlowTrajectory",
    "integrate_flow",
    "flow_time_scale",
]

#: With this sign the flow of ``u_m`` gives ``d psi_k / dt = +delta_{mk}``.
BRACKET_SIGN = 1


def omega_matrix(family: SurfaceFamily, cfg: Configuration) -> np.ndarray:
    g = len(cfg)
    m = np.zeros((2 * g, 2 * g), dtype=complex)
    for j, p in enumerate(cfg.points()):
        w = family.weight(p)
        m[2 * j, 2 * j + 1] = w
        m[2 * j + 1, 2 * j] = -w
    return m


def canonical_form(g: int) -> np.ndarray:
    """Matrix of ``sum_k du_k ^ dpsi_k`` in the order ``(u_1..u_g, psi_1..psi_g)``."""
    K = np.zeros((2 * g, 2 * g))
    K[:g, g:] = np.eye(g)
    K[g:, :g] = -np.eye(g)
    return K


def _coord_steps(a, b, h):
    return h * np.maximum(1.0, np.abs(a)), h * np.maximum(1.0, np.abs(b))


def _u_psi(family, cfg, settings, base_sheet):
    u = points_to_u(family, cfg)
    psi = abel_jacobi(family, u, cfg, settings, base_sheet).psi
    return np.concatenate([u, psi])


def coordinate_jacobian(family: SurfaceFamily, cfg: Configuration, h: float = 1e-5,
                        settings: QuadratureSettings | None = None,
                        base_sheet: int = 1, extended: bool = True) -> np.ndarray:
    """Central-difference Jacobian of ``(a, b) -> (u, psi)``.

    Each coordinate gets the step ``h * max(1, |coordinate|)``; the ``y`` of
    the moved point is re-lifted on its own sheet.  The displaced coordinates
    are rounded to double precision and the step is taken as their exact
    difference, so every path endpoint is representable.  With ``extended``
    the values ``u`` and ``psi`` at the displaced configurations are computed
    in ``clongdouble``: the difference quotient then loses about three fewer
    digits to cancellation, which keeps the truncation error visible down to
    small ``h``.  Where ``clongdouble`` is plain double this changes nothing.
    """
    g = len(cfg)
    a, b = family.local_coords(cfg)
    a, b = a.astype(complex), b.astype(complex)
    ha, hb = _coord_steps(a, b, h)
    dt = np.dtype(np.clongdouble if extended else np.complex128)
    work = cfg.astype(dt)
    J = np.zeros((2 * g, 2 * g), dtype=complex)
    for j in range(g):
        for col, (da, db) in ((2 * j, (ha[j], 0.0)), (2 * j + 1, (0.0, hb[j]))):
            ap, bp = a[j] + da, b[j] + db
            am, bm = a[j] - da, b[j] - db
            plus = family.relift(work, j, dt.type(ap), dt.type(bp))
            minus = family.relift(work, j, dt.type(am), dt.type(bm))
            step = (ap - am) if da else (bp - bm)
            diff = (_u_psi(family, plus, settings, base_sheet)
                    - _u_psi(family, minus, settings, base_sheet))
            J[:, col] = (diff / dt.type(step)).astype(complex)
    return J


def canonical_residual(family: SurfaceFamily, u, cfg: Configuration, h: float = 1e-5,
                       settings: QuadratureSettings | None = None,
                       base_sheet: int = 1) -> float:
    """``||J^T K J - Omega||_inf / ||Omega||_inf`` for the pullback of ``sum du ^ dpsi``."""
    _check_on_curve(family, u, cfg)
    J = coordinate_jacobian(family, cfg, h, settings, base_sheet)
    return _pullback_residual(family, cfg, J)


def _check_on_curve(family, u, cfg):
    u_cfg = points_to_u(family, cfg)
    if np.max(np.abs(u_cfg - np.asarray(u))) > 1e-8 * max(1.0, np.max(np.abs(u))):
        raise ValueError("configuration does not lie on the curve of u")


def _pullback_residual(family, cfg, J) -> float:
    K = canonical_form(len(cfg))
    Om = omega_matrix(family, cfg)
    pull = J.T @ K @ J
    return float(np.linalg.norm(pull - Om, np.inf) / np.linalg.norm(Om, np.inf))


@dataclass
class CanonicalStudy:
    """Residuals at ``h`` and ``h/2`` and with the Richardson-extrapolated Jacobian.

    Central differences make the residual second order in ``h``, so
    ``ratio`` should be close to 4.  ``extrapolated`` uses
    ``(4 J(h/2) - J(h)) / 3``, which removes the leading truncation term and
    shows how much of ``residual`` is truncation rather than a defect of
    the identity.
    """

    h: float
    residual: float
    residual_half: float
    extrapolated: float

    @property
    def ratio(self) -> float:
        return self.residual / self.residual_half if self.residual_half > 0 else float("inf")


def canonical_study(family: SurfaceFamily, u, cfg: Configuration, h: float = 1e-5,
                    settings: QuadratureSettings | None = None,
                    base_sheet: int = 1) -> CanonicalStudy:
    _check_on_curve(family, u, cfg)
    J1 = coordinate_jacobian(family, cfg, h, settings, base_sheet)
    J2 = coordinate_jacobian(family, cfg, h / 2, settings, base_sheet)
    return CanonicalStudy(h, _pullback_residual(family, cfg, J1),
                          _pullback_residual(family, cfg, J2),
                          _pullback_residual(family, cfg, (4 * J2 - J1) / 3))


# -----------------------------------------------------------------------------
# brackets

def _fd_gradient(family, F, cfg, h):
    a, b = family.local_coords(cfg)
    ha, hb = _coord_steps(a, b, h)
    g = len(cfg)
    da = np.zeros(g, dtype=complex)
    db = np.zeros(g, dtype=complex)
    for j in range(g):
        da[j] = (F(family.relift(cfg, j, a[j] + ha[j], b[j]))
                 - F(family.relift(cfg, j, a[j] - ha[j], b[j]))) / (2 * ha[j])
        db[j] = (F(family.relift(cfg, j, a[j], b[j] + hb[j]))
                 - F(family.relift(cfg, j, a[j], b[j] - hb[j]))) / (2 * hb[j])
    return da, db


def poisson_bracket(family: SurfaceFamily, Fval: Callable | None, Gval: Callable | None,
                    cfg: Configuration, h: float = 1e-5,
                    F_grad=None, G_grad=None) -> complex:
    """``{F, G}`` at ``cfg``.

    ``Fval``/``Gval`` map a :class:`Configuration` to a number and are
    differentiated by central differences unless ``(d/da, d/db)`` arrays are
    passed as ``F_grad``/``G_grad``.
    """
    fa, fb = F_grad if F_grad is not None else _fd_gradient(family, Fval, cfg, h)
    ga, gb = G_grad if G_grad is not None else _fd_gradient(family, Gval, cfg, h)
    y = cfg.y
    return complex(BRACKET_SIGN * np.sum(y * (fb * ga - fa * gb)))


def involutivity_residual(family: SurfaceFamily, u, cfg: Configuration,
                          h: float | None = None) -> float:
    """``max |{u_j, u_k}|`` relative to the size of the terms that cancel.

    Gradients of ``u`` are the exact interpolation derivatives unless ``h``
    is given, in which case central differences are used.
    """
    g = len(cfg)
    if h is None:
        da, db = interpolation_gradients(family, cfg)
    else:
        da = np.zeros((g, g), dtype=complex)
        db = np.zeros((g, g), dtype=complex)
        for k in range(g):
            da[k], db[k] = _fd_gradient(family, lambda c, k=k: points_to_u(family, c)[k], cfg, h)
    y = cfg.y
    worst = 0.0
    for j in range(g):
        for k in range(j + 1, g):
            br = poisson_bracket(family, None, None, cfg, F_grad=(da[j], db[j]), G_grad=(da[k], db[k]))
            scale = np.sum(np.abs(y) * (np.abs(db[j] * da[k]) + np.abs(da[j] * db[k])))
            worst = max(worst, abs(br) / scale if scale > 0 else abs(br))
    return worst


# -----------------------------------------------------------------------------
# flows

def hamiltonian_vector_field(family: SurfaceFamily, cfg: Configuration, coeffs) -> tuple:
    """``(da/dt, db/dt)`` for ``H = sum_m coeffs[m] u_m``."""
    da_u, db_u = interpolation_gradients(family, cfg)
    coeffs = np.asarray(coeffs, dtype=complex)
    dH_da = coeffs @ da_u
    dH_db = coeffs @ db_u
    y = cfg.y
    return -BRACKET_SIGN * y * dH_db, BRACKET_SIGN * y * dH_da


def _unit(g, m):
    e = np.zeros(g, dtype=complex)
    e[m] = 1.0
    return e


def calibrate_bracket_sign(family: SurfaceFamily, cfg: Configuration, m: int = 0,
                           eps: float = 1e-5,
                           settings: QuadratureSettings | None = None) -> int:
    """Sign ``s`` with ``d psi_m/dt = s`` along the flow of ``u_m``, from finite differences."""
    g = len(cfg)
    va, vb = hamiltonian_vector_field(family, cfg, _unit(g, m))
    a, b = family.local_coords(cfg)
    vals = []
    for s in (+1, -1):
        c = cfg
        for j in range(g):
            c = family.relift(c, j, a[j] + s * eps * va[j], b[j] + s * eps * vb[j])
        u = points_to_u(family, c)
        vals.append(abel_jacobi(family, u, c, settings).psi[m])
    rate = (vals[0] - vals[1]) / (2 * eps)
    return 1 if rate.real > 0 else -1


@dataclass
class FlowTrajectory:
    times: np.ndarray
    states: list
    u_series: np.ndarray
    psi_series: np.ndarray
    flow_index: int = 0
    stopped_early: bool = False
    meta: dict = field(default_factory=dict)


def _surface_y_rate(family, x, z, y, xd, zd):
    """``dy/dt`` from ``2 y y' = S_x x' + S_z z'`` for ``y^2 = S(x, z)``."""
    Sx, Sz = family_surface_gradient(family, x, z)
    return (Sx * xd + Sz * zd) / (2 * y)


def family_surface_gradient(family, x, z):
    from .surface import DoubleCoverK3, NeumannRational, _Weierstrass
    if isinstance(family, _Weierstrass):
        return family.f.deriv()(x) * z + family.g.deriv()(x), 3 * z * z + family.f(x)
    if isinstance(family, DoubleCoverK3):
        return family.F2.dx()(x, z), family.F2.dz()(x, z)
    if isinstance(family, NeumannRational):
        return z * family.Q.deriv()(x), family.Q(x)
    raise TypeError(f"no (x, z) surface gradient for {family.tag}")


def flow_time_scale(family: SurfaceFamily, cfg: Configuration, m: int) -> float:
    """Time for the fastest point to cover its distance to the nearest branch point."""
    curve = cut_curve(family, points_to_u(family, cfg))
    va, vb = hamiltonian_vector_field(family, cfg, _unit(len(cfg), m))
    dist = np.min(np.abs(cfg.x[:, None] - curve.branch_points[None, :]), axis=1)
    speed = np.abs(vb)
    return float(np.min(dist / np.maximum(speed, 1e-300)))


def integrate_flow(family: SurfaceFamily, cfg0: Configuration, m: int, T: float,
                   settings: QuadratureSettings | None = None, n_samples: int = 11,
                   rtol: float = 1e-10, atol: float = 1e-12, coeffs=None,
                   with_psi: bool = True) -> FlowTrajectory:
    """Flow of ``u_m`` (0-based ``m``) or of ``sum coeffs u`` for time ``T``.

    The state is ``(x, z, y)`` (``(x, y)`` for Seiberg-Witten) integrated with
    the embedded Dormand-Prince 8(5,3) scheme.  Integration stops early if a
    point gets within ``|w|^2 < 1e-6 * scale`` of a branch point; the partial
    trajectory is attached to the raised :class:`BranchApproach`.
    """
    g = len(cfg0)
    c = _unit(g, m) if coeffs is None else np.asarray(coeffs, dtype=complex)
    sw = isinstance(family, SeibergWitten)
    w0 = family.curve_y(cfg0)
    scale = float(np.max(np.abs(w0) ** 2))

    def unpack(v):
        x = v[:g]
        if sw:
            y = v[g:2 * g]
            return Configuration(x, y, family.Q(x) / y)
        return Configuration(x, v[2 * g:3 * g], v[g:2 * g])

    def pack(cf):
        if sw:
            return np.concatenate([cf.x, cf.y])
        return np.concatenate([cf.x, cf.z, cf.y])

    def rhs(t, v):
        cf = unpack(v)
        va, vb = hamiltonian_vector_field(family, cf, c)
        if sw:
            return np.concatenate([vb, va])
        yd = _surface_y_rate(family, cf.x, cf.z, cf.y, vb, va)
        return np.concatenate([vb, va, yd])

    def near_branch(t, v):
        w = family.curve_y(unpack(v))
        return float(np.min(np.abs(w) ** 2) - 1e-6 * scale)

    near_branch.terminal = True
    near_branch.direction = -1

    times = np.linspace(0.0, T, n_samples) if T > 0 else np.array([0.0])
    if T > 0:
        sol = solve_ivp(rhs, (0.0, T), pack(cfg0), method="DOP853", t_eval=times,
                        rtol=rtol, atol=atol, events=near_branch)
        if sol.status == -1:
            raise NonConvergence(f"flow integration failed: {sol.message}")
        ts = sol.t
        states = [unpack(sol.y[:, i]) for i in range(len(ts))]
        stopped = sol.status == 1
    else:
        ts, states, stopped = times, [cfg0.copy()], False
    us = np.array([points_to_u(family, s) for s in states])
    # psi is continued sample to sample so that it never jumps by a period
    psis = abel_jacobi_along(family, us[0], states, settings).astype(complex) \
        if with_psi else np.zeros((len(states), g), complex)
    traj = FlowTrajectory(np.asarray(ts), states, us, psis, m, stopped)
    if stopped:
        raise BranchApproach(f"flow stopped near a branch point at t={ts[-1]:.4g}", traj)
    return traj
