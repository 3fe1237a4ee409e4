"""Abel-Jacobi map of a configuration, its derivatives, and period data.

``psi_k = sum_j  integral from infinity to (x_j, w_j) of x**(g-k) dx / w``

``psi`` is kept as the raw path sum (no lattice reduction).  Paths are built
by :func:`hyperint.riemann.infinity_path`, so a small change of the
configuration or of ``u`` never changes the homotopy class of the path and
finite differences of ``psi`` are meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchPointCollision, LostTrack, OnBranchPoint
from .riemann import (HyperellipticCurve, QuadratureSettings, _ToBranch, _Budget,
                      _march, _nout, _seg_dist, _tail, branch_pair_period,
                      infinity_path, integrate_from_infinity, integrate_path,
                      plan_path, sigma_integrand, Path)
from .surface import Configuration, SurfaceFamily, cut_curve

__all__ = [
    "AbelJacobiImage",
    "PeriodData",
    "abel_jacobi",
    "abel_jacobi_along",
    "dpsi_dx_analytic",
    "dpsi_dx_fd",
    "dpsi_du",
    "dpsi_du_fd",
    "elementary_periods",
    "cubic_condition_residual",
    "relift_at_u",
    "DPSI_DU_SIGN",
]

#: Sign of the integral representation of d(psi_k)/d(u_l) relative to
#: ``+ integral x^(g-k) x^(g-l) G / (2 F^(3/2)) dx`` (paths from infinity).
#: Differentiating ``F**(-1/2)`` gives -1; this is checked against finite
#: differences in the test suite.
DPSI_DU_SIGN = -1


@dataclass
class AbelJacobiImage:
    psi: np.ndarray
    routes: list = field(default_factory=list)
    base_sheet: int = 1

    def to_dict(self) -> dict:
        return {"psi": [[float(v.real), float(v.imag)] for v in self.psi],
                "base_sheet": self.base_sheet,
                "paths": [r.to_dict() for r in self.routes]}


@dataclass
class PeriodData:
    """Elementary periods ``e[pair, k]`` for a fixed pairing of branch points.

    ``branch_points`` is sorted by real part; a pair ``(i, None)`` is the
    cycle around ``b_i`` and the single point at infinity (odd degree).
    """

    pairs: list
    e: np.ndarray
    branch_points: np.ndarray
    vias: list


def _curve_and_w(family, u, cfg, curve=None):
    curve = curve if curve is not None else cut_curve(family, u)
    w = family.curve_y(cfg)
    F = curve.F(cfg.x)
    bad = np.abs(w * w - F) > 1e-8 * np.maximum(1.0, np.abs(F))
    if np.any(bad):
        raise ValueError("configuration is not on the cut curve")
    return curve, w


def abel_jacobi(family: SurfaceFamily, u, cfg: Configuration,
                settings: QuadratureSettings | None = None,
                base_sheet: int = 1, curve: HyperellipticCurve | None = None) -> AbelJacobiImage:
    """Abel-Jacobi image of ``cfg`` on the curve cut out by ``u``."""
    settings = settings or QuadratureSettings()
    curve, w = _curve_and_w(family, u, cfg, curve)
    integrand = sigma_integrand(curve.genus)
    psi = np.zeros(curve.genus, dtype=curve.F.dtype)
    routes = []
    for x, y in zip(cfg.x, w):
        if y == 0:
            raise OnBranchPoint(f"point x={x} is a branch point")
        route = infinity_path(curve, x, y, base_sheet, settings)
        val, _ = integrate_from_infinity(curve, integrand, route, settings)
        psi += val
        routes.append(route)
    return AbelJacobiImage(psi, routes, base_sheet)


def abel_jacobi_along(family: SurfaceFamily, u, configs,
                      settings: QuadratureSettings | None = None,
                      base_sheet: int = 1) -> np.ndarray:
    """``psi`` along a sampled motion of the points, without period jumps.

    The first sample is mapped from infinity; later ones add the integrals
    along the straight chords travelled by each point since the previous
    sample.  Samples must be close enough for the chords to be homotopic to
    the actual motion.  Returns an array of shape ``(len(configs), g)``.
    """
    settings = settings or QuadratureSettings()
    curve = cut_curve(family, u)
    integrand = sigma_integrand(curve.genus)
    out = [abel_jacobi(family, u, configs[0], settings, base_sheet, curve).psi]
    for prev, cur in zip(configs[:-1], configs[1:]):
        w0, w1 = family.curve_y(prev), family.curve_y(cur)
        inc = np.zeros(curve.genus, dtype=out[-1].dtype)
        for a, b, ya, yb in zip(prev.x, cur.x, w0, w1):
            if a == b:
                continue
            val, y_end = integrate_path(curve, integrand, Path(np.array([a, b]), ya),
                                        settings, check=False)
            if abs(y_end - yb) > 1e-6 * max(1.0, abs(yb)):
                raise LostTrack("sampled motion crossed to the other sheet; refine the samples")
            inc += val
        out.append(out[-1] + inc)
    return np.array(out)


def dpsi_dx_analytic(family: SurfaceFamily, cfg: Configuration) -> np.ndarray:
    """``M[k, j] = x_j**(g-k) / w_j``."""
    g = family.genus
    w = family.curve_y(cfg)
    if np.any(w == 0):
        raise OnBranchPoint("a point of the configuration is a branch point")
    pw = np.arange(g - 1, -1, -1)
    return cfg.x[None, :] ** pw[:, None] / w[None, :]


def relift_at_u(family: SurfaceFamily, u, cfg: Configuration, xs=None) -> Configuration:
    """Points over ``xs`` (default: same x) on the curve of ``u``, sheets kept by proximity."""
    P = family.section(u)
    F = family.curve_poly(P)
    xs = cfg.x if xs is None else np.asarray(xs, dtype=complex)
    w_old = family.curve_y(cfg)
    pts = []
    for x, w0 in zip(xs, w_old):
        r = np.sqrt(complex(F(x)))
        w = r if abs(r - w0) <= abs(r + w0) else -r
        pts.append(family.lift(P, F, complex(x), w))
    return Configuration.from_points(pts)


def dpsi_dx_fd(family: SurfaceFamily, u, cfg: Configuration, h: float = 1e-5,
               settings: QuadratureSettings | None = None, base_sheet: int = 1) -> np.ndarray:
    """Central differences of ``psi`` in ``x_j`` at fixed ``u``."""
    g = family.genus
    out = np.zeros((g, g), dtype=complex)
    for j in range(g):
        vals = []
        for s in (+1, -1):
            xs = cfg.x.copy()
            xs[j] += s * h
            c = relift_at_u(family, u, cfg, xs)
            vals.append(abel_jacobi(family, u, c, settings, base_sheet).psi)
        out[:, j] = (vals[0] - vals[1]) / (2 * h)
    return out


def _dpsi_du_integrand(genus: int, G):
    pw = np.arange(genus - 1, -1, -1)

    def f(x, y):
        xp = x[:, None] ** pw[None, :]
        outer = xp[:, :, None] * xp[:, None, :]
        return (0.5 * DPSI_DU_SIGN * outer * (G(x) / y ** 3)[:, None, None]).reshape(len(x), -1)

    f.nout = genus * genus
    return f


def dpsi_du(family: SurfaceFamily, u, cfg: Configuration,
            settings: QuadratureSettings | None = None, base_sheet: int = 1) -> np.ndarray:
    """``D[k, l] = d psi_k / d u_l`` at fixed ``x_j`` from the integral representation.

    ``dF/du_l = x**(g-l) G(x)``, so ``D = -1/2 sum_j int x^(g-k) x^(g-l) G / w^3 dx``
    along the same paths used for ``psi``.
    """
    settings = settings or QuadratureSettings()
    curve, w = _curve_and_w(family, u, cfg)
    g = curve.genus
    G = family.dF_factor(family.section(u))
    integrand = _dpsi_du_integrand(g, G)
    D = np.zeros(g * g, dtype=complex)
    for x, y in zip(cfg.x, w):
        route = infinity_path(curve, x, y, base_sheet, settings)
        val, _ = integrate_from_infinity(curve, integrand, route, settings)
        D += val
    return D.reshape(g, g)


def dpsi_du_fd(family: SurfaceFamily, u, cfg: Configuration, h: float = 1e-5,
               settings: QuadratureSettings | None = None, base_sheet: int = 1) -> np.ndarray:
    """Central differences of ``psi`` in ``u_l`` (``x_j`` fixed, ``w_j`` re-lifted)."""
    u = np.asarray(u, dtype=complex)
    g = len(u)
    out = np.zeros((g, g), dtype=complex)
    for l in range(g):
        vals = []
        for s in (+1, -1):
            up = u.copy()
            up[l] += s * h
            c = relift_at_u(family, up, cfg)
            vals.append(abel_jacobi(family, up, c, settings, base_sheet).psi)
        out[:, l] = (vals[0] - vals[1]) / (2 * h)
    return out


# -----------------------------------------------------------------------------
# periods

def _pair_via(curve: HyperellipticCurve, bp, i, j):
    """Interior waypoints for the pair, or None if the straight segment is clear."""
    bi, bj = bp[i], bp[j]
    rho = curve.clearance
    clear = all(_seg_dist(bi, bj, b) >= rho for n, b in enumerate(bp) if n not in (i, j))
    if clear:
        return None
    d = (bj - bi) / abs(bj - bi)
    w1, w2 = bi + 1.5 * rho * d, bj - 1.5 * rho * d
    return plan_path(curve, w1, w2)


def _infinity_period(curve: HyperellipticCurve, bp, i, settings, ref_y=None):
    """``2 * integral from b_i to infinity`` (odd degree: a closed cycle)."""
    g = curve.genus
    integrand = sigma_integrand(g)
    nout = _nout(integrand)
    budget = _Budget(settings)
    R = curve.radius
    b = bp[i]
    d = (R - b) / abs(R - b)
    w1 = complex(b + 1.5 * curve.clearance * d)
    wp = plan_path(curve, w1, R)
    y0 = np.sqrt(complex(curve.F(w1)))
    if ref_y is not None and abs(y0 - ref_y) > abs(y0 + ref_y):
        y0 = -y0
    first = _ToBranch(curve.factored, w1, b)
    v_first, _ = _march(first, y0 / first.c, integrand, settings, budget, nout)
    v_mid, yR = integrate_path(curve, integrand, Path(wp, y0), settings, budget, check=False)
    tail, yT = _tail(curve, integrand, 1, settings, budget, R)
    v_tail = -tail if abs(yR - yT) < abs(yR + yT) else tail
    return 2.0 * (-v_first + v_mid + v_tail), wp


def _period_ref_y(curve, bp, pair, via):
    i, j = pair
    if j is None:
        R = curve.radius
        b = complex(bp[i])
        w1 = b + 1.5 * curve.clearance * (R - b) / abs(R - b)
        return np.sqrt(complex(curve.F(w1)))
    if via is None:
        return np.sqrt(complex(curve.F(0.5 * (bp[i] + bp[j]))))
    return np.sqrt(complex(curve.F(via[0])))


def pair_period(curve: HyperellipticCurve, bp, pair, settings, ref_y=None):
    """Periods of all ``sigma_k`` over the cycle of ``pair``; returns ``(e, via)``."""
    i, j = pair
    if j is None:
        e, via = _infinity_period(curve, bp, i, settings, ref_y)
        return e, via
    via = _pair_via(curve, bp, i, j)
    e = branch_pair_period(curve, None, i, j, settings, via=via, ref_y=ref_y, branch_points=bp)
    return e, via


def sorted_branch_points(curve: HyperellipticCurve) -> np.ndarray:
    b = np.asarray(curve.branch_points)
    return b[np.lexsort((b.imag, b.real))]


def default_pairs(nb: int) -> list:
    pairs = [(2 * i, 2 * i + 1) for i in range(nb // 2)]
    if nb % 2:
        pairs.append((nb - 1, None))
    return pairs


def elementary_periods(family: SurfaceFamily, u,
                       settings: QuadratureSettings | None = None) -> PeriodData:
    """Periods over consecutive pairs of branch points sorted by real part."""
    settings = settings or QuadratureSettings()
    curve = cut_curve(family, u)
    bp = sorted_branch_points(curve)
    pairs = default_pairs(len(bp))
    rows, vias = [], []
    for p in pairs:
        e, via = pair_period(curve, bp, p, settings)
        rows.append(e)
        vias.append(via)
    return PeriodData(pairs, np.array(rows), bp, vias)


def match_branch_points(ref: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Reorder ``new`` to follow ``ref`` by nearest neighbours."""
    d = np.abs(ref[:, None] - new[None, :])
    idx = np.argmin(d, axis=1)
    if len(set(idx.tolist())) != len(ref):
        raise BranchPointCollision("perturbed branch points cannot be matched one-to-one")
    sep = np.abs(ref[:, None] - ref[None, :])
    sep[np.diag_indices_from(sep)] = np.inf
    if np.max(d[np.arange(len(ref)), idx]) > 0.25 * sep.min():
        raise BranchPointCollision("perturbation moved a branch point too far")
    return new[idx]


def period_derivatives(family: SurfaceFamily, u, pair, h: float = 1e-4,
                       settings: QuadratureSettings | None = None,
                       extended: bool = True) -> np.ndarray:
    """``A[k, l] = d e_k / d u_l`` by central differences.

    With ``extended`` the perturbed periods are computed in ``clongdouble``
    (see :func:`hyperint.symplectic.coordinate_jacobian`).
    """
    settings = settings or QuadratureSettings()
    u = np.asarray(u, dtype=complex)
    g = len(u)
    curve0 = cut_curve(family, u)
    bp0 = sorted_branch_points(curve0)
    via0 = None if pair[1] is None else _pair_via(curve0, bp0, *pair)
    ref_y = _period_ref_y(curve0, bp0, pair, via0)
    work = u.astype(np.clongdouble if extended else complex)
    A = np.zeros((g, g), dtype=complex)
    for l in range(g):
        vals = []
        for s in (+1, -1):
            up = work.copy()
            up[l] += s * h
            c = cut_curve(family, up)
            bp = match_branch_points(bp0, np.asarray(c.branch_points))
            e, _ = pair_period(c, bp, pair, settings, ref_y=ref_y)
            vals.append(e)
        A[:, l] = ((vals[0] - vals[1]) / (2 * h)).astype(complex)
    return A


def cubic_condition_residual(family: SurfaceFamily, u, pair, h: float = 1e-4,
                             settings: QuadratureSettings | None = None,
                             extended: bool = True) -> float:
    """``max |A - A^T| / max |A|`` for ``A[k, l] = d e_k / d u_l`` over one cycle."""
    A = period_derivatives(family, u, pair, h, settings, extended)
    return float(np.max(np.abs(A - A.T)) / np.max(np.abs(A)))
