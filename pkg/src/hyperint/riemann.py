"""Analytic continuation and contour integration on ``y**2 = F(x)``.

Sheets are never described by a global branch cut.  A value of ``y`` is
always carried along an explicit path in the ``x``-plane, and at every step
the square root closest to the previous value is taken.  The quadrature
driver does the same thing piecewise: on a parameter interval ``[s0, s1]``
the tracked root is written ``root(s) = root(s0) * sqrt(rad(s)/rad(s0))`` with
the principal square root, which is only accepted while the ratio stays
within ``|sqrt(ratio) - 1| <= 0.3`` at every node.

Three kinds of path pieces share that driver:

* straight segments ``x = A + (B - A) s``;
* the tail from a point at infinity, ``x = 1/t`` (even degree) or
  ``x = 1/t**2`` (odd degree), which makes ``x**(g-k) dx / y`` regular;
* segments ending at a branch point, with ``x = b + (w - b) s**2`` or the
  ``cos`` substitution between two branch points, which remove the
  inverse square-root endpoint singularity.

Base points at infinity (even degree): sheet ``+1`` is the one on which
``y / x**(g+1) -> +sqrt(leading)`` (principal root) along the positive real
axis; sheet ``-1`` is its image under the hyperelliptic involution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (ClearanceViolation, LostTrack, OnBranchPoint,
                     PathThroughBranchPoint, SingularCurve, DegenerateLeading,
                     ToleranceNotMet)
from .poly import Poly, cdtype, roots

__all__ = [
    "HyperellipticCurve",
    "SheetPoint",
    "Path",
    "QuadratureSettings",
    "continue_y",
    "plan_path",
    "sigma_integrand",
    "integrate_differential",
    "integrate_path",
    "integrate_from_infinity",
    "integrate_to_infinity",
    "branch_pair_period",
    "large_circle_integral",
]

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_MAX_ROOT_STEP = 0.3


def _gauss_legendre(n: int, dtype=np.float64):
    """Gauss-Legendre rule on [-1, 1]; nodes Newton-polished in ``dtype``."""
    x0, _ = np.polynomial.legendre.leggauss(n)
    x = x0.astype(dtype)
    for _ in range(3):
        p0, p1 = np.ones_like(x), x
        for k in range(2, n + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = n * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    p0, p1 = np.ones_like(x), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w


_RULES = {np.dtype(np.complex128): (_gauss_legendre(20), _gauss_legendre(10))}
if np.dtype(np.clongdouble) != np.dtype(np.complex128):
    _RULES[np.dtype(np.clongdouble)] = (_gauss_legendre(20, np.longdouble),
                                        _gauss_legendre(10, np.longdouble))


def geometric_scale(pts: np.ndarray) -> float:
    a = np.abs(np.asarray(pts))
    a = a[a > 0]
    if a.size == 0:
        return 1.0
    return float(np.exp(np.mean(np.log(a))))


def _double_root_spread(F: Poly, bp: np.ndarray, i: int, j: int) -> float:
    """How far rounding alone splits a double root at the midpoint of ``bp[i], bp[j]``.

    Writing ``F = (x - a)(x - b) G``, an evaluation error ``e`` in ``F`` moves a
    double root by about ``sqrt(e/|G|)``.  Pairs closer than a few times this
    are numerically one root.
    """
    m = 0.5 * (bp[i] + bp[j])
    rest = np.delete(bp, [i, j])
    # the estimate assumes the pair is isolated from the other roots
    if rest.size and abs(bp[i] - bp[j]) > 0.1 * float(np.min(np.abs(rest - m))):
        return 0.0
    eps = float(np.finfo(F.dtype).eps)
    err = eps * float(np.sum(np.abs(F.coeffs) * np.abs(m) ** np.arange(len(F.coeffs))))
    G = abs(complex(F.leading * np.prod(m - rest)))
    if G == 0:
        return np.inf
    return float(np.sqrt(err / G))


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 2 ** 14

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_subdivisions < 1:
            raise ValueError("quadrature tolerances must be positive")

    def scaled(self, factor: float) -> "QuadratureSettings":
        return QuadratureSettings(self.rel_tol * factor, self.abs_tol * factor,
                                  self.max_subdivisions)


class FactoredPoly:
    """``lead * prod (x - r_i)``.

    Near a cluster of roots the monomial form loses digits to cancellation
    while the product stays accurate relative to its value, which the error
    estimate of the quadrature needs.
    """

    def __init__(self, lead, roots_):
        self.roots = np.asarray(roots_)
        self.lead = np.asarray(lead, dtype=cdtype(lead, self.roots))[()]

    @property
    def dtype(self):
        return cdtype(self.lead, self.roots)

    def __call__(self, x):
        x = np.asarray(x)
        out = self.lead * np.prod(x[..., None] - self.roots, axis=-1)
        return out[()]

    def without(self, *pts) -> "FactoredPoly":
        """Deflate by the roots nearest to ``pts``."""
        keep = np.ones(len(self.roots), dtype=bool)
        for p in pts:
            d = np.abs(self.roots - p)
            d[~keep] = np.inf
            keep[int(np.argmin(d))] = False
        return FactoredPoly(self.lead, self.roots[keep])


@dataclass(frozen=True, eq=False)
class HyperellipticCurve:
    """The curve ``y**2 = F(x)`` together with its branch points."""

    F: Poly
    genus: int
    branch_points: np.ndarray

    @classmethod
    def from_poly(cls, F: Poly, genus: int | None = None,
                  sep_tol: float = 1e-8) -> "HyperellipticCurve":
        d = F.degree
        if genus is None:
            genus = (d - 1) // 2
        if d < 2 * genus + 1:
            raise DegenerateLeading(
                f"deg F = {d} is below 2g+1 = {2 * genus + 1}")
        if d > 2 * genus + 2:
            raise ValueError(f"deg F = {d} too large for genus {genus}")
        bp = roots(F)
        scale = geometric_scale(bp)
        for i in range(len(bp)):
            for j in range(i + 1, len(bp)):
                d = abs(bp[i] - bp[j])
                if d < sep_tol * scale or d < 10 * _double_root_spread(F, bp, i, j):
                    raise SingularCurve(
                        f"branch points {complex(bp[i]):.6g} and {complex(bp[j]):.6g} collide")
        bp.setflags(write=False)
        return cls(F, genus, bp)

    @property
    def degree(self) -> int:
        return self.F.degree

    @property
    def factored(self) -> FactoredPoly:
        """``F`` as ``leading * prod (x - b)``; used on every finite path piece."""
        return FactoredPoly(self.F.leading, self.branch_points)

    @property
    def leading(self) -> complex:
        return self.F.leading

    @property
    def even(self) -> bool:
        return self.F.degree % 2 == 0

    @property
    def min_separation(self) -> float:
        b = self.branch_points
        d = np.abs(b[:, None] - b[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())

    @property
    def clearance(self) -> float:
        return 0.1 * self.min_separation

    @property
    def radius(self) -> float:
        return 4.0 * max(float(np.max(np.abs(self.branch_points))), 0.25)

    def y_squared(self, x):
        return self.F(x)

    def sheet_y(self, x: complex, ref: complex) -> complex:
        """The square root of ``F(x)`` closest to ``ref``."""
        r = np.sqrt(complex(self.F(x)))
        return r if abs(r - ref) <= abs(r + ref) else -r


@dataclass(frozen=True)
class SheetPoint:
    x: complex
    y: complex


@dataclass
class Path:
    """Polyline in the x-plane with the sheet fixed at the first waypoint."""

    waypoints: np.ndarray
    start_y: complex

    def __post_init__(self):
        self.waypoints = np.asarray(self.waypoints, dtype=complex).ravel()

    def reversed(self, end_y: complex) -> "Path":
        return Path(self.waypoints[::-1].copy(), end_y)


# -----------------------------------------------------------------------------
# geometry helpers

def _seg_dist(a: complex, b: complex, p: complex) -> float:
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(a + t * d - p)


def check_clearance(curve: HyperellipticCurve, waypoints: np.ndarray,
                    clearance: float | None = None) -> None:
    rho = curve.clearance if clearance is None else clearance
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        for bp in curve.branch_points:
            allowed = min(rho, 0.9 * abs(a - bp), 0.9 * abs(b - bp))
            if _seg_dist(a, b, bp) < allowed:
                raise ClearanceViolation(
                    f"segment {a:.4g} -> {b:.4g} passes within "
                    f"{_seg_dist(a, b, bp):.3g} of branch point {bp:.4g}")


def _arc(center: complex, radius: float, a0: float, a1: float) -> list[complex]:
    n = max(2, int(math.ceil(abs(a1 - a0) / (math.pi / 16))))
    return [center + radius * np.exp(1j * (a0 + (a1 - a0) * i / n)) for i in range(1, n + 1)]


def _short_sweep(a0: float, a1: float) -> float:
    d = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    if abs(abs(d) - math.pi) < 1e-12:
        d = math.pi
    return a0 + d


def plan_path(curve: HyperellipticCurve, A: complex, B: complex) -> np.ndarray:
    """Waypoints from ``A`` to ``B`` keeping clear of the branch points.

    The straight segment is used where it is clear.  Around a branch point
    closer than the detour radius the segment is replaced by an arc on the
    same side of the branch point as the segment itself (short way round),
    so the result is homotopic to the straight segment.
    """
    A = complex(A)
    B = complex(B)
    rho = 1.1 * curve.clearance
    L = abs(B - A)
    if L == 0:
        return np.array([A])
    u = (B - A) / L
    events = []
    for b in curve.branch_points:
        rel = (b - A) * u.conjugate()
        t, d = rel.real, rel.imag
        if abs(d) >= rho:
            continue
        hc = math.sqrt(rho * rho - d * d)
        a_in, a_out = abs(A - b) < rho, abs(B - b) < rho
        if a_in and a_out:
            continue
        if not a_in and (t + hc <= 0 or t - hc >= L):
            continue
        events.append((t - hc, t + hc, b, a_in, a_out))
    events.sort(key=lambda e: e[0])
    pts = [A]
    for t_in, t_out, b, a_in, a_out in events:
        if a_in:
            ang0 = math.atan2((A - b).imag, (A - b).real)
            pts.append(b + rho * np.exp(1j * ang0))
        else:
            p_in = A + t_in * u
            pts.append(p_in)
            ang0 = math.atan2((p_in - b).imag, (p_in - b).real)
        if a_out:
            ang1 = math.atan2((B - b).imag, (B - b).real)
        else:
            p_out = A + t_out * u
            ang1 = math.atan2((p_out - b).imag, (p_out - b).real)
        pts.extend(_arc(b, rho, ang0, _short_sweep(ang0, ang1)))
    pts.append(B)
    out = [pts[0]]
    for p in pts[1:]:
        if abs(p - out[-1]) > 1e-15 * max(1.0, abs(p)):
            out.append(p)
    return np.array(out, dtype=complex)


# -----------------------------------------------------------------------------
# continuation along a polyline

def continue_y(curve: HyperellipticCurve, path: Path, check: bool = True) -> complex:
    """Carry ``path.start_y`` along the polyline and return ``y`` at its end."""
    wp = path.waypoints
    y = complex(path.start_y)
    F = curve.F
    res = abs(y * y - F(wp[0]))
    if res > 1e-8 * max(1.0, abs(F(wp[0])), abs(y) ** 2):
        raise ValueError("start_y is not on the curve at the first waypoint")
    if check:
        check_clearance(curve, wp)
    for a, b in zip(wp[:-1], wp[1:]):
        s, h = 0.0, 1.0 / 16
        while s < 1.0:
            s1 = min(1.0, s + h)
            r = np.sqrt(complex(F(a + (b - a) * s1)))
            dp, dm = abs(r - y), abs(r + y)
            if abs(dp - dm) <= 1e-13 * max(abs(y), abs(r), 1e-300):
                raise LostTrack(f"branches equidistant at x={a + (b - a) * s1}")
            cand = r if dp < dm else -r
            if abs(cand - y) > _MAX_ROOT_STEP * abs(y):
                h *= 0.5
                if h < 1e-14:
                    raise LostTrack("continuation step underflow near a branch point")
                continue
            y, s = cand, s1
            h = min(2 * h, 1.0 / 4)
    return y


# -----------------------------------------------------------------------------
# quadrature driver

def _deflate(F, *pts):
    """``F / prod (x - p)`` for branch points ``pts`` of ``F``."""
    if isinstance(F, FactoredPoly):
        return F.without(*pts)
    q, _ = F.divmod(Poly.from_roots(list(pts)))
    return q


class _Piece:
    """Parameterization ``s in [0, 1] -> x`` with a tracked square root."""

    def x(self, s):
        raise NotImplementedError

    def dx(self, s):
        raise NotImplementedError

    def rad(self, s):
        raise NotImplementedError

    def y(self, s, root):
        return root


class _Segment(_Piece):
    def __init__(self, F, a: complex, b: complex):
        # endpoints in the working precision so that x(1) == b exactly
        a, b = F.dtype.type(a), F.dtype.type(b)
        self.F, self.a, self.d = F, a, b - a

    def x(self, s):
        return self.a + self.d * s

    def dx(self, s):
        return self.d + 0 * np.asarray(s)

    def rad(self, s):
        return self.F(self.x(s))


class _Tail(_Piece):
    """From infinity (s = 0) to ``x = R`` on the positive real axis."""

    def __init__(self, curve: HyperellipticCurve, R: float):
        self.deg = curve.degree
        self.rev = curve.F.reversed(self.deg)
        self.odd = bool(self.deg % 2)
        R = np.finfo(curve.F.dtype).dtype.type(R)
        self.tmax = R ** -0.5 if self.odd else 1 / R

    def _t(self, s):
        return self.tmax * np.asarray(s)

    def x(self, s):
        t = self._t(s)
        return 1.0 / t ** 2 if self.odd else 1.0 / t

    def dx(self, s):
        t = self._t(s)
        return (-2.0 / t ** 3 if self.odd else -1.0 / t ** 2) * self.tmax

    def rad(self, s):
        t = self._t(s)
        return self.rev(t * t if self.odd else t)

    def y(self, s, root):
        t = self._t(s)
        return root * t ** (-float(self.deg) if self.odd else -0.5 * self.deg)


class _ToBranch(_Piece):
    """From ``w`` (s = 0) into the simple branch point ``b`` (s = 1)."""

    def __init__(self, F: Poly, w: complex, b: complex):
        b = F.dtype.type(b)
        self.Fb, self.w, self.b = _deflate(F, b), w, b
        self.c = np.sqrt(w - b)

    def x(self, s):
        return self.b + (self.w - self.b) * (1.0 - s) ** 2

    def dx(self, s):
        return -2.0 * (self.w - self.b) * (1.0 - s)

    def rad(self, s):
        return self.Fb(self.x(s))

    def y(self, s, root):
        return self.c * (1.0 - s) * root


class _CosHalf(_Piece):
    """Half of the segment ``b_i -> b_j`` under ``x = m + h cos(theta)``.

    ``s = 0`` is the midpoint; ``direction`` +1 runs towards ``b_i``
    (theta -> pi), -1 towards ``b_j`` (theta -> 0).
    """

    def __init__(self, F: Poly, bi: complex, bj: complex, direction: int):
        self.H = _deflate(F, bi, bj)
        self.m, self.h = 0.5 * (bi + bj), 0.5 * (bj - bi)
        self.sgn = direction

    def _theta(self, s):
        return 0.5 * np.pi * (1.0 + self.sgn * np.asarray(s))

    def x(self, s):
        return self.m + self.h * np.cos(self._theta(s))

    def dx(self, s):
        return -self.h * np.sin(self._theta(s)) * (0.5 * np.pi * self.sgn)

    def rad(self, s):
        return self.H(self.x(s))

    def y(self, s, root):
        return 1j * self.h * np.sin(self._theta(s)) * root


class _Budget:
    def __init__(self, settings: QuadratureSettings):
        self.left = settings.max_subdivisions

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise ToleranceNotMet("subdivision budget exhausted")


def _march(piece: _Piece, root0: complex, integrand: Integrand,
           settings: QuadratureSettings, budget: _Budget, nout: int):
    """Integrate ``integrand(x, y) dx`` over the piece, tracking the root.

    Returns ``(value, root_at_end)``.  The working precision follows the
    polynomial: extended-precision coefficients give an extended-precision
    result.
    """
    s, h = 0.0, 0.25
    rad0 = piece.rad(np.array([0.0]))[0]
    dt = cdtype(rad0, root0)
    rt = np.finfo(dt).dtype.type
    total = np.zeros(nout, dtype=dt)
    root = dt.type(root0)
    (n20, w20), (n10, w10) = _RULES[dt]
    while s < 1.0:
        s1 = min(1.0, s + h)
        if s1 - s < 1e-15:
            raise ToleranceNotMet("quadrature step underflow")
        budget.spend()
        half, mid = rt(0.5) * (s1 - s), rt(0.5) * (s1 + s)
        nodes = np.concatenate([mid + half * n20, mid + half * n10, np.array([s1], rt)])
        rads = piece.rad(nodes)
        ratio = rads / rad0
        sq = np.sqrt(ratio)
        if not np.all(np.abs(sq - 1.0) <= _MAX_ROOT_STEP):
            h *= 0.5
            continue
        # continuation only picks the sign; the value is the principal root at
        # each node, so rounding does not accumulate along the march
        pred = root * sq
        roots_ = np.sqrt(rads)
        roots_ = np.where((roots_ * pred.conj()).real < 0, -roots_, roots_)
        ys = piece.y(nodes[:-1], roots_[:-1])
        xs = piece.x(nodes[:-1])
        vals = integrand(xs, ys) * piece.dx(nodes[:-1])[:, None]
        q20 = half * (w20 @ vals[:20])
        q10 = half * (w10 @ vals[20:])
        err = float(np.max(np.abs(q20 - q10)))
        mag = float(np.max(np.abs(q20)))
        if err > max(settings.abs_tol * (s1 - s), settings.rel_tol * mag) and h > 1e-6:
            h *= 0.5
            continue
        if err > max(settings.abs_tol, settings.rel_tol * mag) * 1e3:
            raise ToleranceNotMet(f"quadrature error {err:.2e} not reduced")
        total += q20
        root = roots_[-1]
        rad0 = rads[-1]
        s = s1
        h = min(2.0 * h, 0.5)
    return total, root


# -----------------------------------------------------------------------------
# integrands

def sigma_integrand(genus: int, k: int | None = None) -> Integrand:
    """``x**(g-k) / y`` for one ``k`` or, if ``k`` is None, all ``k = 1..g``."""
    if k is None:
        powers = np.arange(genus - 1, -1, -1)
    else:
        if not 1 <= k <= genus:
            raise ValueError(f"k must be in 1..{genus}")
        powers = np.array([genus - k])

    def f(x, y):
        return x[:, None] ** powers[None, :] / y[:, None]

    f.nout = len(powers)
    return f


def _nout(integrand) -> int:
    n = getattr(integrand, "nout", None)
    if n is None:
        n = np.asarray(integrand(np.array([1.0 + 0j]), np.array([1.0 + 0j]))).shape[-1]
    return int(n)


# -----------------------------------------------------------------------------
# path integrals

def integrate_path(curve: HyperellipticCurve, integrand: Integrand, path: Path,
                   settings: QuadratureSettings | None = None,
                   budget: _Budget | None = None, check: bool = True):
    """``(integral over the polyline, y at its end)``."""
    settings = settings or QuadratureSettings()
    budget = budget or _Budget(settings)
    wp = path.waypoints
    if check:
        check_clearance(curve, wp)
    nout = _nout(integrand)
    total = np.zeros(nout, dtype=curve.F.dtype)
    y = path.start_y
    for a, b in zip(wp[:-1], wp[1:]):
        if a == b:
            continue
        val, y = _march(_Segment(curve.factored, a, b), y, integrand, settings, budget, nout)
        total += val
    return total, y


def integrate_differential(curve: HyperellipticCurve, k: int, path: Path,
                           settings: QuadratureSettings | None = None) -> complex:
    """``integral of x**(g-k) dx / y`` along ``path``."""
    val, _ = integrate_path(curve, sigma_integrand(curve.genus, k), path, settings)
    return complex(val[0])


def infinity_root(curve: HyperellipticCurve, sheet: int) -> complex:
    r = np.sqrt(curve.leading)
    return r if (sheet >= 0 or not curve.even) else -r


def _tail(curve, integrand, sheet, settings, budget, R):
    nout = _nout(integrand)
    piece = _Tail(curve, R)
    val, root = _march(piece, infinity_root(curve, sheet), integrand, settings, budget, nout)
    y_R = piece.y(np.array([1.0]), np.array([root]))[0]
    return val, y_R


@dataclass
class InfinityPath:
    """How a point was reached from infinity."""

    sheet: int
    radius: float
    waypoints: np.ndarray
    loop_branch: complex | None = None
    loop_waypoints: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {"sheet": self.sheet, "radius": self.radius,
               "waypoints": [[w.real, w.imag] for w in self.waypoints]}
        if self.loop_branch is not None:
            out["sheet_loop_around"] = [self.loop_branch.real, self.loop_branch.imag]
        return out


def _sheet_loop(curve: HyperellipticCurve, R: float) -> tuple[complex, np.ndarray]:
    """Closed polyline from ``R`` around the branch point nearest to ``R``."""
    b = curve.branch_points[int(np.argmin(np.abs(curve.branch_points - R)))]
    rho = 1.21 * curve.clearance
    d = (R - b) / abs(R - b)
    p = b + rho * d
    approach = plan_path(curve, R, p)
    a0 = math.atan2(d.imag, d.real)
    circle = _arc(b, rho, a0, a0 + 2 * math.pi)
    wp = np.concatenate([approach, circle, approach[::-1][1:]])
    return b, wp


def infinity_path(curve: HyperellipticCurve, x: complex, y: complex, sheet: int = 1,
                  settings: QuadratureSettings | None = None) -> InfinityPath:
    """Decide the path from the sheet-``sheet`` infinity to ``(x, y)``."""
    R = curve.radius
    wp = plan_path(curve, R, x)
    _, yR = _tail(curve, lambda xx, yy: np.zeros((len(xx), 1), complex),
                  sheet, settings or QuadratureSettings(), _Budget(settings or QuadratureSettings()), R)
    y_end = continue_y(curve, Path(wp, yR), check=False)
    dp, dm = abs(y_end - y), abs(y_end + y)
    if abs(dp - dm) <= 1e-8 * max(abs(y_end), abs(y)):
        raise OnBranchPoint(f"cannot tell the sheet at x={x} (y={y})")
    if dp < dm:
        return InfinityPath(sheet if curve.even else 1, R, wp)
    b, loop = _sheet_loop(curve, R)
    return InfinityPath(sheet if curve.even else 1, R, wp, b, loop)


def integrate_from_infinity(curve: HyperellipticCurve, integrand: Integrand,
                            route: InfinityPath,
                            settings: QuadratureSettings | None = None):
    """Integrate along a route produced by :func:`infinity_path`.

    Returns ``(value, y at the end point)``.
    """
    settings = settings or QuadratureSettings()
    budget = _Budget(settings)
    total, y = _tail(curve, integrand, route.sheet, settings, budget, route.radius)
    if route.loop_waypoints is not None:
        val, y = integrate_path(curve, integrand, Path(route.loop_waypoints, y),
                                settings, budget, check=False)
        total = total + val
    val, y = integrate_path(curve, integrand, Path(route.waypoints, y), settings,
                            budget, check=False)
    return total + val, y


def integrate_to_infinity(curve: HyperellipticCurve, k: int | None, point: SheetPoint,
                          inf_sheet: int = 1,
                          settings: QuadratureSettings | None = None):
    """``integral from infinity (sheet inf_sheet) to (x, y)`` of ``x**(g-k)dx/y``.

    With ``k=None`` all ``g`` differentials are integrated at once and an
    array is returned.  For odd degree there is a single point at infinity
    and ``inf_sheet`` is ignored.

    The finite part runs from ``R = 4 max|b|`` on the positive real axis to
    ``x`` (with detours).  If that path lands on ``-y`` it is preceded by a
    loop around one branch point, which moves the path to the other sheet.
    """
    route = infinity_path(curve, point.x, point.y, inf_sheet, settings)
    val, y_end = integrate_from_infinity(curve, sigma_integrand(curve.genus, k), route, settings)
    if abs(y_end - point.y) > 1e-6 * max(1.0, abs(point.y)):
        raise LostTrack(f"continuation ended at y={y_end}, expected {point.y}")
    return complex(val[0]) if k is not None else val


# -----------------------------------------------------------------------------
# periods

def branch_pair_period(curve: HyperellipticCurve, k: int | None, i: int, j: int,
                       settings: QuadratureSettings | None = None,
                       via: Sequence[complex] | None = None,
                       ref_y: complex | None = None,
                       branch_points: np.ndarray | None = None):
    """Period ``2 * integral_{b_i}^{b_j} x**(g-k) dx / y`` of the cycle around ``b_i, b_j``.

    On the straight segment the endpoint singularities are removed with
    ``x = (b_i + b_j)/2 + (b_j - b_i)/2 cos(theta)``.  The sheet is fixed at
    the segment midpoint: principal square root, or the root closest to
    ``ref_y`` when given.  ``via`` gives interior waypoints for a detour
    (the sheet is then fixed at ``via[0]``).

    ``branch_points`` overrides the root list of ``curve`` (used when the
    caller has matched perturbed roots to a reference ordering).
    """
    if i == j:
        raise ValueError("a cycle needs two distinct branch points")
    settings = settings or QuadratureSettings()
    bp = curve.branch_points if branch_points is None else branch_points
    bi, bj = curve.F.dtype.type(bp[i]), curve.F.dtype.type(bp[j])
    integrand = sigma_integrand(curve.genus, k)
    nout = _nout(integrand)
    budget = _Budget(settings)
    rho = curve.clearance
    if via is None or len(via) == 0:
        for n, b in enumerate(bp):
            if n in (i, j):
                continue
            if _seg_dist(bi, bj, b) < rho:
                raise PathThroughBranchPoint(
                    f"branch point {b:.4g} lies on the segment b_{i} -> b_{j}")
        m = 0.5 * (bi + bj)
        h = 0.5 * (bj - bi)
        ym = np.sqrt(complex(curve.F(m)))
        if ref_y is not None and abs(ym - ref_y) > abs(ym + ref_y):
            ym = -ym
        root_m = ym / (1j * h)
        to_i, _ = _march(_CosHalf(curve.factored, bi, bj, +1), root_m, integrand, settings, budget, nout)
        to_j, _ = _march(_CosHalf(curve.factored, bi, bj, -1), root_m, integrand, settings, budget, nout)
        val = 2.0 * (to_j - to_i)
    else:
        wp = np.asarray(via, dtype=complex)
        check_clearance(curve, wp)
        y0 = np.sqrt(complex(curve.F(wp[0])))
        if ref_y is not None and abs(y0 - ref_y) > abs(y0 + ref_y):
            y0 = -y0
        first = _ToBranch(curve.factored, complex(wp[0]), bi)
        v_first, _ = _march(first, y0 / first.c, integrand, settings, budget, nout)
        v_mid, y_last = integrate_path(curve, integrand, Path(wp, y0), settings, budget, check=False)
        last = _ToBranch(curve.factored, complex(wp[-1]), bj)
        v_last, _ = _march(last, y_last / last.c, integrand, settings, budget, nout)
        val = 2.0 * (-v_first + v_mid + v_last)
    return complex(val[0]) if k is not None else val


def large_circle_integral(curve: HyperellipticCurve, k: int | None = None,
                          radius: float | None = None, n: int = 64,
                          settings: QuadratureSettings | None = None):
    """Integral of ``sigma_k`` around ``|x| = R`` (twice round for odd degree)."""
    R = curve.radius if radius is None else radius
    turns = 1 if curve.even else 2
    ang = 2 * np.pi * np.arange(n * turns + 1) / n
    wp = R * np.exp(1j * ang)
    y0 = np.sqrt(complex(curve.F(wp[0])))
    val, _ = integrate_path(curve, sigma_integrand(curve.genus, k), Path(wp, y0), settings)
    return complex(val[0]) if k is not None else val
