"""The five surface families and the curves their sections cut out.

Every family carries a surface equation in affine coordinates ``(x, y, z)``,
a one-parameter-per-genus family of sections, and a holomorphic 2-form.  The
section through ``g`` points in general position is recovered by
interpolation, and its coefficients are the commuting Hamiltonians ``u``.

========================  =====================  ======================  ===========
family                    surface                section ``P(x)``        genus
========================  =====================  ======================  ===========
:class:`EllipticK3`       y^2 = z^3 + f z + g    sum u_k x^(5-k)         5
:class:`DoubleCoverK3`    y^2 = F2(x, z)         u_1 x + u_2             2
:class:`RationalElliptic` y^2 = z^3 + f z + g    c x^2 + u_1 x + u_2     2
:class:`NeumannRational`  y^2 = z Q(x)           r^2 x^N + ...           N
:class:`SeibergWitten`    y z = Q(x)             x^Nc + sum u_k x^(Nc-k) Nc - 1
========================  =====================  ======================  ===========

Families 1-4 cut with ``z = P(x)``; the Seiberg-Witten family cuts with
``y + z = P(x)`` and is handled through ``w = y - z`` (so ``w**2 = P**2 - 4Q``).

Hamiltonian vectors are plain complex arrays of length ``g``; entry ``i``
(0-based) multiplies ``x**(g-1-i)``.  For Seiberg-Witten the entries are
``u_2 .. u_Nc``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BranchPointHit, DegenerateLeading, DimensionMismatch, OnDivisor
from .poly import BiPoly, Poly, cdtype, constrained_fit, lagrange_interpolate
from .riemann import HyperellipticCurve, geometric_scale

__all__ = [
    "SurfaceFamily",
    "EllipticK3",
    "DoubleCoverK3",
    "RationalElliptic",
    "NeumannRational",
    "SeibergWitten",
    "SurfacePoint",
    "Configuration",
    "section_polynomial",
    "cut_curve",
    "points_to_u",
    "lift_points",
    "holomorphic_two_form",
]


@dataclass(frozen=True)
class SurfacePoint:
    x: complex
    y: complex
    z: complex


class Configuration:
    """Unordered ``g``-tuple of surface points, stored as coordinate arrays."""

    def __init__(self, x, y, z):
        dt = cdtype(x, y, z)
        self.x = np.asarray(x, dtype=dt).ravel().copy()
        self.y = np.asarray(y, dtype=dt).ravel().copy()
        self.z = np.asarray(z, dtype=dt).ravel().copy()
        if not (len(self.x) == len(self.y) == len(self.z)):
            raise DimensionMismatch("coordinate arrays differ in length")

    @classmethod
    def from_points(cls, pts: Sequence[SurfacePoint]) -> "Configuration":
        return cls([p.x for p in pts], [p.y for p in pts], [p.z for p in pts])

    def __len__(self):
        return len(self.x)

    def points(self) -> list[SurfacePoint]:
        return [SurfacePoint(complex(a), complex(b), complex(c))
                for a, b, c in zip(self.x, self.y, self.z)]

    def permuted(self, perm) -> "Configuration":
        perm = np.asarray(perm)
        return Configuration(self.x[perm], self.y[perm], self.z[perm])

    def copy(self) -> "Configuration":
        return Configuration(self.x, self.y, self.z)

    def astype(self, dtype) -> "Configuration":
        return Configuration(self.x.astype(dtype), self.y.astype(dtype), self.z.astype(dtype))

    def __repr__(self):
        return f"Configuration(x={self.x}, y={self.y}, z={self.z})"


class SurfaceFamily:
    """Common interface; subclasses fill in the family-specific pieces."""

    tag: str = ""
    #: local coordinates (a, b) of the 2-form  w da^db
    coords = ("z", "x")
    #: expected degree of F is 2g + 2 unless overridden
    odd_degree = False

    @property
    def genus(self) -> int:
        raise NotImplementedError

    # -- section ------------------------------------------------------------
    def pinned(self) -> list[tuple[int, complex]]:
        """Coefficients of ``P`` that are fixed (Casimirs)."""
        return []

    def section(self, u) -> Poly:
        u = self._check_u(u)
        g = self.genus
        c = np.zeros(g + len(self.pinned()), dtype=u.dtype)
        c[:g] = u[::-1]
        for d, v in self.pinned():
            c[d] = v
        return Poly(c)

    def u_from_section(self, P: Poly) -> np.ndarray:
        g = self.genus
        return np.array([P.coeff(g - 1 - i) for i in range(g)], dtype=P.dtype)

    def _check_u(self, u) -> np.ndarray:
        u = np.asarray(u)
        u = u.astype(cdtype(u)).ravel()
        if len(u) != self.genus:
            raise DimensionMismatch(f"{self.tag} needs {self.genus} Hamiltonians, got {len(u)}")
        return u

    # -- curve --------------------------------------------------------------
    def curve_poly(self, P: Poly) -> Poly:
        raise NotImplementedError

    def dF_factor(self, P: Poly) -> Poly:
        """``G`` with ``dF/du_l = x**(g-l) G``."""
        raise NotImplementedError

    # -- points -------------------------------------------------------------
    def surface_residual(self, p: SurfacePoint) -> float:
        raise NotImplementedError

    def section_value(self, cfg: Configuration) -> np.ndarray:
        """The data interpolated by the section: ``z`` (or ``y + z``)."""
        return cfg.z

    def curve_y(self, cfg: Configuration) -> np.ndarray:
        """Hyperelliptic coordinate ``w`` with ``w**2 = F(x)`` on the cut curve."""
        return cfg.y

    def lift(self, P: Poly, F: Poly, x: complex, w: complex) -> SurfacePoint:
        """Surface point over ``x`` with curve coordinate ``w``."""
        return SurfacePoint(x, w, P(x))

    def weight(self, p: SurfacePoint) -> complex:
        if p.y == 0:
            raise OnDivisor(f"2-form undefined at y = 0 (x={p.x})")
        return 1.0 / p.y

    def relift(self, cfg: Configuration, j: int, a: complex, b: complex) -> Configuration:
        """Move point ``j`` to local coordinates ``(a, b) = (z, x)``, keeping its sheet."""
        out = cfg.copy()
        y2 = self.y_squared(b, a)
        r = np.sqrt(np.asarray(y2, dtype=cdtype(y2, cfg.y)))[()]
        out.x[j], out.z[j] = b, a
        out.y[j] = r if abs(r - cfg.y[j]) <= abs(r + cfg.y[j]) else -r
        return out

    def local_coords(self, cfg: Configuration) -> tuple[np.ndarray, np.ndarray]:
        return cfg.z.copy(), cfg.x.copy()

    def y_squared(self, x, z):
        raise NotImplementedError

    def section_value_derivs(self, cfg: Configuration):
        """``(ds/da, ds/db)`` per point, ``s`` the interpolated value, at fixed other coords.

        For ``s = z`` this is ``(1, 0)``.
        """
        n = len(cfg)
        return np.ones(n, complex), np.zeros(n, complex)

    def to_dict(self) -> dict:
        raise NotImplementedError


def _cplx_list(a) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.ravel(a)]


class _Weierstrass(SurfaceFamily):
    def __init__(self, f, g):
        self.f = f if isinstance(f, Poly) else Poly(f)
        self.g = g if isinstance(g, Poly) else Poly(g)

    def y_squared(self, x, z):
        return z ** 3 + self.f(x) * z + self.g(x)

    def surface_residual(self, p):
        rhs = self.y_squared(p.x, p.z)
        return abs(p.y ** 2 - rhs) / max(1.0, abs(rhs), abs(p.y) ** 2)

    def curve_poly(self, P):
        return P ** 3 + self.f * P + self.g

    def dF_factor(self, P):
        return 3 * P * P + self.f


class EllipticK3(_Weierstrass):
    """``y^2 = z^3 + f(x) z + g(x)`` with ``deg f <= 8``, ``deg g <= 12``."""

    tag = "EllipticK3"

    def __init__(self, f, g):
        super().__init__(f, g)
        if self.f.degree > 8 or self.g.degree > 12:
            raise ValueError("EllipticK3 needs deg f <= 8 and deg g <= 12")

    @property
    def genus(self):
        return 5

    def to_dict(self):
        return {"tag": self.tag, "f": _cplx_list(self.f.coeffs), "g": _cplx_list(self.g.coeffs)}


class RationalElliptic(_Weierstrass):
    """Degree 4/6 Weierstrass data; the ``x**2`` coefficient ``c`` is a Casimir."""

    tag = "RationalElliptic"

    def __init__(self, f, g, c):
        super().__init__(f, g)
        if self.f.degree > 4 or self.g.degree > 6:
            raise ValueError("RationalElliptic needs deg f <= 4 and deg g <= 6")
        self.c = complex(c)

    @property
    def genus(self):
        return 2

    def pinned(self):
        return [(2, self.c)]

    def to_dict(self):
        return {"tag": self.tag, "f": _cplx_list(self.f.coeffs),
                "g": _cplx_list(self.g.coeffs), "c": _cplx_list([self.c])[0]}


class DoubleCoverK3(SurfaceFamily):
    """Double cover of the plane branched along a sextic, ``y^2 = F2(x, z)``."""

    tag = "DoubleCoverK3"

    def __init__(self, F2):
        self.F2 = F2 if isinstance(F2, BiPoly) else BiPoly(F2)
        if self.F2.total_degree > 6:
            raise ValueError("DoubleCoverK3 needs a sextic (total degree <= 6)")
        self._dz = self.F2.dz()

    @property
    def genus(self):
        return 2

    def y_squared(self, x, z):
        return self.F2(x, z)

    def surface_residual(self, p):
        rhs = self.F2(p.x, p.z)
        return abs(p.y ** 2 - rhs) / max(1.0, abs(rhs), abs(p.y) ** 2)

    def curve_poly(self, P):
        return self.F2.substitute(P)

    def dF_factor(self, P):
        return self._dz.substitute(P)

    def to_dict(self):
        c = self.F2.coeffs
        return {"tag": self.tag,
                "F2": [[[float(v.real), float(v.imag)] for v in row] for row in c]}


class NeumannRational(SurfaceFamily):
    """``y^2 = z Q(x)``, ``Q = prod (x - c_n)``; leading coefficient ``r^2`` pinned."""

    tag = "NeumannRational"
    odd_degree = True

    def __init__(self, c: Sequence[float], r: float = 1.0):
        c = np.asarray(c, dtype=float).ravel()
        if len(c) < 2:
            raise ValueError("NeumannRational needs at least two constants c_n")
        if len(np.unique(c)) != len(c):
            raise ValueError("the constants c_n must be distinct")
        if not r > 0:
            raise ValueError("radius must be positive")
        self.c = np.sort(c)
        self.r = float(r)
        self.Q = Poly.from_roots(self.c)

    @property
    def genus(self):
        return len(self.c) - 1

    def pinned(self):
        return [(self.genus, self.r ** 2)]

    def y_squared(self, x, z):
        return z * self.Q(x)

    def surface_residual(self, p):
        rhs = self.y_squared(p.x, p.z)
        return abs(p.y ** 2 - rhs) / max(1.0, abs(rhs), abs(p.y) ** 2)

    def curve_poly(self, P):
        return P * self.Q

    def dF_factor(self, P):
        return self.Q

    def to_dict(self):
        return {"tag": self.tag, "c": [float(v) for v in self.c], "r": self.r}


class SeibergWitten(SurfaceFamily):
    """Affine surface ``y z = Q(x)``, ``Q = Lambda^(2Nc - Nf) prod (x + m_l)``.

    Local coordinates are ``(y, x)`` and the 2-form is ``dy ^ dx / y``.
    """

    tag = "SeibergWitten"
    coords = ("y", "x")

    def __init__(self, Nc: int, Lam: complex = 1.0, masses: Sequence[complex] = ()):
        Nc = int(Nc)
        masses = np.asarray(masses, dtype=complex).ravel()
        Nf = len(masses)
        if Nc < 2:
            raise ValueError("SeibergWitten needs Nc >= 2")
        if Nf > 2 * Nc:
            raise ValueError("SeibergWitten needs Nf <= 2 Nc")
        if Lam == 0:
            raise ValueError("Lambda must be nonzero")
        self.Nc, self.Nf, self.Lam, self.masses = Nc, Nf, complex(Lam), masses
        self.Q = Poly.from_roots(-masses, leading=self.Lam ** (2 * Nc - Nf))

    @property
    def genus(self):
        return self.Nc - 1

    def pinned(self):
        return [(self.Nc, 1.0), (self.Nc - 1, 0.0)]

    def section(self, u):
        u = self._check_u(u)
        c = np.zeros(self.Nc + 1, dtype=u.dtype)
        c[: self.genus] = u[::-1]
        c[self.Nc] = 1.0
        return Poly(c)

    def y_squared(self, x, z):
        raise TypeError("SeibergWitten points are not parameterized by (x, z)")

    def surface_residual(self, p):
        rhs = self.Q(p.x)
        return abs(p.y * p.z - rhs) / max(1.0, abs(rhs), abs(p.y * p.z))

    def curve_poly(self, P):
        return P * P - 4 * self.Q

    def dF_factor(self, P):
        return 2 * P

    def section_value(self, cfg):
        return cfg.y + cfg.z

    def curve_y(self, cfg):
        return cfg.y - cfg.z

    def lift(self, P, F, x, w):
        y = 0.5 * (P(x) + w)
        if y == 0:
            raise OnDivisor(f"lifted point has y = 0 at x={x}")
        return SurfacePoint(x, y, self.Q(x) / y)

    def local_coords(self, cfg):
        return cfg.y.copy(), cfg.x.copy()

    def relift(self, cfg, j, a, b):
        out = cfg.copy()
        out.y[j], out.x[j] = a, b
        out.z[j] = self.Q(b) / a
        return out

    def section_value_derivs(self, cfg):
        # s = y + Q(x)/y
        ds_dy = 1.0 - self.Q(cfg.x) / cfg.y ** 2
        ds_dx = self.Q.deriv()(cfg.x) / cfg.y
        return np.asarray(ds_dy, complex), np.asarray(ds_dx, complex)

    def to_dict(self):
        return {"tag": self.tag, "Nc": self.Nc, "Lambda": _cplx_list([self.Lam])[0],
                "masses": _cplx_list(self.masses)}


# -----------------------------------------------------------------------------
# operations

def section_polynomial(family: SurfaceFamily, u) -> Poly:
    return family.section(u)


def cut_curve(family: SurfaceFamily, u) -> HyperellipticCurve:
    """The hyperelliptic curve ``y**2 = F(x)`` cut out by the section ``u``.

    ``F`` must keep the family's generic degree (``2g+2``, or ``2g+1`` for
    the Neumann family).  A leading coefficient that vanishes, or falls below
    ``1e-12`` of the coefficient scale, sends a branch point to infinity and
    raises :class:`DegenerateLeading`.
    """
    P = family.section(u)
    F = family.curve_poly(P)
    g = family.genus
    want = 2 * g + 1 if family.odd_degree else 2 * g + 2
    if F.degree < want or abs(complex(F.leading)) < 1e-12 * F.coef_scale():
        raise DegenerateLeading(
            f"leading coefficient of F vanishes (deg F = {F.degree}, expected {want})")
    return HyperellipticCurve.from_poly(F, g)


def interpolation_poly(family: SurfaceFamily, xs, values) -> Poly:
    pins = family.pinned()
    if pins:
        return constrained_fit(xs, values, pins)
    return lagrange_interpolate(xs, values)


def points_to_u(family: SurfaceFamily, cfg: Configuration) -> np.ndarray:
    """Hamiltonians of the section through the configuration."""
    if len(cfg) != family.genus:
        raise DimensionMismatch(f"need {family.genus} points, got {len(cfg)}")
    P = interpolation_poly(family, cfg.x, family.section_value(cfg))
    return family.u_from_section(P)


def lift_points(family: SurfaceFamily, u, xs, signs) -> Configuration:
    """Points of the cut curve over ``xs`` on the sheets ``signs``.

    The curve coordinate is ``w = sign * sqrt(F(x))`` (principal root).
    """
    xs = np.asarray(xs, dtype=complex).ravel()
    signs = np.asarray(signs).ravel()
    if len(xs) != len(signs):
        raise DimensionMismatch("xs and signs differ in length")
    P = family.section(u)
    F = family.curve_poly(P)
    scale = max(geometric_scale(np.abs(F.coeffs)), 1e-300)
    pts = []
    for x, s in zip(xs, signs):
        Fx = complex(F(x))
        if abs(Fx) < 1e-12 * scale * max(1.0, abs(x)) ** F.degree:
            raise BranchPointHit(f"x={x} is a branch point of the cut curve")
        w = (1 if s >= 0 else -1) * np.sqrt(Fx)
        pts.append(family.lift(P, F, complex(x), complex(w)))
    return Configuration.from_points(pts)


def holomorphic_two_form(family: SurfaceFamily, p: SurfacePoint):
    """Local data ``((a, b), weight)`` of ``omega = weight * da ^ db``."""
    return family.coords, family.weight(p)


def interpolation_gradients(family: SurfaceFamily, cfg: Configuration):
    """Exact derivatives of ``u`` with respect to the local coordinates.

    Returns ``(du_da, du_db)``, each ``g x g`` with ``[k, j] = du_k / d(coord of point j)``.
    Differentiating ``P(x_i) = s_i`` gives ``du/ds_j = L_j`` (the Lagrange
    basis coefficients of the free monomials) and
    ``du/dx_j = -P'(x_j) L_j`` at fixed ``s``.
    """
    g = family.genus
    xs = cfg.x
    A = xs[:, None] ** np.arange(g - 1, -1, -1)[None, :]
    Ainv = np.linalg.inv(A)  # column j = du/ds_j
    P = interpolation_poly(family, xs, family.section_value(cfg))
    dP = P.deriv()(xs)
    ds_da, ds_dx = family.section_value_derivs(cfg)
    du_da = Ainv * ds_da[None, :]
    du_db = Ainv * (ds_dx - dP)[None, :]
    return du_da, du_db
