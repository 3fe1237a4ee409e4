"""Complex polynomials in one and two variables.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies ``x**i``.
The zero polynomial has an empty coefficient array and degree ``-1``.

Besides arithmetic this module provides root finding (companion matrix
eigenvalues followed by Newton polishing) and the two interpolation routines
that turn point data into section polynomials:

* :func:`lagrange_interpolate` -- the textbook Lagrange product formula;
* :func:`constrained_fit` -- a linear solve with some coefficients pinned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateNode, NonConvergence, SingularSystem

__all__ = [
    "Poly",
    "BiPoly",
    "eval_poly",
    "roots",
    "lagrange_interpolate",
    "constrained_fit",
]


def cdtype(*arrays) -> np.dtype:
    """``complex128``, or ``clongdouble`` if any input is extended precision."""
    return np.result_type(*[np.asarray(a).dtype for a in arrays], np.complex128)


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(0, dtype=c.dtype)
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class Poly:
    """Univariate polynomial with complex coefficients (ascending order).

    Coefficients are ``complex128`` unless extended-precision input is given,
    in which case ``clongdouble`` is kept through arithmetic and evaluation.
    """

    coeffs: np.ndarray

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = coeffs if isinstance(coeffs, np.ndarray) else np.asarray(list(coeffs))
        c = np.array(c, dtype=cdtype(c)).ravel()
        c = _trim(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "Poly":
        a = np.zeros(n + 1, dtype=complex)
        a[n] = c
        return cls(a)

    @classmethod
    def from_roots(cls, rts: Sequence[complex], leading: complex = 1.0) -> "Poly":
        p = cls([leading])
        for r in rts:
            p = p * cls([-r, 1.0])
        return p

    @classmethod
    def from_descending(cls, c: Sequence[complex]) -> "Poly":
        return cls(np.asarray(c, dtype=complex)[::-1])

    # -- basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1] if len(self.coeffs) else self.coeffs.dtype.type(0)

    def coeff(self, i: int) -> complex:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.coeffs.dtype.type(0)

    @property
    def dtype(self) -> np.dtype:
        return self.coeffs.dtype

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({np.array2string(self.coeffs, precision=6)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and bool(np.all(self.coeffs == other.coeffs))

    def allclose(self, other: "Poly", rtol=1e-12, atol=0.0) -> bool:
        n = max(len(self), len(other))
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: len(self)] = self.coeffs.astype(complex)
        b[: len(other)] = other.coeffs.astype(complex)
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        return eval_poly(self, x)

    def deriv(self) -> "Poly":
        if len(self.coeffs) <= 1:
            return Poly()
        return Poly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def reversed(self, n: int | None = None) -> "Poly":
        """Return ``t**n * p(1/t)`` (``n`` defaults to the degree)."""
        n = self.degree if n is None else n
        c = np.zeros(n + 1, dtype=self.dtype)
        c[: len(self.coeffs)] = self.coeffs
        return Poly(c[::-1])

    def coef_scale(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly([other])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self), len(o))
        c = np.zeros(n, cdtype(self.coeffs, o.coeffs))
        c[: len(self)] += self.coeffs
        c[: len(o)] += o.coeffs
        return Poly(c)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if not len(self) or not len(o):
            return Poly(np.zeros(0, cdtype(self.coeffs, o.coeffs)))
        return Poly(np.convolve(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly([1.0])
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Polynomial long division ``self = q*other + r``."""
        num = list(self.coeffs)
        den = other.coeffs
        if not len(den):
            raise ZeroDivisionError("division by the zero polynomial")
        dq = len(num) - len(den)
        if dq < 0:
            return Poly(), self
        dt = cdtype(self.coeffs, den)
        q = np.zeros(dq + 1, dt)
        num = np.array(num, dt)
        for i in range(dq, -1, -1):
            q[i] = num[i + len(den) - 1] / den[-1]
            num[i : i + len(den)] -= q[i] * den
        return Poly(q), Poly(num[: len(den) - 1])


def eval_poly(p: Poly, x):
    """Horner evaluation; works elementwise on arrays."""
    x = np.asarray(x)
    out = np.zeros(x.shape, dtype=cdtype(x, p.coeffs))
    for c in p.coeffs[::-1]:
        out = out * x + c
    return out if out.ndim else out[()]


@dataclass(frozen=True, eq=False)
class BiPoly:
    """Polynomial in ``(x, z)``; ``coeffs[i, j]`` multiplies ``x**i z**j``."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2:
            raise ValueError("BiPoly coefficients must be a 2-d array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def total_degree(self) -> int:
        i, j = np.nonzero(self.coeffs)
        return int(np.max(i + j)) if len(i) else -1

    def __call__(self, x, z):
        x = np.asarray(x)
        z = np.asarray(z)
        out = np.zeros(np.broadcast(x, z).shape, dtype=cdtype(x, z))
        for i in range(self.coeffs.shape[0] - 1, -1, -1):
            row = np.zeros_like(out)
            for c in self.coeffs[i, ::-1]:
                row = row * z + c
            out = out * x + row
        return out if out.ndim else out[()]

    def dz(self) -> "BiPoly":
        nz = self.coeffs.shape[1]
        if nz <= 1:
            return BiPoly(np.zeros((self.coeffs.shape[0], 1)))
        return BiPoly(self.coeffs[:, 1:] * np.arange(1, nz)[None, :])

    def dx(self) -> "BiPoly":
        nx = self.coeffs.shape[0]
        if nx <= 1:
            return BiPoly(np.zeros((1, self.coeffs.shape[1])))
        return BiPoly(self.coeffs[1:, :] * np.arange(1, nx)[:, None])

    def substitute(self, p: Poly) -> Poly:
        """Return the univariate polynomial ``x -> F(x, p(x))``."""
        out = Poly()
        pj = Poly([1.0])
        for j in range(self.coeffs.shape[1]):
            col = Poly(self.coeffs[:, j])
            out = out + col * pj
            pj = pj * p
        return out


def roots(p: Poly, tol: float = 1e-12, max_iter: int = 60) -> np.ndarray:
    """All roots of ``p`` with multiplicity.

    Companion-matrix eigenvalues (``numpy.roots``) are refined by Newton's
    method.  A root is accepted once

        |p(r)| < tol * sum|coeffs| * max(1, |r|)**deg

    Raises :class:`NonConvergence` if some root never meets that bound.
    """
    if p.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    c = p.coeffs
    est = np.roots(c[::-1].astype(complex)).astype(complex)
    dp = p.deriv()
    scale = p.coef_scale()
    out = np.empty(len(est), dtype=p.dtype)
    for i, r in enumerate(est):
        bound = lambda z: tol * scale * max(1.0, abs(z)) ** p.degree
        res = abs(p(r))
        # polish to working precision: stopping at the first acceptable
        # residual would make the root a non-smooth function of the coefficients
        for _ in range(max_iter):
            if res == 0:
                break
            d = dp(r)
            if d == 0:
                break
            r_new = r - p(r) / d
            res_new = abs(p(r_new))
            if res_new >= res:
                break
            r, res = r_new, res_new
        if res >= bound(r):
            raise NonConvergence(
                f"root polish stalled at |p(r)|={res:.3e} (bound {bound(r):.3e})")
        out[i] = r
    return out


def _node_scale(xs: np.ndarray) -> float:
    s = float(np.max(np.abs(xs))) if len(xs) else 0.0
    return s if s > 0 else 1.0


def _check_nodes(xs: np.ndarray, rel_sep: float) -> None:
    thresh = rel_sep * _node_scale(xs)
    n = len(xs)
    for j in range(n):
        for k in range(j + 1, n):
            if abs(xs[j] - xs[k]) <= thresh:
                raise DuplicateNode(f"nodes {j} and {k} coincide (x={xs[j]})")


def lagrange_interpolate(xs: Sequence[complex], zs: Sequence[complex],
                         rel_sep: float = 1e-12) -> Poly:
    """Interpolating polynomial of degree ``<= n-1`` through ``(x_j, z_j)``.

    Uses the product form ``sum_j z_j prod_{k != j} (x - x_k)/(x_j - x_k)``.
    """
    dt = cdtype(xs, zs)
    xs = np.asarray(xs, dtype=dt)
    zs = np.asarray(zs, dtype=dt)
    if xs.shape != zs.shape:
        raise ValueError("xs and zs differ in length")
    _check_nodes(xs, rel_sep)
    return Poly(lagrange_basis_coeffs(xs) @ zs)


def lagrange_basis_coeffs(xs: Sequence[complex]) -> np.ndarray:
    """Matrix ``B`` with ``B[i, j]`` the ``x**i`` coefficient of the j-th basis polynomial."""
    xs = np.asarray(xs, dtype=cdtype(xs))
    n = len(xs)
    B = np.zeros((n, n), dtype=xs.dtype)
    for j in range(n):
        others = np.delete(xs, j)
        basis = Poly.from_roots(others, xs.dtype.type(1)).coeffs
        B[:, j] = basis / np.prod(xs[j] - others)
    return B


def constrained_fit(xs: Sequence[complex], zs: Sequence[complex],
                    fixed: Sequence[tuple[int, complex]] = (),
                    rcond: float = 1e-10) -> Poly:
    """Fit ``P`` with ``P(x_j) = z_j`` while some coefficients are pinned.

    ``fixed`` lists ``(degree, coefficient)`` pairs.  The free coefficients
    are the degrees ``0 .. n_nodes + n_fixed - 1`` not listed in ``fixed``.
    Raises :class:`SingularSystem` when the reduced Vandermonde matrix has
    relative condition below ``rcond``.
    """
    dt = cdtype(xs, zs, *[c for _, c in fixed])
    xs = np.asarray(xs, dtype=dt)
    zs = np.asarray(zs, dtype=dt)
    fixed = [(int(d), dt.type(c)) for d, c in fixed]
    n = len(xs)
    top = n + len(fixed) - 1
    pinned = {d for d, _ in fixed}
    free = [d for d in range(top + 1) if d not in pinned]
    if len(free) != n:
        raise SingularSystem(
            f"{n} nodes cannot determine {len(free)} free coefficients")
    rhs = zs.copy()
    for d, c in fixed:
        rhs = rhs - c * xs ** d
    A = xs[:, None] ** np.asarray(free)[None, :]
    A2 = A.astype(complex)
    sv = np.linalg.svd(A2, compute_uv=False) if n else np.ones(1)
    if n and (sv[-1] <= rcond * sv[0] or sv[0] == 0):
        raise SingularSystem(f"interpolation matrix is rank deficient (cond {sv[0] / max(sv[-1], 1e-300):.2e})")
    sol = np.linalg.solve(A2, rhs.astype(complex)).astype(dt) if n else np.zeros(0, dt)
    if dt != np.complex128 and n:
        # LAPACK works in double; refine the residual in extended precision
        for _ in range(3):
            sol = sol + np.linalg.solve(A2, (rhs - A @ sol).astype(complex))
    c = np.zeros(top + 1, dtype=dt)
    for d, v in zip(free, sol):
        c[d] = v
    for d, v in fixed:
        c[d] = v
    return Poly(c)
