"""Numerical verification of integrable systems on surfaces with hyperelliptic sections.

A section of a surface through ``g`` points cuts out a hyperelliptic curve;
its coefficients ``u`` commute, and the Abel-Jacobi image ``psi`` of the
points is conjugate to ``u``.  The package computes both sides and checks
the identities between them.

Modules
-------
poly         polynomials, roots, interpolation
surface      the five surface families, sections and lifts
riemann      continuation and contour integrals on ``y**2 = F(x)``
abel_jacobi  the Abel-Jacobi map, its derivatives and the periods
symplectic   the symplectic form, brackets and flows
neumann      the classical Neumann system as an independent check
config, report, cli
             run configurations, verification suites and the command line
"""
from .abel_jacobi import (DPSI_DU_SIGN, abel_jacobi, cubic_condition_residual, dpsi_du,
                          dpsi_du_fd, dpsi_dx_analytic, dpsi_dx_fd, elementary_periods,
                          period_derivatives)
from .errors import *  # noqa: F401,F403
from .instances import FAMILY_TAGS, random_family, random_instance, rng
from .poly import BiPoly, Poly, constrained_fit, lagrange_interpolate, roots
from .riemann import (HyperellipticCurve, Path, QuadratureSettings, branch_pair_period,
                      continue_y, integrate_differential, integrate_to_infinity,
                      large_circle_integral, SheetPoint)
from .surface import (Configuration, DoubleCoverK3, EllipticK3, NeumannRational,
                      RationalElliptic, SeibergWitten, SurfacePoint, cut_curve,
                      lift_points, points_to_u, section_polynomial)
from .symplectic import (BRACKET_SIGN, canonical_residual, coordinate_jacobian,
                         integrate_flow, involutivity_residual, omega_matrix,
                         poisson_bracket)

__version__ = "0.1.0"
