"""Seeded random test instances.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``, whose
output stream is fixed by the PCG64 algorithm and does not depend on the
platform.  Complex numbers are drawn uniformly from the unit disc.  Draws
that violate the nondegeneracy checks (colliding branch points, points too
close to each other or to a branch point) are rejected and redrawn from the
same stream, so an instance is a deterministic function of the seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, NumericalFailure
from .poly import BiPoly, Poly
from .surface import (Configuration, DoubleCoverK3, EllipticK3, NeumannRational,
                      RationalElliptic, SeibergWitten, SurfaceFamily, cut_curve,
                      lift_points)

__all__ = ["Instance", "rng", "unit_disc", "random_family", "random_instance",
           "FAMILY_TAGS"]

FAMILY_TAGS = ("EllipticK3", "DoubleCoverK3", "RationalElliptic",
               "NeumannRational", "SeibergWitten")


@dataclass
class Instance:
    family: SurfaceFamily
    u: np.ndarray
    config: Configuration
    seed: int | None = None


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & (2 ** 64 - 1)))


def unit_disc(gen: np.random.Generator, n: int, radius: float = 1.0) -> np.ndarray:
    r = radius * np.sqrt(gen.random(n))
    t = 2 * np.pi * gen.random(n)
    return r * np.exp(1j * t)


def random_family(tag: str, gen: np.random.Generator, **kw) -> SurfaceFamily:
    if tag == "EllipticK3":
        return EllipticK3(Poly(unit_disc(gen, 9)), Poly(unit_disc(gen, 13)))
    if tag == "RationalElliptic":
        c = kw.get("c")
        c = unit_disc(gen, 1)[0] if c is None else c
        return RationalElliptic(Poly(unit_disc(gen, 5)), Poly(unit_disc(gen, 7)), c)
    if tag == "DoubleCoverK3":
        C = np.zeros((7, 7), dtype=complex)
        for i in range(7):
            for j in range(7 - i):
                C[i, j] = unit_disc(gen, 1)[0]
        return DoubleCoverK3(BiPoly(C))
    if tag == "NeumannRational":
        N = int(kw.get("N", 2))
        c = np.arange(N + 1, dtype=float) + gen.uniform(-0.3, 0.3, N + 1)
        return NeumannRational(c, kw.get("r", 1.0))
    if tag == "SeibergWitten":
        Nc = int(kw.get("Nc", 2))
        Nf = int(kw.get("Nf", 0))
        lam = kw.get("Lambda")
        lam = (0.5 + 0.5 * gen.random()) * np.exp(2j * np.pi * gen.random()) if lam is None else lam
        return SeibergWitten(Nc, lam, unit_disc(gen, Nf))
    raise ValueError(f"unknown family tag {tag!r}")


def _acceptable(family, u, xs, min_sep: float, min_branch: float) -> bool:
    try:
        curve = cut_curve(family, u)
    except (DegenerateGeometry, NumericalFailure):
        return False
    if curve.min_separation < 0.05:
        return False
    d = np.abs(xs[:, None] - xs[None, :])
    d[np.diag_indices_from(d)] = np.inf
    if d.min() < min_sep:
        return False
    db = np.abs(xs[:, None] - curve.branch_points[None, :]).min()
    if db < min_branch * curve.min_separation:
        return False
    return True


def random_instance(tag: str, seed: int, family: SurfaceFamily | None = None,
                    max_tries: int = 500, x_radius: float = 1.0, **kw) -> Instance:
    """Family (if not given), Hamiltonians and a configuration from one seed."""
    gen = rng(seed)
    fam = family if family is not None else random_family(tag, gen, **kw)
    g = fam.genus
    for _ in range(max_tries):
        u = unit_disc(gen, g)
        if isinstance(fam, NeumannRational):
            xs = fam.c[0] - 0.5 + (fam.c[-1] - fam.c[0] + 1.0) * gen.random(g) \
                + 1j * gen.uniform(-0.5, 0.5, g)
        else:
            xs = unit_disc(gen, g, x_radius)
        signs = np.where(gen.random(g) < 0.5, -1, 1)
        if not _acceptable(fam, u, xs, 0.1 * x_radius, 0.4):
            continue
        try:
            cfg = lift_points(fam, u, xs, signs)
        except DegenerateGeometry:
            continue
        return Instance(fam, u, cfg, seed)
    raise RuntimeError(f"no acceptable {fam.tag} instance after {max_tries} draws")
