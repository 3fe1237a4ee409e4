import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperint.errors import (BranchPointHit, DegenerateLeading, DimensionMismatch, OnDivisor,
                             SingularCurve)
from hyperint.instances import FAMILY_TAGS, random_instance
from hyperint.poly import Poly
from hyperint.surface import (Configuration, EllipticK3, NeumannRational, RationalElliptic,
                              SeibergWitten, SurfacePoint, cut_curve, holomorphic_two_form,
                              lift_points, points_to_u, section_polynomial)

X12P1 = EllipticK3(Poly([]), Poly([1] + [0] * 11 + [1]))

FAMILY_KW = {"NeumannRational": [{"N": 2}, {"N": 3}], "SeibergWitten": [{"Nc": 2}, {"Nc": 3}]}


def family_cases():
    for tag in FAMILY_TAGS:
        for kw in FAMILY_KW.get(tag, [{}]):
            yield tag, kw


# -- sections -----------------------------------------------------------------

def test_section_elliptic_k3():
    P = section_polynomial(X12P1, [1, 0, 0, 0, 0])
    np.testing.assert_array_equal(P.coeffs, [0, 0, 0, 0, 1])


def test_section_neumann():
    P = section_polynomial(NeumannRational([1, 2, 3], 1.0), [-4, 3])
    np.testing.assert_array_equal(P.coeffs, [3, -4, 1])


def test_section_seiberg_witten():
    P = section_polynomial(SeibergWitten(2), [1])
    np.testing.assert_array_equal(P.coeffs, [1, 0, 1])


def test_section_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        section_polynomial(X12P1, [1, 2])


# -- cut_curve ----------------------------------------------------------------

def test_cut_curve_x12_plus_1():
    c = cut_curve(X12P1, np.zeros(5))
    assert c.genus == 5
    np.testing.assert_array_equal(c.F.coeffs, X12P1.g.coeffs)
    assert len(c.branch_points) == 12
    np.testing.assert_allclose(np.abs(c.branch_points), 1.0, atol=1e-14)


def test_cut_curve_neumann_shared_root_is_singular():
    with pytest.raises(SingularCurve):
        cut_curve(NeumannRational([1, 2, 3], 1.0), [-4, 3])


def test_cut_curve_seiberg_witten_toda():
    u2 = 0.3 - 0.2j
    c = cut_curve(SeibergWitten(2, 1.0), [u2])
    # (x^2 + u_2)^2 - 4, genus 1
    expected = Poly([u2, 0, 1]) * Poly([u2, 0, 1]) - Poly([4])
    np.testing.assert_array_equal(c.F.coeffs, expected.coeffs)
    assert c.genus == 1


def test_degenerate_leading():
    # f = x^8, g = 0: the x^12 coefficient of P^3 + fP + g is u_1^3 + u_1, zero at u_1 = i
    fam = EllipticK3(Poly.monomial(8), Poly([]))
    with pytest.raises(DegenerateLeading):
        cut_curve(fam, [1j, 0.1, 0.2, 0.3, 0.4])


@pytest.mark.parametrize("tag, kw", list(family_cases()))
def test_genus_bookkeeping(tag, kw):
    inst = random_instance(tag, 3, **kw)
    c = cut_curve(inst.family, inst.u)
    g = inst.family.genus
    assert c.degree == (2 * g + 1 if tag == "NeumannRational" else 2 * g + 2)


def test_remark4_preset():
    rng = np.random.default_rng(4)
    f = Poly(rng.normal(size=9) + 1j * rng.normal(size=9))
    g = Poly(rng.normal(size=13) + 1j * rng.normal(size=13))
    fam = EllipticK3(f, g)
    u5 = 0.4 + 0.1j
    c = cut_curve(fam, [0, 0, 0, 0, u5])
    expected = Poly([u5 ** 3]) + f * Poly([u5]) + g
    np.testing.assert_allclose(c.F.coeffs, expected.coeffs, rtol=1e-15)
    assert c.degree == 12 and c.genus == 5


# -- points_to_u and lift_points ------------------------------------------------

def test_points_to_u_x4():
    xs = np.arange(5.0)
    cfg = Configuration(xs, np.ones(5), xs ** 4)
    u = points_to_u(X12P1, cfg)
    np.testing.assert_allclose(u, [1, 0, 0, 0, 0], atol=1e-12)
    # the leading Hamiltonian has a closed form
    d = xs[:, None] - xs[None, :]
    np.fill_diagonal(d, 1.0)
    u1 = np.sum(xs ** 4 / np.prod(d, axis=1))
    assert abs(u1 - 1) < 1e-12


def test_points_to_u_rational_elliptic():
    fam = RationalElliptic(Poly([1]), Poly([1]), 1.0)
    cfg = Configuration([0, 1], [1, 1], [2, 4])
    np.testing.assert_allclose(points_to_u(fam, cfg), [1, 2], atol=1e-14)


def test_lift_x12_plus_1():
    p = lift_points(X12P1, np.zeros(5), [0], [1]).points()[0]
    assert (p.x, p.y, p.z) == (0, 1, 0)
    q = lift_points(X12P1, np.zeros(5), [0], [-1]).points()[0]
    assert (q.x, q.y, q.z) == (0, -1, 0)


def test_lift_seiberg_witten():
    p = lift_points(SeibergWitten(2, 1.0), [0.0], [2.0], [1]).points()[0]
    w = 2 * np.sqrt(3)
    assert abs(p.y - (4 + w) / 2) < 1e-14
    assert abs(p.z - 1 / p.y) < 1e-14
    assert abs(p.y * p.z - 1) < 1e-14


def test_lift_branch_point_hit():
    with pytest.raises(BranchPointHit):
        lift_points(X12P1, np.zeros(5), [np.exp(1j * np.pi / 12)], [1])


@pytest.mark.parametrize("tag, kw", list(family_cases()))
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_roundtrip_and_surface_equation(tag, kw, seed):
    inst = random_instance(tag, seed, **kw)
    u = points_to_u(inst.family, inst.config)
    assert np.max(np.abs(u - inst.u)) <= 1e-10 * max(1.0, np.max(np.abs(inst.u)))
    for p in inst.config.points():
        assert inst.family.surface_residual(p) < 1e-10


@pytest.mark.parametrize("tag, kw", list(family_cases()))
@given(perm_seed=st.integers(0, 2 ** 32 - 1))
def test_permutation_invariance(tag, kw, perm_seed):
    inst = random_instance(tag, 5, **kw)
    perm = np.random.default_rng(perm_seed).permutation(inst.family.genus)
    a = points_to_u(inst.family, inst.config)
    b = points_to_u(inst.family, inst.config.permuted(perm))
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(a)))


@given(u=st.lists(st.complex_numbers(max_magnitude=1.0), min_size=2, max_size=2),
       s=st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=2))
def test_roundtrip_property_rational_elliptic(u, s):
    fam = RationalElliptic(Poly([0.3, 0.1j, 0.5, 0, 0.2]), Poly([1, 0, -0.4, 0, 0, 0.1, 0.3]), 0.7)
    xs = [0.4 + 0.1j, -0.5 - 0.3j]
    try:
        cfg = lift_points(fam, u, xs, s)
    except BranchPointHit:
        return
    assert np.max(np.abs(points_to_u(fam, cfg) - np.asarray(u))) <= 1e-10 * max(1.0, np.max(np.abs(u)))


# -- 2-form ---------------------------------------------------------------------

def test_two_form_weights():
    assert holomorphic_two_form(X12P1, SurfacePoint(0, 1, 0)) == (("z", "x"), 1)
    assert holomorphic_two_form(X12P1, SurfacePoint(0, -1, 0)) == (("z", "x"), -1)
    assert holomorphic_two_form(SeibergWitten(2), SurfacePoint(1, 2, 0.5))[0] == ("y", "x")


def test_two_form_on_divisor():
    with pytest.raises(OnDivisor):
        holomorphic_two_form(X12P1, SurfacePoint(1, 0, 0))
