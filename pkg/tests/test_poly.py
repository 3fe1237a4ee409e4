import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperint.errors import DuplicateNode, SingularSystem
from hyperint.poly import BiPoly, Poly, constrained_fit, eval_poly, lagrange_interpolate, roots

cplx = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def _sorted(z):
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((np.round(z.imag, 8), np.round(z.real, 8)))]


# -- eval ---------------------------------------------------------------------

@pytest.mark.parametrize("coeffs, x, expected", [
    ([3, -4, 1], 2, -1),
    ([], 7, 0),
    ([1] + [0] * 11 + [1], 0, 1),
])
def test_eval_examples(coeffs, x, expected):
    assert eval_poly(Poly(coeffs), x) == expected
    assert Poly(coeffs)(x) == expected


def test_zero_polynomial_is_empty():
    p = Poly([0, 0, 0])
    assert len(p.coeffs) == 0
    assert p.degree == -1


def test_trailing_zeros_trimmed():
    p = Poly([1, 2, 0, 0])
    assert p.degree == 1
    assert p.leading == 2


def test_eval_exact_for_linear():
    p = Poly([0.1, 0.7])
    assert p(3.0) == 0.1 + 0.7 * 3.0


# -- roots --------------------------------------------------------------------

def test_roots_of_x12_plus_1():
    r = roots(Poly([1] + [0] * 11 + [1]))
    assert len(r) == 12
    np.testing.assert_allclose(np.abs(r), 1.0, rtol=0, atol=1e-14)
    np.testing.assert_allclose(r ** 12, -1.0, atol=1e-13)
    # twelve distinct odd powers of exp(i pi/12)
    k = np.round(np.angle(r) / (np.pi / 12)).astype(int) % 24
    assert sorted(k) == list(range(1, 24, 2))


def test_roots_simple_cubic():
    r = roots(Poly.from_roots([1, 2, 3]))
    np.testing.assert_allclose(_sorted(r), [1, 2, 3], atol=1e-14)


def test_roots_x2_plus_1():
    r = roots(Poly([1, 0, 1]))
    np.testing.assert_allclose(_sorted(r), [-1j, 1j], atol=1e-15)


def test_roots_degree_zero_rejected():
    with pytest.raises(ValueError):
        roots(Poly([3.0]))


@given(st.lists(cplx, min_size=2, max_size=13))
def test_roots_eval_consistency(c):
    c[-1] = c[-1] if abs(c[-1]) > 0.1 else 1.0
    p = Poly(c)
    tol = 1e-12
    scale = np.sum(np.abs(p.coeffs))
    for r in roots(p, tol):
        assert abs(p(r)) < tol * scale * max(1.0, abs(r)) ** p.degree


# -- interpolation ------------------------------------------------------------

def test_lagrange_x4():
    P = lagrange_interpolate([0, 1, 2, 3, 4], [0, 1, 16, 81, 256])
    np.testing.assert_allclose(P.coeffs, [0, 0, 0, 0, 1], atol=1e-12)


def test_lagrange_constant():
    P = lagrange_interpolate([0, 1, 2, 3, 4], [1] * 5)
    c = np.zeros(5, complex)
    c[: len(P.coeffs)] = P.coeffs
    np.testing.assert_allclose(c, [1, 0, 0, 0, 0], atol=1e-13)


def test_lagrange_duplicate_node():
    with pytest.raises(DuplicateNode):
        lagrange_interpolate([0, 0, 1], [1, 2, 3])


def test_constrained_fit_rational_elliptic():
    P = constrained_fit([0, 1], [2, 4], [(2, 1.0)])
    np.testing.assert_allclose(P.coeffs, [2, 1, 1], atol=1e-14)


def test_constrained_fit_seiberg_witten_nc2():
    # monic, traceless: P = x^2 + u_2 with P(3) = 10
    P = constrained_fit([3], [10], [(2, 1.0), (1, 0.0)])
    np.testing.assert_allclose(P.coeffs, [1, 0, 1], atol=1e-14)


def test_constrained_fit_repeated_node():
    with pytest.raises(SingularSystem):
        constrained_fit([1, 1], [0.3, 0.7], [(2, 0.0)])


def _separated_nodes(draw, n):
    # nodes on a jittered circle keep pairwise separation >= 0.1 x scale
    base = np.exp(2j * np.pi * np.arange(n) / n)
    jitter = np.array([draw(st.complex_numbers(max_magnitude=0.1)) for _ in range(n)])
    return base + jitter


@st.composite
def interpolation_data(draw):
    n = draw(st.integers(2, 8))
    xs = _separated_nodes(draw, n)
    c = np.array([draw(cplx) for _ in range(n)])
    return xs, c


@given(interpolation_data())
def test_interpolation_roundtrip(data):
    xs, c = data
    P = Poly(c)
    Q = lagrange_interpolate(xs, P(xs))
    ref = np.zeros(len(xs), complex)
    ref[: len(P.coeffs)] = P.coeffs
    got = np.zeros(len(xs), complex)
    got[: len(Q.coeffs)] = Q.coeffs
    assert np.max(np.abs(got - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


@given(interpolation_data())
def test_unpinned_fit_equals_lagrange(data):
    xs, c = data
    zs = Poly(c)(xs)
    a = lagrange_interpolate(xs, zs)
    b = constrained_fit(xs, zs)
    n = len(xs)
    pa = np.zeros(n, complex)
    pa[: len(a.coeffs)] = a.coeffs
    pb = np.zeros(n, complex)
    pb[: len(b.coeffs)] = b.coeffs
    assert np.max(np.abs(pa - pb)) < 1e-12 * max(1.0, np.max(np.abs(pa)))


# -- arithmetic and BiPoly ----------------------------------------------------

@given(st.lists(cplx, min_size=1, max_size=6), st.lists(cplx, min_size=1, max_size=6), cplx)
def test_product_evaluates_pointwise(a, b, x):
    p, q = Poly(a), Poly(b)
    assert abs((p * q)(x) - p(x) * q(x)) < 1e-12 * (1 + abs(p(x) * q(x))) * 10


def test_divmod_exact():
    p = Poly.from_roots([1, 2, 3, 4])
    q, r = p.divmod(Poly.from_roots([2, 4]))
    assert r.degree < 1 and np.all(np.abs(r.coeffs) < 1e-13)
    np.testing.assert_allclose(q.coeffs, Poly.from_roots([1, 3]).coeffs, atol=1e-13)


def test_bipoly_eval_and_dz():
    # F = 1 + x z + 2 z^2
    C = np.zeros((2, 3))
    C[0, 0], C[1, 1], C[0, 2] = 1, 1, 2
    F = BiPoly(C)
    assert F.total_degree == 2
    assert F(2.0, 3.0) == 1 + 6 + 18
    assert F.dz()(2.0, 3.0) == 2 + 12
    np.testing.assert_allclose(F.substitute(Poly([0, 1])).coeffs, [1, 0, 3])
