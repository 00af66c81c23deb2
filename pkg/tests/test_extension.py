from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import numpy.linalg as la
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fcconv.errors import DomainError, SizeError
from fcconv.extension import (
    BoundaryData,
    ExtendedSamples,
    GridSamples,
    _fd_coefficients_exact,
    boundary_data_from_samples,
    continuation_eval,
    continuation_monomial_coefficients,
    continue_samples,
    extension_coefficients,
    fd_coefficients,
    hermite_basis,
)
from oracles import hermite_interpolant, naive_dft

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


def boundary_data(max_r: int = 6):
    return st.integers(0, max_r).flatmap(
        lambda r: arrays(np.float64, (2, r + 1), elements=finite).map(BoundaryData))


# {{{ types


def test_boundary_data_shape_checks():
    with pytest.raises(SizeError):
        BoundaryData(np.zeros(3))
    with pytest.raises(SizeError):
        BoundaryData(np.zeros((3, 2)))
    with pytest.raises(DomainError):
        BoundaryData(np.array([[np.nan], [0.0]]))

    U = BoundaryData.from_derivatives([1, 2, 3], [4, 5, 6])
    assert U.r == 2
    assert U.values[1, 2] == 6
    with pytest.raises(ValueError):
        U.values[0, 0] = 1.0


def test_boundary_data_linear_combination():
    U = BoundaryData.from_derivatives([1, 2], [3, 4])
    V = BoundaryData.from_derivatives([0, 1], [1, 0])
    assert 2.0 * U + V == BoundaryData.from_derivatives([2, 5], [7, 8])


def test_grid_samples_invariants():
    with pytest.raises(SizeError):
        GridSamples(np.zeros(2))
    with pytest.raises(DomainError):
        GridSamples(np.array([0.0, np.inf, 1.0]))

    s = GridSamples.from_function(np.sin, 8)
    assert s.n == 8
    assert np.array_equal(s.x, np.arange(9) / 8)


def test_extended_samples_length():
    with pytest.raises(SizeError):
        ExtendedSamples(4, np.zeros(7))


# }}}


# {{{ Hermite basis


def test_hermite_basis_linear_blend():
    assert hermite_basis(0, 0, 0, -0.5) == pytest.approx(0.5)
    assert hermite_basis(0, 0, 1, -0.5) == pytest.approx(0.5)


def test_hermite_basis_cubic():
    x = np.linspace(-1, 0, 11)
    assert np.allclose(hermite_basis(1, 0, 0, x), (1 + x) ** 2 * (1 - 2 * x), atol=1e-15)

    h = 1e-6
    assert hermite_basis(1, 0, 0, 0.0) == 1.0
    assert abs(hermite_basis(1, 0, 0, 0.0) - hermite_basis(1, 0, 0, -h)) / h < 1e-5


@pytest.mark.parametrize("args", [(2, 3, 0, -0.5), (-1, 0, 0, -0.5), (1, 0, 2, -0.5), (1, 0, 0, 0.5)])
def test_hermite_basis_domain(args):
    with pytest.raises(DomainError):
        hermite_basis(*args)


def _derivative(coeffs: np.ndarray, m: int, x: float) -> float:
    return float(np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(coeffs, m)))


@pytest.mark.parametrize("r", range(7))
def test_hermite_basis_interpolation_conditions(r):
    # p_m^0 has m-th derivative 1 at 0 and all other listed derivatives zero
    from fcconv.extension import hermite_monomial_coefficients

    for m in range(r + 1):
        for side in (0, 1):
            c = np.array([float(f) for f in hermite_monomial_coefficients(r, m, side)])
            for ell in range(r + 1):
                at0 = _derivative(c, ell, 0.0)
                atm1 = _derivative(c, ell, -1.0)
                assert at0 == pytest.approx(float(side == 0 and ell == m), abs=1e-9)
                assert atm1 == pytest.approx(float(side == 1 and ell == m), abs=1e-9)


def test_monomial_form_matches_sum_form():
    rng = np.random.default_rng(3)
    x = np.linspace(-1, 0, 17)
    for r in range(7):
        U = BoundaryData(rng.standard_normal((2, r + 1)))
        c = continuation_monomial_coefficients(U)
        direct = continuation_eval(U, x)
        assert np.allclose(np.polynomial.polynomial.polyval(x, c), direct, rtol=1e-12, atol=1e-12)


# }}}


# {{{ continuation


def test_continuation_endpoints():
    U = BoundaryData(np.array([[2.5], [-1.5]]))
    assert continuation_eval(U, 0.0) == pytest.approx(2.5)
    assert continuation_eval(U, -1.0) == pytest.approx(-1.5)

    with pytest.raises(DomainError):
        continuation_eval(U, 0.1)


def test_continuation_of_linear_function():
    U = BoundaryData.from_derivatives([0, 1, 0, 0], [1, 1, 0, 0])
    p = hermite_interpolant(U.values)
    for x in (-0.5, -0.25, -0.9):
        assert continuation_eval(U, x) == pytest.approx(float(p(x)), rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(U=boundary_data())
def test_interpolation_identity_under_fd_probing(U):
    # p(U) has degree <= 13, so a 15-point central stencil differentiates it
    # exactly and only rounding is left; that is amplified by 1/h**m and
    # measured against the size of the derivative on [-1, 0]
    from fcconv.extension import _continuation

    P = np.polynomial.polynomial
    c = continuation_monomial_coefficients(U)
    xs = np.linspace(-1, 0, 201)
    h = 0.1
    offsets = np.arange(-7, 8)
    for m in range(U.r + 1):
        scale = max(1.0, np.max(np.abs(P.polyval(xs, P.polyder(c, m)))))
        for side, x0 in ((0, 0.0), (1, -1.0)):
            if m == 0:
                estimate = float(_continuation(U, x0))
            else:
                V = np.vander(offsets.astype(float), increasing=True).T
                rhs = np.zeros(offsets.size)
                rhs[m] = math.factorial(m)
                w = la.solve(V, rhs)
                estimate = float(np.dot(w, _continuation(U, x0 + h * offsets))) / h**m
            assert abs(estimate - U.values[side, m]) <= 1e-6 * scale


@pytest.mark.parametrize("r", [1, 2, 3])
def test_reproduction_of_polynomials(r):
    # a polynomial of degree <= 2r + 1 is its own Hermite continuation
    rng = np.random.default_rng(r)
    c = rng.standard_normal(2 * r + 2)
    P = np.polynomial.Polynomial(c)
    U = BoundaryData.from_derivatives(
        [P.deriv(m)(0.0) if m else P(0.0) for m in range(r + 1)],
        [P.deriv(m)(-1.0) if m else P(-1.0) for m in range(r + 1)])

    n = 32
    # samples on [0, 1] are irrelevant to the continued part
    s = GridSamples(np.zeros(n + 1))
    e = continue_samples(s, U)
    j = np.arange(-n, 0)
    expected = P(j / n)
    assert np.allclose(e.at(j), expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_continue_samples_layout():
    n = 8
    s = GridSamples.from_function(lambda x: 1 + x, n)
    e = continue_samples(s, BoundaryData.zeros(2))
    assert np.array_equal(e.at(np.arange(n)), s.values[:n])
    assert np.all(e.at(np.arange(-n, 0)) == 0.0)


def test_continue_zero():
    e = continue_samples(GridSamples(np.zeros(9)), BoundaryData.zeros(3))
    assert not np.any(e.values)


# }}}


# {{{ finite differences


@pytest.mark.parametrize(("m", "q", "expected"), [
    (1, 1, [-1, 1]),
    (1, 2, [Fraction(-3, 2), 2, Fraction(-1, 2)]),
    (2, 1, [1, -2, 1]),
])
def test_fd_coefficients_known(m, q, expected):
    assert list(_fd_coefficients_exact(m, q)) == [Fraction(e) for e in expected]
    assert np.array_equal(fd_coefficients(m, q), np.array([float(e) for e in expected]))


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("q", range(1, 6))
def test_fd_exact_on_monomials(m, q):
    a = _fd_coefficients_exact(m, q)
    for p in range(m + q):
        value = sum(ak * k**p for k, ak in enumerate(a))
        expected = math.factorial(m) if p == m else 0
        assert value == expected


def test_fd_domain():
    with pytest.raises(DomainError):
        fd_coefficients(0, 1)
    with pytest.raises(DomainError):
        fd_coefficients(1, 0)


def test_boundary_data_linear_exact():
    for n in (2, 7, 64):
        U = boundary_data_from_samples(GridSamples.from_function(lambda x: x, n), r=1, q=1)
        assert np.allclose(U.values, [[0, 1], [1, 1]], atol=1e-12)


def test_boundary_data_quadratic():
    U = boundary_data_from_samples(GridSamples.from_function(lambda x: x**2, 8), r=1, q=2)
    assert np.allclose(U.values, [[0, 0], [1, 2]], atol=1e-12)


def test_boundary_data_cos_accuracy():
    n = 64
    U = boundary_data_from_samples(GridSamples.from_function(np.cos, n), r=2, q=3)
    exact = np.array([[1, 0, -1], [np.cos(1), -np.sin(1), -np.cos(1)]])
    assert np.max(np.abs(U.values - exact)) < 10 * n**-3.0


def test_boundary_data_order_of_accuracy():
    errs = []
    for n in (32, 64, 128):
        U = boundary_data_from_samples(GridSamples.from_function(np.exp, n), r=3, q=2)
        exact = np.array([[1.0] * 4, [np.e] * 4])
        errs.append(np.max(np.abs(U.values - exact)))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.8)


def test_boundary_data_size_error():
    with pytest.raises(SizeError, match="n >= 7"):
        boundary_data_from_samples(GridSamples(np.zeros(7)), r=3, q=4)


# }}}


# {{{ spectral coefficients


def test_coefficients_constant():
    n = 8
    c = extension_coefficients(ExtendedSamples(n, np.ones(2 * n)))
    expected = np.zeros(2 * n)
    expected[n] = 1.0
    assert np.allclose(c.values, expected, atol=1e-15)


def test_coefficients_pure_cosine():
    n = 8
    j = np.arange(-n, n)
    c = extension_coefficients(ExtendedSamples(n, np.cos(np.pi * j / n)))
    assert c.at(1) == pytest.approx(0.5)
    assert c.at(-1) == pytest.approx(0.5)
    others = np.delete(c.values, [n - 1, n + 1])
    assert np.max(np.abs(others)) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 32).flatmap(
    lambda n: arrays(np.float64, 2 * n, elements=st.floats(-1e3, 1e3))))
def test_coefficients_match_naive_dft(e):
    n = e.size // 2
    c = extension_coefficients(ExtendedSamples(n, e))
    scale = max(1.0, np.max(np.abs(e)))
    assert np.max(np.abs(c.values - naive_dft(e))) <= 1e-13 * scale


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 32).flatmap(
    lambda n: arrays(np.float64, 2 * n, elements=st.floats(-1e3, 1e3))))
def test_coefficients_conjugate_symmetry(e):
    n = e.size // 2
    c = extension_coefficients(ExtendedSamples(n, e))
    k = np.arange(1, n)
    assert np.allclose(c.at(-k), np.conj(c.at(k)), rtol=0, atol=1e-13 * max(1.0, np.max(np.abs(e))))


# }}}
