from __future__ import annotations

import math

import numpy as np
import pytest

from fcconv.errors import DomainError, SingularityError
from fcconv.extension import BoundaryData
from fcconv.kernels import (
    GAMMA_MAX,
    Kernel,
    correction_left,
    correction_right,
    decay_profile,
    kernel_eval,
    mirror,
)
from oracles import correction_oracle

KERNELS = [Kernel.power(-0.9), Kernel.power(-0.5), Kernel.power(0.5), Kernel.power(3.0), Kernel.log()]


# {{{ kernel values


def test_kernel_validation():
    with pytest.raises(DomainError):
        Kernel.power(-1.0)
    with pytest.raises(DomainError):
        Kernel.power(GAMMA_MAX + 1)
    with pytest.raises(DomainError):
        Kernel("power")
    with pytest.raises(DomainError):
        Kernel("log", 0.5)
    with pytest.raises(DomainError):
        Kernel("cauchy")

    assert Kernel.power(1) == Kernel("power", 1.0)
    assert hash(Kernel.log()) == hash(Kernel("log"))


@pytest.mark.parametrize(("g", "x", "expected"), [
    (Kernel.power(-0.5), 4.0, 0.5),
    (Kernel.log(), -1.0, 0.0),
    (Kernel.power(3.0), -2.0, 8.0),
])
def test_kernel_eval(g, x, expected):
    assert kernel_eval(g, x) == pytest.approx(expected)
    assert g(x) == pytest.approx(expected)


def test_kernel_eval_singular():
    with pytest.raises(SingularityError):
        kernel_eval(Kernel.log(), 0.0)
    with pytest.raises(SingularityError):
        kernel_eval(Kernel.power(0.5), np.array([1.0, 0.0]))


def test_decay_profile():
    assert decay_profile(Kernel.power(-0.8)).exponent == pytest.approx(0.2)
    assert decay_profile(Kernel.power(3.0)).exponent == 2.0
    assert decay_profile(Kernel.log()).exponent == 1.0
    assert decay_profile(Kernel.log()).constant_hint == 2.0
    assert math.isnan(decay_profile(Kernel.power(0.5)).constant_hint)


# }}}


# {{{ corrections


@pytest.mark.parametrize("g", KERNELS)
def test_zero_data(g):
    x = np.linspace(0, 1, 7)
    U = BoundaryData.zeros(3)
    assert not np.any(correction_left(g, U, x))
    assert not np.any(correction_right(g, U, x))


@pytest.mark.parametrize("method", ["auto", "closed", "monomial"])
def test_constant_kernel_constant_data(method):
    g = Kernel.power(0.0)
    U = BoundaryData(np.array([[1.0], [1.0]]))
    x = np.linspace(0, 1, 11)
    assert np.allclose(correction_left(g, U, x, method=method), 1 - x, atol=1e-14)
    assert np.allclose(correction_right(g, U, x, method=method), x, atol=1e-14)


def test_scalar_in_scalar_out():
    U = BoundaryData.from_derivatives([1.0, 0.5], [0.2, -1.0])
    value = correction_left(Kernel.log(), U, 0.25)
    assert isinstance(value, float)


def test_domain():
    U = BoundaryData.zeros(1)
    with pytest.raises(DomainError):
        correction_left(Kernel.log(), U, 1.5)
    with pytest.raises(DomainError):
        correction_right(Kernel.log(), U, -0.1)


def test_power_law_example():
    rng = np.random.default_rng(11)
    U = BoundaryData(rng.standard_normal((2, 2)))
    g = Kernel.power(-0.5)
    expected = correction_oracle(g, U.values, 0.3, "left")
    assert correction_left(g, U, 0.3) == pytest.approx(expected, rel=1e-10)


def test_log_example():
    rng = np.random.default_rng(12)
    U = BoundaryData(rng.standard_normal((2, 3)))
    g = Kernel.log()
    expected = correction_oracle(g, U.values, 0.7, "right")
    assert correction_right(g, U, 0.7) == pytest.approx(expected, rel=1e-10)


def test_against_oracle_random():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(40):
        g = KERNELS[i % len(KERNELS)]
        r = int(rng.integers(0, 7))
        U = BoundaryData(rng.standard_normal((2, r + 1)))
        x = [rng.uniform(), 10 ** rng.uniform(-6, -1), 1 - 10 ** rng.uniform(-6, -1)][i % 3]
        for side, f in (("left", correction_left), ("right", correction_right)):
            expected = correction_oracle(g, U.values, x, side)
            worst = max(worst, abs(f(g, U, x) - expected) / abs(expected))
    assert worst < 1e-9


def test_mirror_identity():
    # C_R(U)(x) = C_L(mirror U)(1 - x) follows from y -> -1 - y
    rng = np.random.default_rng(5)
    U = BoundaryData(rng.standard_normal((2, 4)))
    x = np.linspace(0, 1, 9)
    for g in KERNELS:
        direct = correction_right(g, U, x, method="closed")
        mirrored = correction_left(g, mirror(U), 1 - x, method="closed")
        assert np.allclose(direct, mirrored, rtol=1e-6, atol=1e-9)


def test_symmetric_data_constant_kernel():
    # even continuation datum: C_L(1/2) = C_R(1/2) exactly for gamma = 0
    U = BoundaryData.from_derivatives([1.0, 0.0, 2.0], [1.0, 0.0, 2.0])
    g = Kernel.power(0.0)
    assert correction_left(g, U, 0.5) == pytest.approx(correction_right(g, U, 0.5), abs=1e-15)


def test_closed_forms_agree_with_monomial_expansion():
    rng = np.random.default_rng(9)
    x = np.linspace(0, 0.5, 6)
    for r in range(5):
        U = BoundaryData(rng.standard_normal((2, r + 1)))
        for g in KERNELS[:-1]:
            a = correction_left(g, U, x, method="closed")
            b = correction_left(g, U, x, method="monomial")
            assert np.allclose(a, b, rtol=1e-9, atol=1e-12)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(1)
    U = BoundaryData(rng.standard_normal((2, 4)))
    x = np.array([0.0, 0.05, 0.3, 0.8, 1.0])
    for g in KERNELS:
        vec = correction_left(g, U, x)
        assert np.allclose(vec, [correction_left(g, U, xi) for xi in x], rtol=0, atol=0)


# }}}
