r"""Two-point Hermite continuation of equispaced data from :math:`[0, 1]` to
:math:`[-1, 1]`, and the discrete Fourier coefficients of the continued data.

Samples :math:`u_j = u(j/n)`, :math:`j = 0, \dots, n`, are continued to
:math:`[-1, 0)` by the degree :math:`2r + 1` polynomial :math:`p(U)` that
matches :math:`r + 1` derivatives of :math:`u` at :math:`x = 0` (row 0 of
:math:`U`) and at :math:`x = 1` (row 1 of :math:`U`, imposed at :math:`x = -1`).
The 2-periodic extension of the continued function is then :math:`C^r`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from fcconv.errors import DomainError, SizeError

DEFAULT_R = 3
DEFAULT_Q = 4


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


# {{{ data types


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Endpoint derivative values driving the continuation polynomial.

    ``values[0, m]`` is (an approximation of) :math:`u^{(m)}(0)` and
    ``values[1, m]`` of :math:`u^{(m)}(1)`, for :math:`m = 0, \\dots, r`.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != 2 or v.shape[1] < 1:
            raise SizeError(f"boundary data must have shape (2, r + 1): got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("boundary data contains non-finite entries")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def r(self) -> int:
        return self.values.shape[1] - 1

    @classmethod
    def zeros(cls, r: int) -> BoundaryData:
        return cls(np.zeros((2, r + 1)))

    @classmethod
    def from_derivatives(cls, left, right) -> BoundaryData:
        """Build from derivative sequences at ``x = 0`` and ``x = 1``."""
        return cls(np.array([left, right], dtype=np.float64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryData):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __add__(self, other: BoundaryData) -> BoundaryData:
        return BoundaryData(self.values + other.values)

    def __rmul__(self, alpha: float) -> BoundaryData:
        return BoundaryData(alpha * self.values)


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Samples ``values[j] = u(j / n)`` for ``j = 0, ..., n``."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise SizeError(f"samples must be one-dimensional: got shape {v.shape}")
        if v.size < 3:
            raise SizeError(f"need at least 3 samples (n >= 2): got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DomainError("samples contain non-finite entries")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @classmethod
    def from_function(cls, u, n: int) -> GridSamples:
        return cls(u(np.arange(n + 1) / n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSamples):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class ExtendedSamples:
    """Continued samples ``values[j + n] = u_c(j / n)`` for ``j = -n, ..., n - 1``."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (2 * self.n,):
            raise SizeError(f"expected {2 * self.n} extended samples: got {v.shape}")
        object.__setattr__(self, "values", _frozen(v))

    def at(self, j):
        return self.values[np.asarray(j) + self.n]


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """Fourier coefficients ``values[k + n]`` for ``k = -n, ..., n - 1``."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (2 * self.n,):
            raise SizeError(f"expected {2 * self.n} coefficients: got {v.shape}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.n, self.n)

    def at(self, k):
        return self.values[np.asarray(k) + self.n]


# }}}


# {{{ Hermite basis


def _check_basis_index(r: int, m: int) -> None:
    if r < 0:
        raise DomainError(f"smoothness order must be non-negative: r = {r}")
    if not 0 <= m <= r:
        raise DomainError(f"derivative index must satisfy 0 <= m <= r: m = {m}, r = {r}")


def _hermite_basis(r: int, m: int, side: int, x):
    # no domain check: the polynomial is also evaluated outside [-1, 0]
    x = np.asarray(x, dtype=np.float64)
    s = np.zeros_like(x)
    if side == 0:
        for i in range(r - m + 1):
            s = s + math.comb(r + i, i) * (-x) ** i
        return x**m * (1 + x) ** (r + 1) * s / math.factorial(m)
    else:
        for i in range(r - m + 1):
            s = s + math.comb(r + i, i) * (1 + x) ** i
        return (1 + x) ** m * (-x) ** (r + 1) * s / math.factorial(m)


def hermite_basis(r: int, m: int, side: int, x):
    r"""Evaluate the two-point Hermite basis polynomial :math:`p_m^{side}`.

    :arg side: ``0`` for the polynomial whose :math:`m`-th derivative is one
        at :math:`x = 0`, ``1`` for the one whose :math:`m`-th derivative is
        one at :math:`x = -1`.
    :arg x: points in :math:`[-1, 0]`.
    """
    _check_basis_index(r, m)
    if side not in (0, 1):
        raise DomainError(f"side must be 0 or 1: got {side!r}")

    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < -1.0) or np.any(xa > 0.0):
        raise DomainError("Hermite basis is only defined on [-1, 0]")

    result = _hermite_basis(r, m, side, xa)
    return float(result) if result.ndim == 0 else result


def _continuation(U: BoundaryData, x):
    x = np.asarray(x, dtype=np.float64)
    result = np.zeros_like(x)
    for m in range(U.r + 1):
        result = result + U.values[0, m] * _hermite_basis(U.r, m, 0, x)
        result = result + U.values[1, m] * _hermite_basis(U.r, m, 1, x)
    return result


def continuation_eval(U: BoundaryData, x):
    """Evaluate the continuation polynomial :math:`p(U)` at points in ``[-1, 0]``."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < -1.0) or np.any(xa > 0.0):
        raise DomainError("continuation is only defined on [-1, 0]")

    result = _continuation(U, xa)
    return float(result) if result.ndim == 0 else result


@lru_cache(maxsize=64)
def hermite_monomial_coefficients(r: int, m: int, side: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients (lowest degree first) of ``p_m^side``."""
    _check_basis_index(r, m)

    def mul(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    def power(a, e):
        out = [1]
        for _ in range(e):
            out = mul(out, a)
        return out

    if side == 0:
        s = [(-1) ** i * math.comb(r + i, i) for i in range(r - m + 1)]
        c = mul(mul([0] * m + [1], power([1, 1], r + 1)), s)
    else:
        s = [0] * (r - m + 1)
        for i in range(r - m + 1):
            for j, cj in enumerate(power([1, 1], i)):
                s[j] += math.comb(r + i, i) * cj
        c = mul(mul(power([1, 1], m), [0] * (r + 1) + [(-1) ** (r + 1)]), s)

    c = c + [0] * (2 * r + 2 - len(c))
    return tuple(Fraction(ci, math.factorial(m)) for ci in c)


def continuation_monomial_coefficients(U: BoundaryData) -> np.ndarray:
    """Monomial coefficients (lowest degree first) of :math:`p(U)`."""
    r = U.r
    c = np.zeros(2 * r + 2)
    for m in range(r + 1):
        for side in (0, 1):
            basis = np.array([float(b) for b in hermite_monomial_coefficients(r, m, side)])
            c += U.values[side, m] * basis
    return c


# }}}


# {{{ finite differences


@lru_cache(maxsize=128)
def _fd_coefficients_exact(m: int, q: int) -> tuple[Fraction, ...]:
    size = m + q
    # Taylor moment system sum_k a_k k^p = m! [p == m], p = 0, ..., m + q - 1
    A = [[Fraction(k**p) for k in range(size)] + [Fraction(math.factorial(m) if p == m else 0)]
         for p in range(size)]

    for col in range(size):
        pivot = next(i for i in range(col, size) if A[i][col] != 0)
        A[col], A[pivot] = A[pivot], A[col]
        for i in range(size):
            if i != col and A[i][col] != 0:
                f = A[i][col] / A[col][col]
                A[i] = [a - f * b for a, b in zip(A[i], A[col])]

    return tuple(A[i][size] / A[i][i] for i in range(size))


def fd_coefficients(m: int, q: int) -> np.ndarray:
    """One-sided finite difference weights for the ``m``-th derivative.

    Returns ``a`` of length ``m + q`` such that
    ``n**m * sum(a[k] * u(x + k / n))`` approximates :math:`u^{(m)}(x)` with
    error :math:`O(n^{-q})`. Weights are computed in exact rational arithmetic.
    """
    if m < 1 or q < 1:
        raise DomainError(f"need m >= 1 and q >= 1: got m = {m}, q = {q}")
    return np.array([float(a) for a in _fd_coefficients_exact(m, q)])


def boundary_data_from_samples(s: GridSamples, r: int = DEFAULT_R, q: int = DEFAULT_Q) -> BoundaryData:
    """Approximate the boundary data matrix from grid samples.

    Row 0 uses forward differences on ``u_0, u_1, ...`` and row 1 backward
    differences on ``u_n, u_{n-1}, ...``, each of order ``q``.
    """
    if r < 0 or q < 1:
        raise DomainError(f"need r >= 0 and q >= 1: got r = {r}, q = {q}")

    n = s.n
    if n < r + q:
        raise SizeError(
            f"grid too small for r = {r}, q = {q}: need n >= {r + q}, got n = {n}"
        )

    u = s.values
    U = np.empty((2, r + 1))
    U[0, 0] = u[0]
    U[1, 0] = u[n]
    for m in range(1, r + 1):
        a = fd_coefficients(m, q)
        size = a.size
        U[0, m] = float(n) ** m * np.dot(a, u[:size])
        U[1, m] = float(-n) ** m * np.dot(a, u[n::-1][:size])

    return BoundaryData(U)


# }}}


# {{{ continuation and coefficients


def continue_samples(s: GridSamples, U: BoundaryData) -> ExtendedSamples:
    """Continue grid samples to ``j = -n, ..., n - 1`` using :math:`p(U)`.

    The sample at ``j = n`` is not part of the 2-periodic data; it enters only
    through row 1 of ``U``.
    """
    n = s.n
    left = _continuation(U, np.arange(-n, 0) / n)
    return ExtendedSamples(n, np.concatenate([left, s.values[:n]]))


def extension_coefficients(e: ExtendedSamples) -> SpectralCoefficients:
    r"""Compute :math:`\hat{u}(k) = \frac{1}{2n} \sum_j e_j e^{-\pi i j k / n}`
    for ``k = -n, ..., n - 1`` with a single FFT.
    """
    n = e.n
    k = np.arange(-n, n)
    # data index a = j + n contributes exp(-2 pi i a k / 2n) * (-1)^k
    c = np.fft.fft(e.values)[k % (2 * n)] / (2 * n)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return SpectralCoefficients(n, sign * c)


# }}}
