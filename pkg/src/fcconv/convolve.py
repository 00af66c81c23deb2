r"""The corrected spectral scheme

.. math::

    (A_n u)(x) = \sum_{k=-n}^{n-1} \beta(k) \hat{u}(k) e^{\pi i k x}
        - (C_L U)(x) - (C_R U)(x),

where :math:`\hat{u}` are the Fourier coefficients of the grid samples
continued to :math:`[-1, 0)` by the Hermite polynomial :math:`p(U)`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from fcconv.errors import DomainError, ParameterError, PrecisionError, SizeError, TableMismatchError
from fcconv.extension import (
    DEFAULT_Q,
    DEFAULT_R,
    BoundaryData,
    ExtendedSamples,
    GridSamples,
    boundary_data_from_samples,
    continue_samples,
    extension_coefficients,
)
from fcconv.kernels import Kernel, correction_left, correction_right
from fcconv.moments import MomentTable

#: imaginary parts of transformed results are discarded below this relative size
IMAG_TOLERANCE = 1.0e-10


@dataclass(frozen=True)
class ConvolutionPlan:
    """Everything needed to apply :math:`A_n` for one kernel and grid size.

    With ``derivative_mode="fd"`` the boundary data are estimated from the
    samples by one-sided finite differences of order ``q``; with ``"exact"``
    the caller passes them in.
    """

    kernel: Kernel
    table: MomentTable
    r: int = DEFAULT_R
    q: int = DEFAULT_Q
    derivative_mode: Literal["fd", "exact"] = "fd"

    def __post_init__(self) -> None:
        if self.table.kernel != self.kernel:
            raise TableMismatchError(
                f"table was built for {self.table.kernel}, plan uses {self.kernel}")
        if self.r < 0:
            raise ParameterError(f"smoothness order must be nonnegative: r = {self.r}")
        if self.q < 1:
            raise ParameterError(f"finite difference order must be positive: q = {self.q}")
        if self.derivative_mode not in ("fd", "exact"):
            raise ParameterError(f"unknown derivative mode: {self.derivative_mode!r}")
        if self.derivative_mode == "fd" and self.n < self.r + self.q:
            raise SizeError(
                f"stencil needs n >= r + q = {self.r + self.q}: n = {self.n}")

    @property
    def n(self) -> int:
        return self.table.n


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Quadrature weights :math:`w_j(x)` for ``j = -n, ..., n - 1``."""

    x: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size % 2:
            raise SizeError(f"expected an even number of weights: got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise PrecisionError("weights contain non-finite entries")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size // 2

    def at(self, j):
        return self.weights[np.asarray(j) + self.n]


# {{{ helpers


def _check_samples(plan_n: int, s: GridSamples) -> None:
    if s.n != plan_n:
        raise TableMismatchError(f"moment table has n = {plan_n}, samples have n = {s.n}")


def _boundary_data(plan: ConvolutionPlan, s: GridSamples, U: BoundaryData | None) -> BoundaryData:
    if plan.derivative_mode == "exact":
        if U is None:
            raise ParameterError("exact derivative mode requires boundary data")
        if U.r != plan.r:
            raise SizeError(f"boundary data have r = {U.r}, plan uses r = {plan.r}")
        return U
    return boundary_data_from_samples(s, plan.r, plan.q)


def _real(z: np.ndarray, scale: float, what: str) -> np.ndarray:
    residue = float(np.max(np.abs(z.imag), initial=0.0))
    if residue > IMAG_TOLERANCE * max(scale, np.finfo(np.float64).tiny):
        raise PrecisionError(f"{what}: imaginary residue {residue:.3e} exceeds tolerance",
                             delta=residue)
    return z.real.copy()


def _periodic_sum(table: MomentTable, e: ExtendedSamples) -> np.ndarray:
    r"""Return :math:`\sum_k \beta(k) \hat{u}(k) e^{\pi i k j / n}` for ``j = 0, ..., n``."""
    n = table.n
    uhat = extension_coefficients(e).values
    c = np.zeros(2 * n, dtype=np.complex128)
    c[table.k % (2 * n)] = table.values * uhat
    z = 2 * n * np.fft.ifft(c)[: n + 1]
    return _real(z, float(np.max(np.abs(z))), "inverse transform")


# }}}


def convolve_grid(plan: ConvolutionPlan, s: GridSamples,
                  U: BoundaryData | None = None) -> np.ndarray:
    """Evaluate :math:`A_n u` at ``x_j = j / n`` for ``j = 0, ..., n - 1``."""
    _check_samples(plan.n, s)
    U = _boundary_data(plan, s, U)

    x = np.arange(plan.n) / plan.n
    periodic = _periodic_sum(plan.table, continue_samples(s, U))[: plan.n]
    return (periodic
            - correction_left(plan.kernel, U, x)
            - correction_right(plan.kernel, U, x))


def convolve_grid_closed(plan: ConvolutionPlan, s: GridSamples,
                         U: BoundaryData | None = None) -> np.ndarray:
    """Like :func:`convolve_grid`, with the value at ``x = 1`` appended."""
    U = _boundary_data(plan, s, U)
    interior = convolve_grid(plan, s, U)
    return np.append(interior, convolve_point(plan, s, U, 1.0))


def quadrature_weights(plan: ConvolutionPlan, x: float) -> WeightVector:
    r"""Weights :math:`w_j(x) = \frac{1}{2n} \sum_k \beta(k) e^{\pi i k (x - j/n)}`.

    The unpaired mode ``k = -n`` is replaced by the real part of its
    contribution, i.e. by the symmetric average of the ``k = \pm n`` modes,
    which changes nothing on the grid. All weights are obtained with one FFT
    for any ``x``.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"evaluation point must lie in [0, 1]: x = {x}")

    t = plan.table
    n = t.n
    c = t.values * np.exp(1j * np.pi * t.k * x)
    c[0] = c[0].real

    # w_j = (1/2n) sum_k c_k exp(-2 pi i k j / 2n), stored at j + n
    full = np.fft.fft(np.roll(c, -n)) / (2 * n)
    w = full[np.arange(-n, n) % (2 * n)]
    return WeightVector(x, _real(w, float(np.max(np.abs(t.values))), "quadrature weights"))


def convolve_point(plan: ConvolutionPlan, s: GridSamples, U: BoundaryData | None,
                   x: float) -> float:
    """Evaluate :math:`A_n u` at an arbitrary ``x`` in ``[0, 1]`` through the
    quadrature weights.
    """
    _check_samples(plan.n, s)
    U = _boundary_data(plan, s, U)
    w = quadrature_weights(plan, x)

    e = continue_samples(s, U)
    return float(np.dot(w.weights, e.values)
                 - correction_left(plan.kernel, U, w.x)
                 - correction_right(plan.kernel, U, w.x))


def convolve_compact(table: MomentTable, s: GridSamples) -> np.ndarray:
    """Evaluate the scheme for densities vanishing to high order at both
    endpoints: zero continuation and no corrections.
    """
    _check_samples(table.n, s)
    u = s.values
    scale = float(np.max(np.abs(u)))
    if max(abs(u[0]), abs(u[-1])) > 1.0e-12 * scale:
        warnings.warn("density does not vanish at the endpoints; "
                      "the compact-support scheme will be inaccurate", stacklevel=2)

    e = ExtendedSamples(table.n, np.concatenate([np.zeros(table.n), u[: table.n]]))
    return _periodic_sum(table, e)[: table.n]
