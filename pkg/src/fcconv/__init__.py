"""Fourier-continuation quadrature for weakly singular convolution integrals

.. math::

    (A u)(x) = \\int_0^1 g(x - y) u(y) \\, dy, \\qquad
    g(x) = |x|^\\gamma \\text{ or } \\log |x|,

on equispaced grids, with end corrections for the artificial continuation.
"""

from fcconv.convolve import (
    ConvolutionPlan,
    WeightVector,
    convolve_compact,
    convolve_grid,
    convolve_grid_closed,
    convolve_point,
    quadrature_weights,
)
from fcconv.errors import (
    AliasingError,
    DomainError,
    FCConvError,
    ParameterError,
    PrecisionError,
    SingularityError,
    SizeError,
    TableFormatError,
    TableMismatchError,
    TableVersionError,
)
from fcconv.extension import (
    BoundaryData,
    ExtendedSamples,
    GridSamples,
    SpectralCoefficients,
    boundary_data_from_samples,
    continuation_eval,
    continue_samples,
    extension_coefficients,
    fd_coefficients,
    hermite_basis,
)
from fcconv.harness import (
    ConvergenceReport,
    convergence_study,
    eps_inf,
    estimate_order,
    exact_linear,
    predicted_rate,
    reference_convolution,
)
from fcconv.kernels import Kernel, correction_left, correction_right, decay_profile, kernel_eval
from fcconv.moments import (
    MomentTable,
    beta_fast_powerlaw,
    beta_singular,
    beta_table,
    cc_rule,
    load_table,
    save_table,
)

__all__ = [
    "AliasingError",
    "BoundaryData",
    "ConvergenceReport",
    "ConvolutionPlan",
    "DomainError",
    "ExtendedSamples",
    "FCConvError",
    "GridSamples",
    "Kernel",
    "MomentTable",
    "ParameterError",
    "PrecisionError",
    "SingularityError",
    "SizeError",
    "SpectralCoefficients",
    "TableFormatError",
    "TableMismatchError",
    "TableVersionError",
    "WeightVector",
    "beta_fast_powerlaw",
    "beta_singular",
    "beta_table",
    "boundary_data_from_samples",
    "cc_rule",
    "continuation_eval",
    "continue_samples",
    "convergence_study",
    "convolve_compact",
    "convolve_grid",
    "convolve_grid_closed",
    "convolve_point",
    "correction_left",
    "correction_right",
    "decay_profile",
    "eps_inf",
    "estimate_order",
    "exact_linear",
    "extension_coefficients",
    "fd_coefficients",
    "hermite_basis",
    "kernel_eval",
    "load_table",
    "predicted_rate",
    "quadrature_weights",
    "reference_convolution",
    "save_table",
]
