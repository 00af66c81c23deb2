r"""Weakly singular convolution kernels and the analytic end corrections.

Two kernel families are supported: :math:`g(x) = |x|^\gamma` with
:math:`\gamma > -1` and :math:`g(x) = \log |x|`. The corrections

.. math::

    (C_L U)(x) = \int_{x-1}^{0} g(x - y)\, p(U)(y)\, dy, \qquad
    (C_R U)(x) = \int_{1}^{x+1} g(x - y)\, p(U)(y - 2)\, dy

remove the contribution of the artificial continuation region from the
periodic convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from fcconv.errors import DomainError, SingularityError
from fcconv.extension import BoundaryData, _continuation, continuation_monomial_coefficients

GAMMA_MAX = 20.0


@dataclass(frozen=True)
class Kernel:
    """A power-law kernel ``|x|**gamma`` or the logarithmic kernel ``log|x|``."""

    variant: Literal["power", "log"]
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.variant == "power":
            if self.gamma is None:
                raise DomainError("power-law kernel requires an exponent")
            gamma = float(self.gamma)
            if not -1.0 < gamma <= GAMMA_MAX:
                raise DomainError(f"exponent must lie in (-1, {GAMMA_MAX:g}]: gamma = {gamma}")
            object.__setattr__(self, "gamma", gamma)
        elif self.variant == "log":
            if self.gamma is not None:
                raise DomainError("logarithmic kernel takes no exponent")
        else:
            raise DomainError(f"unknown kernel variant: {self.variant!r}")

    @classmethod
    def power(cls, gamma: float) -> Kernel:
        return cls("power", gamma)

    @classmethod
    def log(cls) -> Kernel:
        return cls("log")

    @property
    def is_log(self) -> bool:
        return self.variant == "log"

    def __call__(self, x):
        return kernel_eval(self, x)

    def __str__(self) -> str:
        return "log|x|" if self.is_log else f"|x|^{self.gamma:g}"


@dataclass(frozen=True)
class DecayProfile:
    """Guaranteed algebraic decay ``|beta(k)| <= constant_hint * |k|**-exponent``.

    ``constant_hint`` is only known in closed form for the logarithmic kernel
    and is ``nan`` otherwise.
    """

    exponent: float
    constant_hint: float


def kernel_eval(g: Kernel, x):
    """Evaluate the kernel at nonzero ``x``."""
    xa = np.abs(np.asarray(x, dtype=np.float64))
    if np.any(xa == 0.0):
        raise SingularityError("kernel evaluated at its singular point x = 0")

    result = np.log(xa) if g.is_log else xa**g.gamma
    return float(result) if result.ndim == 0 else result


def decay_profile(g: Kernel) -> DecayProfile:
    if g.is_log:
        return DecayProfile(exponent=1.0, constant_hint=2.0)
    return DecayProfile(exponent=min(1.0 + g.gamma, 2.0), constant_hint=math.nan)


# {{{ one-sided moments


def _power_tail(a: float, z: np.ndarray) -> np.ndarray:
    """``(1 - z**a) / a`` for ``z`` in ``[0, 1]``, accurate near ``z = 1``."""
    with np.errstate(divide="ignore"):
        logz = np.log(z)
    return -np.expm1(a * logz) / a


def _log_tail(p: int, z: np.ndarray) -> np.ndarray:
    r""":math:`\int_z^1 t^p \log t \, dt` for ``z`` in ``[0, 1]``."""
    a = p + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(z)
        zlogz = np.where(z > 0.0, np.exp(a * logz) * logz, 0.0)
    return np.expm1(a * logz) / a**2 - zlogz / a


def _tails(g: Kernel, kmax: int, z: np.ndarray) -> list[np.ndarray]:
    r"""Return :math:`\int_z^1 g(t) t^k dt` for ``k = 0, ..., kmax``."""
    if g.is_log:
        return [_log_tail(k, z) for k in range(kmax + 1)]
    return [_power_tail(k + 1.0 + g.gamma, z) for k in range(kmax + 1)]


def _shifted_monomial_integrals(g: Kernel, degree: int, base: np.ndarray,
                                z: np.ndarray, sign: int) -> list[np.ndarray]:
    r"""Return :math:`\int_z^1 g(t) (b + s t)^j dt` for ``j = 0, ..., degree``.

    Expands :math:`(b + s t)^j` binomially around ``b = base`` with
    ``s = sign``.
    """
    tails = _tails(g, degree, z)
    out = []
    for j in range(degree + 1):
        acc = np.zeros_like(z)
        for k in range(j + 1):
            acc = acc + (sign**k * math.comb(j, k)) * base ** (j - k) * tails[k]
        out.append(acc)
    return out


# }}}


# {{{ corrections


@lru_cache(maxsize=32)
def _power_correction_coefficients(r: int) -> tuple[list, list]:
    """Exact integer-rational weights of the nested binomial sums.

    Returns, for each ``m``, the list of ``(degree, weight)`` pairs such that
    ``p_m^0(y) = sum weight * y**degree`` (first list) and likewise for
    ``p_m^1`` (second list), grouped exactly as in the nested sums over the
    Hermite factor, the ``(1 + y)**(r + 1)`` or ``(1 + y)**(m + n)`` binomial,
    and the truncated series.
    """
    left, right = [], []
    for m in range(r + 1):
        terms0, terms1 = [], []
        for n in range(r - m + 1):
            c = math.comb(r + n, n)
            for q in range(r + 2):
                terms0.append((m + n + q, (-1) ** n * c * math.comb(r + 1, q)))
            for q in range(m + n + 1):
                terms1.append((r + q + 1, (-1) ** (r + 1) * c * math.comb(m + n, q)))
        left.append(terms0)
        right.append(terms1)
    return left, right


def _power_correction(g: Kernel, U: BoundaryData, x: np.ndarray, side: str) -> np.ndarray:
    r = U.r
    if side == "left":
        # int_x^1 t^gamma (x - t)^j dt
        moments = _shifted_monomial_integrals(g, 2 * r + 1, x, x, -1)
    else:
        # int_{1-x}^1 t^gamma (x - 2 + t)^j dt
        moments = _shifted_monomial_integrals(g, 2 * r + 1, x - 2.0, 1.0 - x, 1)

    terms0, terms1 = _power_correction_coefficients(r)
    result = np.zeros_like(x)
    for m in range(r + 1):
        scale = 1.0 / math.factorial(m)
        if U.values[0, m] != 0.0:
            acc = sum(w * moments[d] for d, w in terms0[m])
            result = result + U.values[0, m] * scale * acc
        if U.values[1, m] != 0.0:
            acc = sum(w * moments[d] for d, w in terms1[m])
            result = result + U.values[1, m] * scale * acc
    return result


def _monomial_correction(g: Kernel, U: BoundaryData, x: np.ndarray, side: str) -> np.ndarray:
    c = continuation_monomial_coefficients(U)
    degree = c.size - 1
    if side == "left":
        moments = _shifted_monomial_integrals(g, degree, x, x, -1)
    else:
        moments = _shifted_monomial_integrals(g, degree, x - 2.0, 1.0 - x, 1)
    return sum(cj * mj for cj, mj in zip(c, moments))


def _closed_form(g: Kernel, U: BoundaryData, x: np.ndarray, side: str) -> np.ndarray:
    if g.is_log:
        return _monomial_correction(g, U, x, side)
    return _power_correction(g, U, x, side)


def _left_gauss(g: Kernel, U: BoundaryData, x: np.ndarray) -> np.ndarray:
    # only used for x > GAUSS_SWITCH, where g is analytic on [x, 1] and the
    # singularity is far enough away for fast convergence
    nodes, weights = np.polynomial.legendre.leggauss(U.r + 25)
    half = 0.5 * (1.0 - x)[:, None]
    t = x[:, None] + half * (nodes + 1.0)
    gt = np.log(t) if g.is_log else t**g.gamma
    return np.sum(half * weights * gt * _continuation(U, x[:, None] - t), axis=1)


def mirror(U: BoundaryData) -> BoundaryData:
    """Boundary data of the reflected polynomial ``p(U)(-1 - y)``."""
    s = (-1.0) ** np.arange(U.r + 1)
    return BoundaryData(np.array([s * U.values[1], s * U.values[0]]))


GAUSS_SWITCH = 0.1


def _left(g: Kernel, U: BoundaryData, x: np.ndarray) -> np.ndarray:
    result = np.empty_like(x)
    near = x <= GAUSS_SWITCH
    if np.any(near):
        result[near] = _closed_form(g, U, x[near], "left")
    if not np.all(near):
        result[~near] = _left_gauss(g, U, x[~near])
    return result


def _correction(g: Kernel, U: BoundaryData, x, side: str, method: str):
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("corrections are only defined for x in [0, 1]")

    x1 = np.atleast_1d(xa).astype(np.float64)
    if method == "auto":
        result = _left(g, U, x1) if side == "left" else _left(g, mirror(U), 1.0 - x1)
    elif method == "closed":
        result = _closed_form(g, U, x1, side)
    elif method == "monomial":
        result = _monomial_correction(g, U, x1, side)
    else:
        raise ValueError(f"unknown method: {method!r}")

    return float(result[0]) if xa.ndim == 0 else result


def correction_left(g: Kernel, U: BoundaryData, x, *, method: str = "auto"):
    r"""Evaluate :math:`(C_L U)(x) = \int_{x-1}^0 g(x - y) p(U)(y) dy`.

    With ``method="closed"`` the nested binomial sums (power law) or the
    monomial expansion of :math:`p(U)` (logarithm) are used for every ``x``.
    These lose relative accuracy as ``x`` grows, so the default ``"auto"``
    switches to Gauss-Legendre on ``[x, 1]`` for ``x > 0.1``, where the
    kernel is analytic and the rule is accurate to roundoff.
    """
    return _correction(g, U, x, "left", method)


def correction_right(g: Kernel, U: BoundaryData, x, *, method: str = "auto"):
    r"""Evaluate :math:`(C_R U)(x) = \int_1^{x+1} g(x - y) p(U)(y - 2) dy`.

    By default this uses :math:`(C_R U)(x) = (C_L \tilde U)(1 - x)`, where
    :math:`\tilde U` is :func:`mirror` of ``U``. ``method="closed"``
    evaluates the direct binomial expansion around ``x - 2``, which is
    considerably worse conditioned.
    """
    return _correction(g, U, x, "right", method)


# }}}
