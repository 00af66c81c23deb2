r"""Singular moments :math:`\beta(k) = \int_{-1}^{1} g(\rho) e^{\pi i k \rho} d\rho`.

The kernel singularity at :math:`\rho = 0` is smoothed by the substitution
:math:`\rho = \tau^M` with odd :math:`M`, after which the integral over
:math:`\tau \in [-1, 1]` is evaluated with an interior-node Chebyshev
(Fejér-type) rule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft
from scipy.special import bernoulli

from fcconv.errors import (
    AliasingError,
    DomainError,
    ParameterError,
    PrecisionError,
    SizeError,
    TableFormatError,
    TableMismatchError,
    TableVersionError,
)
from fcconv.kernels import Kernel, decay_profile

SCHEMA_VERSION = 1
TABLE_TOLERANCE = 1.0e-12
MAX_DOUBLINGS = 8

# {{{ quadrature rule


@dataclass(frozen=True, eq=False)
class CCRule:
    """Nodes ``cos((2j + 1) pi / (2 n_cc))`` and matching weights on ``[-1, 1]``."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_cc(self) -> int:
        return self.nodes.size

    def integrate(self, fx):
        return np.dot(fx, self.weights)


@lru_cache(maxsize=16)
def cc_rule(n_cc: int) -> CCRule:
    r"""Chebyshev rule with ``n_cc`` interior nodes.

    The weights are the primed cosine sum
    :math:`\omega_j = \frac{2}{n} \sum'_{k=0}^{n} \vartheta_k \cos((2j+1)k\pi/2n)`
    with :math:`\vartheta_k = -2/(k^2 - 1)` for even ``k`` and zero otherwise,
    evaluated as a type-III DCT. The ``k = n`` term vanishes at every node.
    """
    if n_cc < 2:
        raise ParameterError(f"need at least 2 nodes: n_cc = {n_cc}")

    j = np.arange(n_cc)
    nodes = np.cos((2 * j + 1) * np.pi / (2 * n_cc))

    k = np.arange(n_cc, dtype=np.float64)
    theta = np.zeros(n_cc)
    theta[::2] = -2.0 / (k[::2] ** 2 - 1.0)
    # dct-III computes x_0 + 2 sum_{k >= 1} x_k cos(pi k (2j + 1) / 2n)
    weights = scipy.fft.dct(theta / 2.0, type=3) * 2.0 / n_cc

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return CCRule(nodes, weights)


# }}}


# {{{ transformed integral


def default_M(g: Kernel) -> int:
    """Smallest odd ``M`` giving an (at least) eight times differentiable
    transformed integrand, capped at 15. The logarithmic kernel uses 9.
    """
    if g.is_log:
        return 9
    for M in range(3, 17, 2):
        if math.floor((1.0 + g.gamma) * (M + 1)) - 1 >= 8:
            return M
    return 15


def _check_M(M: int) -> None:
    if M < 3 or M % 2 == 0:
        raise ParameterError(f"change of variable power must be odd and >= 3: M = {M}")


def _transformed_integrand(g: Kernel, tau: np.ndarray, M: int) -> np.ndarray:
    # M tau^(M-1) g(tau^M) without forming tau^M inside the singular factor
    with np.errstate(divide="ignore", invalid="ignore"):
        logt = np.log(np.abs(tau))
        if g.is_log:
            f = M * M * np.abs(tau) ** (M - 1) * logt
        else:
            f = M * np.exp((M * (1.0 + g.gamma) - 1.0) * logt)
    return np.where(tau == 0.0, 0.0, f)


@lru_cache(maxsize=16)
def _weighted_samples(g: Kernel, M: int, n_cc: int) -> tuple[np.ndarray, np.ndarray]:
    rule = cc_rule(n_cc)
    rho = rule.nodes**M
    wf = rule.weights * _transformed_integrand(g, rule.nodes, M)
    return rho, wf


def beta_singular_many(g: Kernel, k, M: int, n_cc: int, *, chunk: int = 2**22) -> np.ndarray:
    """Vectorized :func:`beta_singular` over an array of integer frequencies."""
    _check_M(M)
    if n_cc < 2:
        raise ParameterError(f"need at least 2 nodes: n_cc = {n_cc}")

    k = np.atleast_1d(np.asarray(k))
    rho, wf = _weighted_samples(g, M, n_cc)

    out = np.empty(k.shape, dtype=np.complex128)
    step = max(1, chunk // n_cc)
    for i in range(0, k.size, step):
        kk = k[i:i + step].astype(np.float64)
        out[i:i + step] = np.exp(1j * np.pi * np.outer(kk, rho)) @ wf
    return out


def beta_singular(g: Kernel, k: int, M: int | None = None, n_cc: int = 1024) -> complex:
    r"""Approximate :math:`\beta(k)` by applying the ``n_cc``-node rule to

    .. math::

        M \int_{-1}^{1} \tau^{M-1} g(\tau^M) e^{\pi i k \tau^M} d\tau.
    """
    if M is None:
        M = default_M(g)
    return complex(beta_singular_many(g, [k], M, n_cc)[0])


def beta_zero(g: Kernel) -> float:
    r""":math:`\beta(0) = \int_{-1}^1 g`, known in closed form."""
    return -2.0 if g.is_log else 2.0 / (1.0 + g.gamma)


def beta_converged(g: Kernel, k: int, M: int | None = None, n_cc_initial: int = 256,
                   tol: float = TABLE_TOLERANCE) -> tuple[complex, int, float]:
    """Double ``n_cc`` until two successive values of ``beta(k)`` agree to ``tol``.

    Returns ``(value, n_cc, delta)`` where ``value`` is the finer of the last
    two approximations.
    """
    if M is None:
        M = default_M(g)

    n_cc = n_cc_initial
    prev = beta_singular(g, k, M, n_cc)
    delta = math.inf
    for _ in range(MAX_DOUBLINGS):
        n_cc *= 2
        cur = beta_singular(g, k, M, n_cc)
        delta = abs(cur - prev)
        if delta <= tol:
            return cur, n_cc, delta
        prev = cur

    raise PrecisionError(
        f"beta({k}) did not converge after {MAX_DOUBLINGS} doublings "
        f"(n_cc = {n_cc}, last delta = {delta:.3e})", delta=delta)


# }}}


# {{{ moment tables


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Precomputed ``beta(k)`` for ``k = -n, ..., n - 1`` (stored at ``k + n``)."""

    kernel: Kernel
    n: int
    values: np.ndarray
    M: int
    n_cc: int
    tolerance_estimate: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (2 * self.n,):
            raise SizeError(f"expected {2 * self.n} moments: got {v.shape}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.n, self.n)

    def at(self, k):
        return self.values[np.asarray(k) + self.n]

    def decay_ratio(self) -> float:
        """``max |beta(k)| |k|**p`` over ``k != 0``, ``p`` the guaranteed decay."""
        p = decay_profile(self.kernel).exponent
        k = self.k
        nz = k != 0
        return float(np.max(np.abs(self.values[nz]) * np.abs(k[nz]) ** p))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MomentTable):
            return NotImplemented
        return (self.kernel == other.kernel and self.n == other.n
                and self.M == other.M and self.n_cc == other.n_cc
                and self.tolerance_estimate == other.tolerance_estimate
                and np.array_equal(self.values, other.values))


def _full_table(n: int, positive: np.ndarray) -> np.ndarray:
    # positive[k] = beta(k) for k = 0, ..., n
    k = np.arange(-n, n)
    return np.where(k >= 0, positive[np.abs(k)], np.conj(positive[np.abs(k)]))


def beta_table(g: Kernel, n: int, M: int | None = None, n_cc_initial: int | None = None,
               tol: float = TABLE_TOLERANCE) -> MomentTable:
    """Compute the moment table for grid parameter ``n``.

    ``n_cc`` starts at ``max(256, 4 n)`` and doubles until ``beta`` at the
    probe frequencies (the largest one is the hardest) agrees between
    successive rules to ``tol``. Only ``k >= 0`` is computed; negative
    frequencies are filled in by conjugation and ``beta(0)`` is exact.
    """
    if n < 2:
        raise SizeError(f"grid parameter must be at least 2: n = {n}")
    if M is None:
        M = default_M(g)
    _check_M(M)
    if n_cc_initial is None:
        n_cc_initial = max(256, 4 * n)

    probe = np.unique([1, max(1, n // 2), n])
    n_cc = n_cc_initial
    prev = beta_singular_many(g, probe, M, n_cc)
    for _ in range(MAX_DOUBLINGS):
        n_cc *= 2
        cur = beta_singular_many(g, probe, M, n_cc)
        delta = float(np.max(np.abs(cur - prev)))
        if delta <= tol:
            break
        prev = cur
    else:
        raise PrecisionError(
            f"moment table for n = {n} did not converge after {MAX_DOUBLINGS} doublings "
            f"(n_cc = {n_cc}, last delta = {delta:.3e})", delta=delta)

    positive = beta_singular_many(g, np.arange(n + 1), M, n_cc)
    quad_zero = positive[0]
    positive[0] = beta_zero(g)

    return MomentTable(
        kernel=g, n=n, values=_full_table(n, positive), M=M, n_cc=n_cc,
        tolerance_estimate=delta,
        meta={"beta0_quadrature_error": float(abs(quad_zero - positive[0]))})


# }}}


# {{{ fast power-law moments


def _falling(s: float, i: int) -> float:
    out = 1.0
    for j in range(i):
        out *= s - j
    return out


def beta_fast_powerlaw(gamma: float, M: int, n_cc: int, k_max: int,
                       n_bernoulli: int | None = None) -> np.ndarray:
    r"""Moments of ``|x|**gamma`` for ``k = 0, ..., k_max`` via one FFT.

    Integrating by parts ``2 M`` times leaves a closed-form head plus a
    multiple of :math:`\int_{-1}^1 |\rho|^{2M+\gamma} e^{\pi i k \rho} d\rho`.
    The latter is approximated by the periodic trapezoidal rule on ``n_cc``
    points (all ``k`` at once by FFT) with Euler-Maclaurin endpoint
    corrections of depth ``n_bernoulli`` (default ``M - 1``).

    The remainder is multiplied by :math:`(\pi k)^{2M}`, so both the
    trapezoidal error and roundoff are amplified at large ``k``; keep
    ``k_max`` well below ``n_cc / 2``.
    """
    if not gamma > -1.0:
        raise DomainError(f"exponent must exceed -1: gamma = {gamma}")
    if M < 1:
        raise ParameterError(f"need at least one integration by parts: M = {M}")
    if 2 * k_max >= n_cc:
        raise AliasingError(f"need k_max < n_cc / 2: k_max = {k_max}, n_cc = {n_cc}")
    if n_bernoulli is None:
        n_bernoulli = M - 1

    k = np.arange(k_max + 1)
    omega = np.pi * k
    sign = np.where(k % 2 == 0, 1.0, -1.0)

    head = np.zeros(k.size)
    denom = 1.0
    for ell in range(1, M + 1):
        denom *= (2 * ell - 2 + gamma) * (2 * ell - 1 + gamma) if ell > 1 else (1.0 + gamma)
        head += (-1) ** (ell - 1) * omega ** (2 * (ell - 1)) / denom
    head *= 2.0 * sign

    s = 2 * M + gamma
    prefactor = (-1) ** M * omega ** (2 * M) / math.prod(j + gamma for j in range(1, 2 * M + 1))

    # trapezoidal sum on rho_m = -1 + 2 m / n_cc, m = 0, ..., n_cc - 1
    h = 2.0 / n_cc
    rho = -1.0 + h * np.arange(n_cc)
    trap = h * n_cc * np.fft.ifft(np.abs(rho) ** s)[k] * sign

    # psi^(j)(1) - psi^(j)(-1) = 2 Re psi^(j)(1) for odd j
    B = bernoulli(2 * n_bernoulli) if n_bernoulli > 0 else None
    correction = np.zeros(k.size, dtype=np.complex128)
    for m in range(1, n_bernoulli + 1):
        j = 2 * m - 1
        dpsi = sum(math.comb(j, i) * _falling(s, i) * (1j * omega) ** (j - i) for i in range(j + 1))
        jump = 2.0 * np.real(dpsi * sign)
        correction += B[2 * m] * h ** (2 * m) / math.factorial(2 * m) * jump

    return head + prefactor * (trap - correction)


# }}}


# {{{ serialization


def _kernel_to_json(g: Kernel) -> dict:
    return {"variant": g.variant} if g.is_log else {"variant": g.variant, "gamma": g.gamma}


def table_to_json(t: MomentTable) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kernel": _kernel_to_json(t.kernel),
        "n": t.n,
        "M": t.M,
        "n_cc_final": t.n_cc,
        "tolerance_estimate": t.tolerance_estimate,
        "values": [[float(v.real), float(v.imag)] for v in t.values],
    }
    return json.dumps(doc, indent=1)


def table_from_json(text: str) -> MomentTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"moment table is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TableFormatError("moment table must be a JSON object")

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise TableVersionError(
            f"unsupported schema_version {version!r}: expected {SCHEMA_VERSION}")

    try:
        kd = doc["kernel"]
        kernel = Kernel(kd["variant"], kd.get("gamma"))
        n = int(doc["n"])
        values = np.array([complex(re, im) for re, im in doc["values"]], dtype=np.complex128)
        return MomentTable(
            kernel=kernel, n=n, values=values, M=int(doc["M"]),
            n_cc=int(doc["n_cc_final"]),
            tolerance_estimate=float(doc["tolerance_estimate"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise TableFormatError(f"malformed moment table: {exc}") from exc


def save_table(t: MomentTable, path) -> None:
    Path(path).write_text(table_to_json(t), encoding="utf-8")


def load_table(path, *, kernel: Kernel | None = None, n: int | None = None) -> MomentTable:
    """Load a table; optionally require a given kernel and grid parameter."""
    t = table_from_json(Path(path).read_text(encoding="utf-8"))
    if kernel is not None and t.kernel != kernel:
        raise TableMismatchError(f"table kernel {t.kernel} does not match {kernel}")
    if n is not None and t.n != n:
        raise TableMismatchError(f"table grid n = {t.n} does not match n = {n}")
    return t


# }}}
