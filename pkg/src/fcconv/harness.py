"""Reference values, error metrics and grid-refinement studies."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Literal

import numpy as np
from scipy.special import roots_jacobi

from fcconv.errors import DomainError, ParameterError, PrecisionError, SizeError
from fcconv.convolve import ConvolutionPlan, convolve_compact, convolve_grid_closed
from fcconv.extension import BoundaryData, GridSamples
from fcconv.kernels import Kernel
from fcconv.moments import MomentTable, beta_table

# {{{ densities


@dataclass(frozen=True)
class Density:
    """A test density with its derivatives (for exact boundary data).

    ``vanishing_order`` is the number of derivatives (counting the function
    itself) that vanish at both endpoints: zero for generic densities,
    ``inf`` for ones that vanish to all orders in floating point.
    ``degree`` is set for polynomial densities.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[int, float], float]
    vanishing_order: float = 0
    degree: int | None = None

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=np.float64))

    def boundary_data(self, r: int) -> BoundaryData:
        return BoundaryData.from_derivatives(
            [self.derivative(m, 0.0) for m in range(r + 1)],
            [self.derivative(m, 1.0) for m in range(r + 1)])


GAUSS_WIDTH = 0.01


def _linear_derivative(m: int, x: float) -> float:
    return x if m == 0 else (1.0 if m == 1 else 0.0)


def _gauss_derivative(m: int, x: float) -> float:
    z = (x - 0.5) / GAUSS_WIDTH
    hm = np.polynomial.hermite.hermval(z, [0] * m + [1])
    return float((-1) ** m * hm * np.exp(-z * z) / GAUSS_WIDTH**m)


_POLY3 = np.polynomial.Polynomial([0, 0, 0, 1, -3, 3, -1])


DENSITIES = {
    "x": Density("x", lambda x: x.copy(), _linear_derivative, degree=1),
    "cos": Density("cos", np.cos, lambda m, x: math.cos(x + m * math.pi / 2)),
    "gauss": Density("gauss", lambda x: np.exp(-(((x - 0.5) / GAUSS_WIDTH) ** 2)),
                     _gauss_derivative, vanishing_order=math.inf),
    "poly3": Density("poly3", _POLY3, lambda m, x: float(_POLY3.deriv(m)(x)) if m else float(_POLY3(x)),
                     vanishing_order=3, degree=6),
}


def get_density(name: str) -> Density:
    try:
        return DENSITIES[name]
    except KeyError:
        raise ParameterError(
            f"unknown density {name!r}: expected one of {sorted(DENSITIES)}") from None


# }}}


# {{{ reference quadrature


@lru_cache(maxsize=8)
def _gauss_legendre(p: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(p)
    return 0.5 * (t + 1.0), 0.5 * w


@lru_cache(maxsize=8)
def _singular_rule(g: Kernel, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Rule on ``[0, 1]`` absorbing the kernel singularity at ``t = 0``.

    Returns ``(t, w, wlog)``: for the power law, ``sum w f(t)`` approximates
    ``int_0^1 t**gamma f(t) dt`` (Gauss-Jacobi); for the logarithm, the graded
    substitution ``t = tau**9`` gives ``sum w f(t)`` for ``int_0^1 f`` and
    ``sum wlog f(t)`` for ``int_0^1 log(t) f(t) dt``.
    """
    if g.is_log:
        M = 9
        tau, wt = _gauss_legendre(p)
        t = tau**M
        w = M * tau ** (M - 1) * wt
        return t, w, w * M * np.log(tau)

    s, w = roots_jacobi(p, 0.0, g.gamma)
    return 0.5 * (s + 1.0), w / 2.0 ** (1.0 + g.gamma), None


def _kernel_rule(g: Kernel, length: np.ndarray, panels: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    r"""Nodes ``t`` and weights ``w`` (one row per entry of ``length``) with
    :math:`\sum w f(t) \approx \int_0^L g(t) f(t) dt`.

    The first of ``panels`` equal panels uses the singular rule, the rest use
    Gauss-Legendre with ``p`` nodes.
    """
    L = length[:, None]
    a = L / panels

    ts, ws, wlog = _singular_rule(g, p)
    t0 = a * ts
    if g.is_log:
        w0 = a * (np.log(a) * ws + wlog)
    else:
        w0 = a ** (1.0 + g.gamma) * ws

    tg, wg = _gauss_legendre(p)
    offsets = np.arange(1, panels)[:, None] + tg[None, :]
    t1 = a * offsets.ravel()[None, :]
    gt = np.log(t1) if g.is_log else t1**g.gamma
    w1 = a * np.tile(wg, panels - 1)[None, :] * gt

    return np.hstack([t0, t1]), np.hstack([w0, w1])


def _convolution_rule(g: Kernel, u, x: np.ndarray, panels: int, p: int) -> np.ndarray:
    # split at y = x: int_0^x g(t) u(x - t) dt + int_0^{1-x} g(t) u(x + t) dt
    out = np.zeros_like(x)
    for sign, length in ((-1.0, x), (1.0, 1.0 - x)):
        live = length > 0.0
        if not np.any(live):
            continue
        t, w = _kernel_rule(g, length[live], panels, p)
        out[live] += np.sum(w * u(x[live, None] + sign * t), axis=1)
    return out


REFERENCE_BUDGET = 2**20


def reference_convolution_many(g: Kernel, u, x, tol: float = 1.0e-13, *,
                               panels: int = 16, nodes: int = 24,
                               chunk: int = 256) -> np.ndarray:
    r"""Accurate :math:`\int_0^1 g(x - y) u(y) dy` at many points.

    The integral is split at the singular point ``y = x``. On each side the
    panel touching the singularity uses a rule that absorbs it (Gauss-Jacobi
    for ``|t|**gamma``, a ``t = tau**9`` graded Gauss-Legendre rule for
    ``log|t|``), the others plain Gauss-Legendre. The panel count is doubled
    until two successive results agree to ``tol`` (absolute, scaled by
    ``max(1, |result|)``), up to ``REFERENCE_BUDGET`` evaluations per point.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("reference convolution requires x in [0, 1]")
    if tol < 1.0e-13:
        raise ParameterError(f"tolerance below 1e-13 is not attainable: tol = {tol}")

    out = np.empty_like(x)
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk]
        m = panels
        prev = _convolution_rule(g, u, xs, m, nodes)
        delta = math.inf
        while True:
            m *= 2
            if 2 * m * nodes > REFERENCE_BUDGET:
                raise PrecisionError(
                    f"reference quadrature did not reach tol = {tol:g} "
                    f"(last change {delta:.3e})", delta=delta)
            cur = _convolution_rule(g, u, xs, m, nodes)
            delta = float(np.max(np.abs(cur - prev)))
            if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
                break
            prev = cur
        out[i:i + chunk] = cur
    return out


def reference_convolution(g: Kernel, u, x: float, tol: float = 1.0e-13) -> float:
    """Scalar version of :func:`reference_convolution_many`."""
    return float(reference_convolution_many(g, u, [x], tol)[0])


def exact_linear(gamma: float, x):
    r"""Closed form of :math:`\int_0^1 |x - y|^\gamma y \, dy`."""
    if not gamma > -1.0:
        raise DomainError(f"exponent must exceed -1: gamma = {gamma}")
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError("closed form is stated for x in [0, 1]")

    d = (gamma + 1.0) * (gamma + 2.0)
    result = x ** (gamma + 2.0) / d + (1.0 - x) ** (gamma + 1.0) * (1.0 + gamma + x) / d
    return float(result) if result.ndim == 0 else result


# }}}


# {{{ metrics


def eps_inf(exact, approx) -> float:
    """Relative maximum-norm error ``max|exact - approx| / max|exact|``."""
    exact = np.asarray(exact, dtype=np.float64)
    approx = np.asarray(approx, dtype=np.float64)
    if exact.shape != approx.shape:
        raise SizeError(f"shape mismatch: {exact.shape} vs {approx.shape}")

    scale = np.max(np.abs(exact))
    if scale == 0.0:
        raise ZeroDivisionError("relative error of an identically zero reference")
    return float(np.max(np.abs(exact - approx)) / scale)


def estimate_order(err_n: float, err_2n: float) -> float:
    """Observed order ``log2(err_n / err_2n)`` from a grid doubling."""
    if not (err_n > 0.0 and err_2n > 0.0):
        raise DomainError(f"errors must be positive: {err_n}, {err_2n}")
    return math.log2(err_n / err_2n)


def kernel_rate_exponent(g: Kernel) -> float:
    """Exponent entering the rate: ``gamma`` capped at 1, zero for the logarithm."""
    return 0.0 if g.is_log else min(g.gamma, 1.0)


def predicted_rate(g: Kernel, r: int, q: float, vanishing_order: float | None = None) -> float:
    r"""Predicted convergence order :math:`\min\{2+q+\gamma, 2+q, \delta, \delta+\gamma\}`.

    Here :math:`\delta = 2 + r` for even ``r`` and :math:`3 + r` for odd
    ``r``. Pass ``q = inf`` when the boundary data are exact. For the
    compact-support scheme pass ``vanishing_order`` ``v``; the density then
    behaves like one with ``r = v - 1`` and exact data.
    """
    gamma = kernel_rate_exponent(g)
    if vanishing_order is not None:
        if math.isinf(vanishing_order):
            return math.inf
        r, q = int(vanishing_order) - 1, math.inf

    delta = 2 + (r if r % 2 == 0 else r + 1)
    return min(2 + q + gamma, 2 + q, delta, delta + gamma)


def effective_q(density: Density, q: int, mode: str = "fd") -> float:
    """``inf`` when the boundary data used by ``mode`` are exact for ``density``.

    A one-sided stencil of order ``q`` for the ``m``-th derivative is exact
    for polynomials of degree ``m + q - 1``, so every stencil is exact once
    the density's degree is at most ``q``.
    """
    if mode == "exact":
        return math.inf
    if density.degree is not None and density.degree <= q:
        return math.inf
    return q


# }}}


# {{{ studies


#: relative errors below this are treated as dominated by rounding
ROUNDOFF_FLOOR = 1.0e-12


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    eps_inf: float
    order: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    kernel: Kernel
    density_name: str
    r: int
    q: int
    rows: tuple[ConvergenceRow, ...]
    predicted_rate: float
    mode: str = "fd"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        ns = [row.n for row in self.rows]
        if any(b != 2 * a for a, b in zip(ns, ns[1:])):
            raise SizeError(f"levels must double: n = {ns}")

    def _final_row(self) -> ConvergenceRow | None:
        if len(self.rows) < 2:
            return None
        for coarse, fine in zip(self.rows[-2::-1], self.rows[::-1]):
            if fine.eps_inf >= ROUNDOFF_FLOOR and coarse.eps_inf >= ROUNDOFF_FLOOR:
                return fine
        return self.rows[-1]

    @property
    def final_order(self) -> float | None:
        """Order between the two finest levels whose errors both exceed
        :data:`ROUNDOFF_FLOOR` (the finest pair if none do).
        """
        row = self._final_row()
        return None if row is None else row.order

    @property
    def final_level(self) -> int | None:
        """Finer grid parameter of the pair providing :attr:`final_order`."""
        row = self._final_row()
        return None if row is None else row.n

    @property
    def orders(self) -> list[float]:
        return [row.order for row in self.rows[1:]]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["n", "h", "eps_inf", "order"])
            for row in self.rows:
                w.writerow([row.n, repr(row.h), repr(row.eps_inf),
                            "" if row.order is None else repr(row.order)])

    def to_json(self, path) -> None:
        doc = {
            "kernel": {"variant": self.kernel.variant, "gamma": self.kernel.gamma},
            "density": self.density_name,
            "r": self.r,
            "q": self.q,
            "mode": self.mode,
            "predicted_rate": None if math.isinf(self.predicted_rate) else self.predicted_rate,
            "final_order": self.final_order,
            "roundoff_floor": ROUNDOFF_FLOOR,
            "rows": [asdict(row) for row in self.rows],
        }
        Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


@lru_cache(maxsize=64)
def cached_table(g: Kernel, n: int) -> MomentTable:
    return beta_table(g, n)


def dyadic_levels(n_min: int, n_max: int) -> list[int]:
    if n_min < 2 or n_max < n_min:
        raise ParameterError(f"invalid level range: {n_min}..{n_max}")
    levels = [n_min]
    while 2 * levels[-1] <= n_max:
        levels.append(2 * levels[-1])
    return levels


def _reference_values(g: Kernel, density: Density, n_max: int) -> np.ndarray:
    x = np.arange(n_max + 1) / n_max
    if density.name == "x" and not g.is_log:
        return exact_linear(g.gamma, x)
    return _reference_cache(g, density.name, n_max)


@lru_cache(maxsize=32)
def _reference_cache(g: Kernel, name: str, n_max: int) -> np.ndarray:
    x = np.arange(n_max + 1) / n_max
    values = reference_convolution_many(g, get_density(name), x, tol=1.0e-13)
    values.setflags(write=False)
    return values


def convergence_study(g: Kernel, density: str | Density, r: int, q: int,
                      n_list, mode: Literal["fd", "exact", "compact"] = "fd",
                      ) -> ConvergenceReport:
    """Run the scheme on dyadic grids and measure errors against the reference.

    In ``"compact"`` mode the corrections-free scheme is used and ``r``, ``q``
    only label the report; its predicted rate follows from the density's
    vanishing order (``inf`` meaning super-algebraic).
    """
    if isinstance(density, str):
        density = get_density(density)
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise ParameterError("need at least one grid level")
    if mode not in ("fd", "exact", "compact"):
        raise ParameterError(f"unknown mode: {mode!r}")

    n_max = n_list[-1]
    reference = _reference_values(g, density, n_max)

    rows: list[ConvergenceRow] = []
    for n in n_list:
        if n_max % n:
            raise SizeError(f"levels must divide the finest grid: {n} vs {n_max}")
        s = GridSamples.from_function(density, n)
        table = cached_table(g, n)
        exact = reference[:: n_max // n]
        if mode == "compact":
            approx = convolve_compact(table, s)
            exact = exact[:n]
        else:
            plan = ConvolutionPlan(g, table, r, q, "exact" if mode == "exact" else "fd")
            U = density.boundary_data(r) if mode == "exact" else None
            approx = convolve_grid_closed(plan, s, U)

        err = eps_inf(exact, approx)
        order = estimate_order(rows[-1].eps_inf, err) if rows else None
        rows.append(ConvergenceRow(n, 1.0 / n, err, order))

    if mode == "compact":
        rate = predicted_rate(g, r, q, vanishing_order=density.vanishing_order)
    else:
        rate = predicted_rate(g, r, effective_q(density, q, mode))
    return ConvergenceReport(g, density.name, r, q, tuple(rows), rate, mode)


# }}}
