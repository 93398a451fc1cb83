# Copyright 2019 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Fractional integrals and derivatives of sampled paths.

The Riemann-Liouville integral of order alpha is

    J^alpha f(t) = 1 / Gamma(alpha) * int_a^t (t - s)^(alpha - 1) f(s) ds.

It is computed by integrating the piecewise-linear interpolant of f exactly
against the singular kernel (product trapezoid rule). The weights depend on the
distance j - k between nodes only, apart from the weight of f(a), so the sums
are evaluated as a convolution.

The Riemann-Liouville derivative is d/dt of J^(1 - alpha), the Caputo derivative
is the Riemann-Liouville derivative of f - f(a). Time derivatives use centered
differences in the interior and second-order one-sided differences at the ends.
"""
from __future__ import annotations

import functools
import math
from typing import NamedTuple, Tuple

import mpmath
import numpy as np
from scipy import signal, special

from .paths import SampledPath
from .state import OrderLike, as_order, is_zero_order
from .utils import ContractError


def gamma(x: float) -> float:
    """The Gamma function on the positive reals."""
    if not (x > 0 and math.isfinite(x)):
        raise ContractError(f"gamma is defined for finite x > 0, got {x}")
    return float(special.gamma(x))


@functools.lru_cache(maxsize=64)
def _trapezoid_weights(n_steps: int, alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Unscaled product trapezoid weights.

    Returns:
        A pair (start, kernel). start[j] is the weight of f(a) at node j and
        kernel[m] is the weight of f(t_{j - m}) at node j, for j - m >= 1.
    """
    j = np.arange(n_steps + 1, dtype=float)
    p = alpha + 1.0
    start = np.zeros(n_steps + 1)
    start[1:] = (j[1:] - 1) ** p - (j[1:] - 1 - alpha) * j[1:] ** alpha
    kernel = np.ones(n_steps + 1)
    m = j[1:]
    kernel[1:] = (m + 1) ** p + (m - 1) ** p - 2 * m ** p
    start.setflags(write=False)
    kernel.setflags(write=False)
    return start, kernel


def fractional_sums(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    """Apply the product trapezoid rule for J^alpha to raw node values.

    Args:
        values: Array of shape (n_steps + 1, dim).
        h: Grid step.
        alpha: Order in (0, 1].

    Returns:
        Array of the same shape holding J^alpha f at every node; row 0 is zero.
    """
    n_steps = values.shape[0] - 1
    start, kernel = _trapezoid_weights(n_steps, alpha)
    interior = np.array(values, dtype=float)
    interior[0] = 0.0
    sums = signal.fftconvolve(kernel[:, None], interior, axes=0)[: n_steps + 1]
    out = start[:, None] * values[0] + sums
    out[0] = 0.0
    return out * (h ** alpha / special.gamma(alpha + 2))


def rl_integral(f: SampledPath, alpha: OrderLike) -> SampledPath:
    """The Riemann-Liouville integral J^alpha f on the grid of f.

    Args:
        f: The integrand.
        alpha: The order. The plain number 0 denotes the identity J^0 f = f.

    Returns:
        J^alpha f, with value 0 at the left endpoint.
    """
    if is_zero_order(alpha):
        return f
    order = as_order(alpha)
    return f.with_values(fractional_sums(f.values, f.grid.h, order.alpha))


def _require_three_nodes(f: SampledPath) -> None:
    if f.grid.n_steps < 2:
        raise ContractError("grid too small: differentiation needs at least 3 nodes")


@functools.lru_cache(maxsize=64)
def _starting_weights(n_steps: int, alpha: float) -> np.ndarray:
    """Starting weights for J^(1 - alpha) on paths that start like (t - a)^alpha.

    The product trapezoid rule is exact for 1 and t only. Corrections on the
    first nodes make the rule exact for t^alpha and t^(1 + alpha) as well,
    keeping it exact for 1 and t. Integrals J^alpha f with f(a) != 0 start like
    f(a) t^alpha / Gamma(alpha + 1).

    Returns:
        Array of shape (m, n_steps + 1) on a unit grid: row k holds the extra
        weight of f(t_k) at every node, to be scaled by h^(1 - alpha).
    """
    beta = 1.0 - alpha
    exponents = np.array([0.0, alpha, 1.0, 1.0 + alpha])[: min(4, n_steps + 1)]
    k = np.arange(n_steps + 1, dtype=float)
    powers = k[:, None] ** exponents
    scale = special.gamma(exponents + 1) / special.gamma(exponents + beta + 1)
    defect = scale * k[:, None] ** (exponents + beta) - fractional_sums(powers, 1.0, beta)
    m = len(exponents)
    weights = np.linalg.solve(powers[:m].T, defect.T)
    weights.setflags(write=False)
    return weights


def rl_derivative(f: SampledPath, alpha: OrderLike) -> SampledPath:
    """The Riemann-Liouville derivative d/dt J^(1 - alpha) f.

    J^(1 - alpha) f is corrected with starting weights so that paths with a
    leading (t - a)^alpha term, such as J^alpha g with g(a) != 0, are
    differentiated consistently up to the left endpoint.
    """
    _require_three_nodes(f)
    order = as_order(alpha)
    integral = rl_integral(f, order.complement()).values
    if order.alpha < 1:
        weights = _starting_weights(f.grid.n_steps, order.alpha)
        head = f.values[: weights.shape[0]]
        integral = integral + f.grid.h ** order.complement() * (weights.T @ head)
    return f.with_values(np.gradient(integral, f.grid.h, axis=0, edge_order=2))


def caputo_derivative(f: SampledPath, alpha: OrderLike) -> SampledPath:
    """The Caputo derivative, i.e. the Riemann-Liouville derivative of f - f(a)."""
    return rl_derivative(f.shifted(), alpha)


def caputo_l1(f: SampledPath, alpha: OrderLike) -> SampledPath:
    """The Caputo derivative by the L1 scheme.

    Differences f(t_i) - f(t_{i-1}) are summed against the weights
    w_k = (k + 1)^(1 - alpha) - k^(1 - alpha). At the left endpoint the value is
    0 for alpha < 1 and a second-order one-sided difference for alpha = 1.
    """
    _require_three_nodes(f)
    a = as_order(alpha).alpha
    n_steps, h = f.grid.n_steps, f.grid.h
    k = np.arange(n_steps, dtype=float)
    if a == 1.0:
        weights = np.zeros(n_steps)
        weights[0] = 1.0
    else:
        weights = (k + 1) ** (1 - a) - k ** (1 - a)
    differences = np.diff(f.values, axis=0)
    sums = signal.fftconvolve(weights[:, None], differences, axes=0)[:n_steps]
    out = np.zeros_like(f.values)
    out[1:] = sums * (h ** (-a) / special.gamma(2 - a))
    if a == 1.0:
        out[0] = (-3 * f.values[0] + 4 * f.values[1] - f.values[2]) / (2 * h)
    return f.with_values(out)


# Decimal digits carried beyond the size of the largest term.
_GUARD_DIGITS = 20
_TAIL_RTOL = 1e-16
_MAX_TERMS = 20000


class SeriesValue(NamedTuple):
    """A truncated series together with a bound on the neglected tail."""

    value: float
    tail_bound: float


def _log_tail_bounds(order: float, log_z: float, n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Log term magnitudes and log tail bounds after summing k = 0, ..., K.

    The term ratio |z| Gamma(alpha k + 1) / Gamma(alpha k + alpha + 1) decreases
    in k, so once it drops below 1 the remainder is dominated by a geometric
    series started at the next term.
    """
    k = np.arange(n_max + 3, dtype=float)
    log_terms = k * log_z - special.gammaln(order * k + 1)
    log_ratio = np.diff(log_terms)[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_tail = np.where(
            log_ratio < 0, log_terms[1:-1] - np.log1p(-np.exp(log_ratio)), np.inf
        )
    return log_terms, log_tail


def mittag_leffler(alpha: OrderLike, z: float, terms: int = 100) -> SeriesValue:
    """The Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1).

    At least terms + 1 terms are summed; more are added until the tail bound is
    at most 1e-16 * max(1, |E_alpha(z)|). For negative z the terms grow far
    beyond the result before they decay, so the working precision is raised by
    the number of digits of the largest term.

    Args:
        alpha: The order.
        z: The real argument, |z| <= 5.
        terms: Minimum index of the last term summed, at least 50.

    Returns:
        The partial sum and a bound on the absolute value of the remainder.

    Raises:
        ContractError: Outside the supported regime, or if the tolerance is not
            reached within the term limit (very small alpha).
    """
    order = as_order(alpha).alpha
    if abs(z) > 5 or terms < 50:
        raise ContractError(
            f"E_alpha({z}) with {terms} terms is outside the series regime "
            "(|z| <= 5 and terms >= 50)"
        )
    if z == 0:
        return SeriesValue(1.0, 0.0)
    n_max = max(_MAX_TERMS, terms)
    log_terms, log_tail = _log_tail_bounds(order, math.log(abs(z)), n_max)
    peak = max(0.0, float(np.max(log_terms)))
    # Positive series are at least as large as their largest term.
    target = math.log(_TAIL_RTOL) + (peak if z > 0 else 0.0)
    last = np.arange(n_max + 1)
    found = np.flatnonzero((last >= terms) & (log_tail <= target))
    if not found.size:
        raise ContractError(
            f"E_{order:g}({z}) needs more than {n_max} terms to reach the tail tolerance"
        )
    last = int(found[0])
    with mpmath.workdps(_GUARD_DIGITS + int(math.ceil(peak / math.log(10)))):
        x = mpmath.mpf(z)
        value = float(
            mpmath.fsum(x ** k * mpmath.rgamma(order * k + 1) for k in range(last + 1))
        )
    return SeriesValue(value, math.exp(float(log_tail[last])))
