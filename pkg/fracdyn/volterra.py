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

"""Picard iteration for fractional initial value problems.

The Caputo problem D^alpha u = f(t, u), u(a) = u0 is solved through its Volterra
form

    u(t) = u0 + J^alpha [f(., u(.))](t),

by fixed-point iteration from the constant path u0. The module also computes the
interval lengths on which existence and uniqueness are guaranteed:

    existence:   delta = min(bar_delta, (beta * Gamma(alpha + 1) / M)^(1 / alpha))
    uniqueness:  additionally delta <= (C * Gamma(alpha + 1) / kappa)^(1 / alpha)

where M bounds |f| on [a, a + bar_delta] x B(u0, beta), kappa is a Lipschitz
constant of f in u and 0 < C < 1 is the contraction constant.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import Callable, Optional

import numpy as np

from .frac_core import fractional_sums, gamma
from .paths import SampledPath, TimeGrid
from .state import FracOrder, OrderLike, StateVec, as_order, as_state
from .utils import ContractError, ConvergenceError

logger = logging.getLogger(__name__)

# rhs(t, u) receives the nodes t with shape (m,) and states u with shape
# (m, dim) and returns f(t_i, u_i) row by row.
Rhs = Callable[[np.ndarray, np.ndarray], np.ndarray]

_GRID_SLACK = 1e-9


@dataclasses.dataclass(frozen=True)
class IVProblem:
    """A fractional initial value problem on [a, a + bar_delta].

    Attributes:
        a: Initial time.
        bar_delta: Length of the ambient interval.
        u0: Initial value.
        alpha: Order of the Caputo derivative.
        rhs: Vectorised right-hand side, see `Rhs`.
        beta: Radius of the ball B(u0, beta) on which M bounds the rhs.
        M: Bound on the sup-norm of the rhs over the ball. May be infinite for
            exploratory runs that are not certified.
        kappa: Optional Lipschitz constant of the rhs in u.
    """

    a: float
    bar_delta: float
    u0: StateVec
    alpha: FracOrder
    rhs: Rhs
    beta: float
    M: float
    kappa: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "u0", as_state(self.u0))
        object.__setattr__(self, "alpha", as_order(self.alpha))
        for name in ("bar_delta", "beta", "M"):
            if not getattr(self, name) > 0:
                raise ContractError(f"{name} must be positive")
        if self.kappa is not None and not self.kappa > 0:
            raise ContractError("kappa must be positive when given")

    @property
    def dim(self) -> int:
        return len(self.u0)

    def evaluate(self, t: float, state: StateVec) -> StateVec:
        """The rhs at a single time and state."""
        value = self.rhs(np.array([float(t)]), state.entries[None, :])
        return StateVec(np.broadcast_to(np.asarray(value, dtype=float), (1, len(state)))[0])

    def rhs_path(self, u: SampledPath) -> SampledPath:
        """The path t -> f(t, u(t))."""
        if u.dim != self.dim:
            raise ContractError(f"path has dimension {u.dim}, problem has {self.dim}")
        values = np.asarray(self.rhs(u.nodes, u.values), dtype=float)
        try:
            values = np.broadcast_to(values, u.values.shape)
        except ValueError:
            raise ContractError(
                f"rhs returned shape {values.shape}, expected {u.values.shape}"
            ) from None
        return SampledPath(u.grid, values)


@dataclasses.dataclass(frozen=True)
class SolveReport:
    """Outcome of a converged Picard iteration.

    Attributes:
        solution: The last iterate.
        iterations: Number of Picard updates performed.
        final_increment: Sup-norm of the last update.
        observed_ratio: Largest ratio of consecutive update norms.
        residual: Volterra residual of the solution.
        ball_escapes: Number of iterates that left B(u0, beta) before the rhs
            was evaluated on them.
        max_deviation: Largest sup-norm distance from u0 over all iterates.
    """

    solution: SampledPath
    iterations: int
    final_increment: float
    observed_ratio: float
    residual: float
    ball_escapes: int = 0
    max_deviation: float = 0.0


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ContractError(f"{name} must be positive, got {value}")


def existence_delta(bar_delta: float, beta: float, M: float, alpha: OrderLike) -> float:
    """Length of the interval on which a solution is guaranteed to exist."""
    _require_positive(bar_delta=bar_delta, beta=beta, M=M)
    a = as_order(alpha).alpha
    return min(bar_delta, (beta * gamma(a + 1) / M) ** (1 / a))


def uniqueness_delta(
    bar_delta: float, beta: float, M: float, kappa: float, C: float, alpha: OrderLike
) -> float:
    """Length of the interval on which the Volterra operator contracts with constant C."""
    if not 0 < C < 1:
        raise ContractError(f"contraction constant C must lie in (0,1), got {C}")
    _require_positive(kappa=kappa)
    a = as_order(alpha).alpha
    return min(
        existence_delta(bar_delta, beta, M, alpha), (C * gamma(a + 1) / kappa) ** (1 / a)
    )


def contraction_estimate(problem: IVProblem, delta: float, alpha: OrderLike) -> float:
    """The contraction constant kappa * delta^alpha / Gamma(alpha + 1)."""
    if problem.kappa is None:
        raise ContractError("contraction estimate needs a Lipschitz constant kappa")
    if delta < 0:
        raise ContractError("delta must be non-negative")
    a = as_order(alpha).alpha
    return problem.kappa * delta ** a / gamma(a + 1)


def _check_grid(problem: IVProblem, grid: TimeGrid, check_horizon: bool) -> None:
    if not math.isclose(grid.a, problem.a, rel_tol=0.0, abs_tol=1e-12):
        raise ContractError(f"grid starts at {grid.a}, problem at {problem.a}")
    horizon = grid.b - grid.a
    if horizon > problem.bar_delta * (1 + _GRID_SLACK):
        raise ContractError(
            f"grid horizon {horizon:.6g} leaves the ambient interval of length "
            f"{problem.bar_delta:.6g}"
        )
    if not check_horizon:
        return
    delta = existence_delta(problem.bar_delta, problem.beta, problem.M, problem.alpha)
    if horizon > delta * (1 + _GRID_SLACK):
        logger.warning(
            "grid horizon %.6g exceeds the existence interval %.6g; the solution is not certified",
            horizon,
            delta,
        )


def volterra_residual(u: SampledPath, problem: IVProblem) -> float:
    """The sup over nodes of |u(t) - u0 - J^alpha[f(., u(.))](t)|."""
    if not math.isclose(u.grid.a, problem.a, rel_tol=0.0, abs_tol=1e-12):
        raise ContractError("path and problem start at different times")
    forcing = problem.rhs_path(u)
    integral = fractional_sums(forcing.values, u.grid.h, problem.alpha.alpha)
    return float(np.max(np.abs(u.values - problem.u0.entries - integral)))


def picard_solve(
    problem: IVProblem,
    grid: TimeGrid,
    tol: float = 1e-8,
    max_iter: int = 200,
    check_horizon: bool = True,
) -> SolveReport:
    """Solve the Volterra equation by Picard iteration.

    Args:
        problem: The initial value problem.
        grid: Grid starting at problem.a inside the ambient interval.
        tol: Iteration stops once the sup-norm of an update is at most tol.
        max_iter: Maximum number of updates.
        check_horizon: Warn when the grid extends past the existence interval.
            Callers that know existence on the whole grid by other means,
            e.g. for globally Lipschitz right-hand sides, may switch this off.

    Returns:
        A `SolveReport` for the last iterate.

    Raises:
        ConvergenceError: If tol is not reached within max_iter updates.
    """
    if not tol > 0:
        raise ContractError("tol must be positive")
    if max_iter < 1:
        raise ContractError("max_iter must be at least 1")
    _check_grid(problem, grid, check_horizon)

    alpha = problem.alpha.alpha
    u0 = problem.u0.entries
    scale = max(1.0, problem.u0.norm())
    u = SampledPath.constant(grid, u0)
    observed_ratio = 0.0
    previous = math.nan
    escapes = 0
    max_deviation = 0.0
    increment = math.inf

    for iteration in range(1, max_iter + 1):
        deviation = float(np.max(np.abs(u.values - u0)))
        max_deviation = max(max_deviation, deviation)
        if deviation > problem.beta * (1 + _GRID_SLACK):
            escapes += 1
            if escapes == 1:
                logger.warning(
                    "iterate %d left the ball B(u0, %g) (distance %.6g)",
                    iteration - 1,
                    problem.beta,
                    deviation,
                )
        forcing = problem.rhs_path(u)
        update = u0 + fractional_sums(forcing.values, grid.h, alpha)
        increment = float(np.max(np.abs(update - u.values)))
        if previous > 1e-13 * scale:
            observed_ratio = max(observed_ratio, increment / previous)
        u = SampledPath(grid, update)
        logger.debug("Picard iteration %d: increment %.3e", iteration, increment)
        if increment <= tol:
            max_deviation = max(max_deviation, float(np.max(np.abs(update - u0))))
            residual = volterra_residual(u, problem)
            logger.info(
                "Picard iteration converged after %d iterations (residual %.3e)",
                iteration,
                residual,
            )
            return SolveReport(
                solution=u,
                iterations=iteration,
                final_increment=increment,
                observed_ratio=observed_ratio,
                residual=residual,
                ball_escapes=escapes,
                max_deviation=max_deviation,
            )
        previous = increment

    raise ConvergenceError(
        f"Picard iteration did not reach tol={tol:g} within {max_iter} iterations "
        f"(last increment {increment:.3e})",
        iterations=max_iter,
        last_increment=increment,
    )
