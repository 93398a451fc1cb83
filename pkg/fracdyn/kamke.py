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

"""Kamke comparison functions w(t, s) = h(t) s^lam of fractional order.

A Kamke function of order alpha admits u = 0 as the only non-negative
continuous solution of

    u(t) <= J^alpha [w(., u(.))](t),    u(t) / (t - a)^alpha -> 0 as t -> a+.

This cannot be decided numerically. The module instead solves the comparison
problems D^alpha u = w(t, u), u(a) = eps, measures how their size scales with
eps and tests candidate functions for violations of the two conditions.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import List, NamedTuple, Sequence, Union

import numpy as np

from .frac_core import fractional_sums
from .paths import SampledPath, TimeGrid
from .state import FracOrder, StateVec, as_order
from .utils import ContractError, ConvergenceError
from .volterra import IVProblem, picard_solve, uniqueness_delta

logger = logging.getLogger(__name__)

# Contraction constant used when certifying superlinear comparison problems.
CONTRACTION = 0.9


@dataclasses.dataclass(frozen=True)
class KamkeSpec:
    """The comparison function w(t, s) = H(t) s^lam on [a, b].

    Attributes:
        alpha: Order of the comparison problem.
        lam: Exponent, at least 1.
        a: Left end of the interval.
        b: Right end of the interval.
        H: Non-negative constant, or a scalar path sampled over [a, b] that is
            interpolated linearly between its nodes.
    """

    alpha: FracOrder
    lam: float
    a: float = 0.0
    b: float = 1.0
    H: Union[float, SampledPath] = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_order(self.alpha))
        if not self.lam >= 1:
            raise ContractError(f"exponent lambda must be >= 1, got {self.lam}")
        if not self.b > self.a:
            raise ContractError("interval [a, b] must have b > a")
        if isinstance(self.H, SampledPath):
            if self.H.dim != 1:
                raise ContractError("coefficient path must be scalar")
            if np.any(self.H.values < 0):
                raise ContractError("coefficient must be non-negative")
            if self.H.grid.a > self.a + 1e-12 or self.H.grid.b < self.b - 1e-12:
                raise ContractError("coefficient path must cover [a, b]")
        elif not self.H >= 0:
            raise ContractError("coefficient H must be non-negative")

    def coefficient(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if isinstance(self.H, SampledPath):
            return np.interp(t, self.H.nodes, self.H.values[:, 0])
        return np.full(t.shape, float(self.H))

    def max_coefficient(self) -> float:
        if isinstance(self.H, SampledPath):
            return float(np.max(self.H.values))
        return float(self.H)

    def w(self, t, s) -> np.ndarray:
        """Vectorised evaluation of H(t) |s|^lam."""
        return self.coefficient(t) * np.abs(s) ** self.lam


def eval_kamke(spec: KamkeSpec, t: float, s: float) -> float:
    """w(t, s) = H(t) s^lam for t in [a, b] and s >= 0."""
    if s < 0:
        raise ContractError(f"s must be non-negative, got {s}")
    if not spec.a - 1e-12 <= t <= spec.b + 1e-12:
        raise ContractError(f"t={t} outside [{spec.a}, {spec.b}]")
    return float(spec.w(t, s))


def certified_horizon(spec: KamkeSpec, eps: float) -> float:
    """Length of the interval on which the comparison problem is certified.

    Linear problems and H = 0 are certified on all of [a, b]. Otherwise, on the
    ball [0, 2 eps] around eps the rhs is bounded by H (2 eps)^lam and Lipschitz
    with constant H lam (2 eps)^(lam - 1); the interval is cut to the
    uniqueness interval for contraction constant 0.9.
    """
    length = spec.b - spec.a
    h_max = spec.max_coefficient()
    if spec.lam == 1 or h_max == 0:
        return length
    if not eps > 0:
        raise ContractError("eps must be positive")
    M = h_max * (2 * eps) ** spec.lam
    kappa = h_max * spec.lam * (2 * eps) ** (spec.lam - 1)
    return uniqueness_delta(length, eps, M, kappa, CONTRACTION, spec.alpha)


def _comparison_problem(spec: KamkeSpec, eps: float) -> IVProblem:
    def rhs(t: np.ndarray, u: np.ndarray) -> np.ndarray:
        return spec.coefficient(t)[:, None] * np.abs(u) ** spec.lam

    h_max = spec.max_coefficient()
    if spec.lam == 1:
        beta, M = math.inf, math.inf
        kappa = h_max or None
    else:
        beta = eps
        M = max(h_max * (2 * eps) ** spec.lam, np.finfo(float).tiny)
        kappa = h_max * spec.lam * (2 * eps) ** (spec.lam - 1) or None
    return IVProblem(
        a=spec.a,
        bar_delta=spec.b - spec.a,
        u0=StateVec([eps]),
        alpha=spec.alpha,
        rhs=rhs,
        beta=beta,
        M=M,
        kappa=kappa,
    )


def _certified_grid(spec: KamkeSpec, eps_list: Sequence[float], grid: TimeGrid) -> TimeGrid:
    if not math.isclose(grid.a, spec.a, rel_tol=0.0, abs_tol=1e-12):
        raise ContractError(f"grid starts at {grid.a}, interval at {spec.a}")
    if grid.b > spec.b + 1e-9 * (spec.b - spec.a):
        raise ContractError(f"grid ends at {grid.b}, past b = {spec.b}")
    largest = max(eps_list)
    if largest == 0:
        return grid
    horizon = certified_horizon(spec, largest)
    if grid.b - grid.a <= horizon * (1 + 1e-9):
        return grid
    n_steps = int(math.floor(horizon / grid.h))
    if n_steps < 1:
        raise ContractError(f"certified horizon {horizon:.3g} is shorter than one step")
    logger.warning(
        "comparison interval shrunk from %.6g to %.6g for eps=%g",
        grid.b - grid.a,
        n_steps * grid.h,
        largest,
    )
    return TimeGrid(grid.a, grid.h, n_steps)


def comparison_family(
    spec: KamkeSpec,
    eps_list: Sequence[float],
    grid: TimeGrid,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> List[SampledPath]:
    """Solve D^alpha u = w(t, u), u(a) = eps for every eps.

    The grid is shrunk to the certified horizon of the largest eps if needed.
    tol is relative to eps; eps = 0 yields the zero solution.

    Raises:
        ConvergenceError: Naming the eps whose solve failed.
    """
    if not eps_list:
        raise ContractError("eps_list must not be empty")
    if any(not eps >= 0 for eps in eps_list):
        raise ContractError("eps values must be non-negative")
    grid = _certified_grid(spec, eps_list, grid)
    solutions = []
    for eps in eps_list:
        if eps == 0:
            solutions.append(SampledPath(grid, np.zeros(grid.size)))
            continue
        problem = _comparison_problem(spec, eps)
        try:
            report = picard_solve(
                problem, grid, tol * eps, max_iter, check_horizon=spec.lam != 1
            )
        except ConvergenceError as err:
            raise ConvergenceError(
                f"comparison problem with eps={eps:g} did not converge: {err}",
                iterations=err.iterations,
                last_increment=err.last_increment,
            ) from err
        logger.info("comparison eps=%g solved in %d iterations", eps, report.iterations)
        solutions.append(SampledPath(grid, report.solution.values[:, 0]))
    return solutions


class StabilityScan(NamedTuple):
    ratios: List[float]
    A_hat: float


def stability_scan(
    spec: KamkeSpec,
    eps_list: Sequence[float],
    grid: TimeGrid,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> StabilityScan:
    """Ratios sup_t |u_eps(t)| / eps and their maximum A_hat."""
    if any(not eps > 0 for eps in eps_list):
        raise ContractError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ContractError("eps_list must be decreasing")
    solutions = comparison_family(spec, eps_list, grid, tol, max_iter)
    ratios = [u.sup_norm() / eps for u, eps in zip(solutions, eps_list)]
    return StabilityScan(ratios, max(ratios))


class CandidateReport(NamedTuple):
    """Evidence against a candidate solution of the Kamke inequality.

    Attributes:
        ineq_margin: max_t u(t) - J^alpha[w(., u)](t); positive means the
            integral inequality is violated.
        limit_estimate: Extrapolated value of lim u(t) / (t - a)^alpha.
        admissible: Whether both quantities are within tolerance.
    """

    ineq_margin: float
    limit_estimate: float
    admissible: bool


def candidate_violation(spec: KamkeSpec, u: SampledPath, tol: float = 1e-6) -> CandidateReport:
    """Test a non-negative candidate u against both Kamke conditions.

    The quotient q(t) = u(t) / (t - a)^alpha is taken at the first two positive
    nodes and extrapolated linearly to t = a, 2 q(t_1) - q(t_2). A quotient
    that grows under grid refinement shows up as a large estimate.
    """
    if u.dim != 1:
        raise ContractError("candidate must be a scalar path")
    if u.grid.n_steps < 2:
        raise ContractError("grid too small: the limit estimate needs at least 3 nodes")
    if not math.isclose(u.grid.a, spec.a, rel_tol=0.0, abs_tol=1e-12):
        raise ContractError("candidate must start at a")
    values = u.values[:, 0]
    if np.any(values < 0):
        raise ContractError("candidate must be non-negative")
    alpha = spec.alpha.alpha
    integral = fractional_sums(spec.w(u.nodes, values)[:, None], u.grid.h, alpha)[:, 0]
    margin = float(np.max(values - integral))
    h = u.grid.h
    q1 = values[1] / h ** alpha
    q2 = values[2] / (2 * h) ** alpha
    limit = max(0.0, 2 * q1 - q2)
    return CandidateReport(margin, limit, margin <= tol and limit <= tol)
