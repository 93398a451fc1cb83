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

"""The semi-discrete fractional p-Laplacian system.

For n = 1, 2, ... the unknowns u_n(t) approximate u(t, n) and satisfy

    D^alpha u_n = r_{n+1/2}(t) Phi_p(u_{n+1} - u_n)
                  - r_{n-1/2}(t) Phi_p(u_n - u_{n-1}) + F_n(t),

with Phi_p(x) = |x|^(p-2) x, r_{n+1/2}(t) = r(t, n + 1/2), F_n(t) = F(t, n),
boundary value u_0(t) = psi(t) and initial values u_n(0) = phi(n). The system
is truncated after N components and closed by u_{N+1} = 0.

The certificate bounds the right-hand side on the ball of radius beta around
the initial profile in c0 and turns that bound into an existence interval.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .expr import EvaluationError, Expr, as_expression, vanishes_at_infinity
from .frac_core import fractional_sums
from .paths import TimeGrid
from .state import FracOrder, StateVec, as_order
from .utils import CertificationError, ContractError
from .volterra import IVProblem, SolveReport, existence_delta, picard_solve

logger = logging.getLogger(__name__)

K_RULE = "k_1 = 1, k_n = n - 1 (n >= 2)"


def phi_p(x, p: float):
    """Phi_p(x) = |x|^(p - 2) x, elementwise."""
    if not p >= 2:
        raise ContractError(f"p must be >= 2, got {p}")
    return np.abs(x) ** (p - 2) * x


@dataclasses.dataclass(frozen=True)
class PLapProblem:
    """Data of the truncated semi-discrete system.

    Attributes:
        p: Exponent of the p-Laplacian, at least 2.
        alpha: Order of the Caputo derivative.
        T: Length of the time interval [0, T].
        N: Number of components kept.
        r: Diffusion coefficient r(t, x), sampled at half-integer x.
        F: Forcing F(t, x), sampled at integer x.
        phi: Initial profile phi(x).
        psi: Boundary value psi(t) at site 0.
        beta: Radius of the ball used by the certificate.
    """

    p: float
    alpha: FracOrder
    T: float
    N: int
    r: Expr = "1"
    F: Expr = "0"
    phi: Expr = "0"
    psi: Expr = "0"
    beta: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", as_order(self.alpha))
        for name in ("r", "F", "phi", "psi"):
            object.__setattr__(self, name, as_expression(getattr(self, name)))
        if not self.p >= 2:
            raise ContractError(f"p must be >= 2, got {self.p}")
        if not self.T > 0:
            raise ContractError("T must be positive")
        if int(self.N) != self.N or self.N < 2:
            raise ContractError("N must be an integer >= 2")
        if not self.beta > 0:
            raise ContractError("beta must be positive")
        if self.phi.depends_on("t"):
            raise ContractError("phi may only depend on x")
        if self.psi.depends_on("x"):
            raise ContractError("psi may only depend on t")

    def sites(self) -> np.ndarray:
        return np.arange(1, self.N + 1, dtype=float)

    def initial_state(self) -> StateVec:
        """The initial values (phi(1), ..., phi(N))."""
        return StateVec(self.phi(0.0, self.sites()))


def lambda_np(t: float, u: StateVec, u0_boundary: float, n: int, problem: PLapProblem) -> float:
    """The p-Laplacian stencil at site n.

    Args:
        t: Time at which r is evaluated.
        u: State holding u_1, ..., u_N.
        u0_boundary: The value u_0, i.e. psi(t).
        n: Site index in 1..N-1.
        problem: Supplies p and r.

    Raises:
        IndexError: If n is outside 1..N-1.
    """
    if not 1 <= n <= problem.N - 1:
        raise IndexError(f"site {n} outside 1..{problem.N - 1}")
    values = np.concatenate([[u0_boundary], u.padded(problem.N)])
    r_plus = float(problem.r(t, n + 0.5))
    r_minus = float(problem.r(t, n - 0.5))
    return float(
        r_plus * phi_p(values[n + 1] - values[n], problem.p)
        - r_minus * phi_p(values[n] - values[n - 1], problem.p)
    )


class SemiDiscreteRhs:
    """Right-hand side of the truncated system, vectorised over time.

    Coefficients that do not depend on t are evaluated once.
    """

    def __init__(self, problem: PLapProblem) -> None:
        self.problem = problem
        self._half_sites = np.arange(problem.N + 1) + 0.5
        self._r = None if problem.r.depends_on("t") else self._coefficient(np.zeros(1))
        self._forcing = None if problem.F.depends_on("t") else self._sources(np.zeros(1))

    def _coefficient(self, t: np.ndarray) -> np.ndarray:
        r = self.problem.r(t[:, None], self._half_sites[None, :])
        if np.any(r < 0):
            raise ContractError("r must be non-negative at half-integer sites")
        return r

    def _sources(self, t: np.ndarray) -> np.ndarray:
        return self.problem.F(t[:, None], self.problem.sites()[None, :])

    def __call__(self, t: np.ndarray, u: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u = np.atleast_2d(u)
        padded = np.zeros((u.shape[0], self.problem.N + 2))
        padded[:, 0] = self.problem.psi(t, 0.0)
        padded[:, 1:-1] = u
        r = self._coefficient(t) if self._r is None else self._r
        forcing = self._sources(t) if self._forcing is None else self._forcing
        flux = r * phi_p(np.diff(padded, axis=1), self.problem.p)
        return flux[:, 1:] - flux[:, :-1] + forcing

    def at(self, t: float, state: StateVec) -> StateVec:
        """The right-hand side for a single time and state."""
        return StateVec(self(np.array([t]), state.padded(self.problem.N)[None, :])[0])


def assemble_rhs(problem: PLapProblem) -> SemiDiscreteRhs:
    return SemiDiscreteRhs(problem)


@dataclasses.dataclass(frozen=True)
class Certificate:
    """Constants that certify existence for the semi-discrete system.

    Attributes:
        lam: Growth exponent p - 1.
        P: Bound on |F|.
        Q: 2^p times the bound on r.
        M: P + Q (|phi| + beta)^lam, the bound on the right-hand side.
        delta: Length of the existence interval.
        C1: Mean-value Lipschitz bound of the stencil on the ball.
        C2: Growth constant 2^p (|phi| + beta)^(p - 1).
        k_rule: The index sequence used in the componentwise growth bound.
        boundary_terms_unverified: True when psi is not identically zero.
    """

    lam: float
    P: float
    Q: float
    M: float
    delta: float
    C1: float
    C2: float
    k_rule: str = K_RULE
    boundary_terms_unverified: bool = False

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "P": self.P,
            "Q": self.Q,
            "M": self.M,
            "delta": self.delta,
            "C1": self.C1,
            "C2": self.C2,
            "k_rule": self.k_rule,
        }


def _site_range(
    name: str, expr: Expr, t: Tuple[float, float], sites: np.ndarray, tail_start: float
) -> Tuple[float, float]:
    """Enclose expr over t and the sites, plus every site from tail_start on."""
    try:
        ranges = [expr.bounds(t, (x, x)) for x in sites]
        ranges.append(expr.bounds(t, (tail_start, math.inf)))
    except EvaluationError as err:
        raise CertificationError(f"{name} cannot be bounded: {err}") from err
    lo = min(r[0] for r in ranges)
    hi = max(r[1] for r in ranges)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise CertificationError(f"supremum of {name} = {expr} is not certified")
    return lo, hi


def phi_norm(problem: PLapProblem) -> float:
    """The c0 norm of the initial profile, explicit sites plus a tail bound."""
    if not vanishes_at_infinity(problem.phi):
        raise CertificationError(f"phi = {problem.phi} does not provably vanish as x -> inf")
    lo, hi = _site_range("phi", problem.phi, (0.0, 0.0), problem.sites(), problem.N + 1.0)
    return max(abs(lo), abs(hi))


def certify(problem: PLapProblem) -> Certificate:
    """Compute the existence certificate of the semi-discrete system.

    Raises:
        CertificationError: If a supremum cannot be bounded, r may be
            negative, phi or F do not vanish at infinity, or M = 0.
    """
    p, beta = problem.p, problem.beta
    time_range = (0.0, problem.T)
    if not vanishes_at_infinity(problem.F):
        raise CertificationError(f"F = {problem.F} does not provably vanish as x -> inf")
    norm = phi_norm(problem)
    f_lo, f_hi = _site_range("F", problem.F, time_range, problem.sites(), problem.N + 1.0)
    half_sites = np.arange(problem.N + 1) + 0.5
    r_lo, r_hi = _site_range("r", problem.r, time_range, half_sites, problem.N + 1.5)
    if r_lo < 0:
        raise CertificationError(f"r = {problem.r} is not provably non-negative")

    lam = p - 1
    P = max(abs(f_lo), abs(f_hi))
    Q = 2 ** p * r_hi
    M = P + Q * (norm + beta) ** lam
    if not M > 0:
        raise CertificationError("degenerate bound: M = 0, the existence interval is undefined")
    delta = existence_delta(problem.T, beta, M, problem.alpha)
    C1 = r_hi * 2 ** p * (p - 1) * (norm + beta) ** (p - 2)
    C2 = 2 ** p * (norm + beta) ** (p - 1)

    psi_lo, psi_hi = problem.psi.bounds(time_range, (0.0, 0.0))
    unverified = not (psi_lo == psi_hi == 0.0)
    if unverified:
        logger.warning("psi is not identically zero; boundary contributions to P are not verified")
    logger.info("certificate: M=%.6g delta=%.6g C1=%.6g C2=%.6g", M, delta, C1, C2)
    return Certificate(lam, P, Q, M, delta, C1, C2, K_RULE, unverified)


def growth_bound(problem: PLapProblem, t: float, u: StateVec) -> np.ndarray:
    """Componentwise majorant p_n(t) + q_n(t) sup_{i >= k_n} |u_i|^(p - 1).

    Here p_n = |F_n|, q_n = 2^p max(r_{n-1/2}, r_{n+1/2}). For n = 1 the
    supremum also covers the boundary value psi(t).
    """
    sites = problem.sites()
    magnitudes = np.abs(u.padded(problem.N))
    tails = np.maximum(np.maximum.accumulate(magnitudes[::-1])[::-1], u.tail_env)
    k = np.maximum(sites.astype(int) - 1, 1)
    sup_tail = tails[k - 1]
    sup_tail[0] = max(sup_tail[0], abs(float(problem.psi(t, 0.0))))
    r_minus = problem.r(t, sites - 0.5)
    r_plus = problem.r(t, sites + 0.5)
    q = 2 ** problem.p * np.maximum(r_minus, r_plus)
    return np.abs(problem.F(t, sites)) + q * sup_tail ** (problem.p - 1)


def lipschitz_bound(problem: PLapProblem, certificate: Certificate) -> float:
    """Lipschitz constant of the stencil on the certificate ball.

    For p = 2 the stencil is linear and the operator bound 4 sup r = Q applies.
    Otherwise the mean-value bound C1 is used.
    """
    if problem.p == 2:
        return certificate.Q
    return certificate.C1


def as_ivproblem(
    problem: PLapProblem, M: float = math.inf, kappa: Optional[float] = None
) -> IVProblem:
    return IVProblem(
        a=0.0,
        bar_delta=problem.T,
        u0=problem.initial_state(),
        alpha=problem.alpha,
        rhs=assemble_rhs(problem),
        beta=problem.beta,
        M=M,
        kappa=kappa,
    )


def solve_semidiscrete(
    problem: PLapProblem,
    grid: TimeGrid,
    tol: float = 1e-8,
    max_iter: int = 200,
    certified: bool = True,
) -> SolveReport:
    """Solve the truncated system by Picard iteration.

    With certified=True the certificate supplies M and kappa; if certification
    fails, or certified=False, the solve runs without a bound and warns.
    """
    M, kappa = math.inf, None
    if certified:
        try:
            certificate = certify(problem)
            M = certificate.M
            kappa = lipschitz_bound(problem, certificate) or None
        except CertificationError as err:
            logger.warning("solving without a certificate: %s", err)
    else:
        logger.warning("solving without a certificate")
    return picard_solve(as_ivproblem(problem, M, kappa), grid, tol, max_iter)


@dataclasses.dataclass(frozen=True)
class TruncationRow:
    n_coarse: int
    n_fine: int
    difference: float


def truncation_study(
    problem: PLapProblem,
    N_list: Sequence[int],
    grid: TimeGrid,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> List[TruncationRow]:
    """Compare solutions for consecutive truncation lengths.

    Each row holds the sup over time and shared sites of |u^(fine) - u^(coarse)|.
    """
    if len(N_list) < 2:
        raise ContractError("truncation study needs at least two values of N")
    if any(b < a for a, b in zip(N_list, N_list[1:])):
        raise ContractError("N_list must be non-decreasing")
    solutions = {}
    for n in N_list:
        if n not in solutions:
            member = dataclasses.replace(problem, N=n)
            solutions[n] = solve_semidiscrete(member, grid, tol, max_iter).solution.values
            logger.info("truncation study: solved N=%d", n)
    rows = []
    for coarse, fine in zip(N_list, N_list[1:]):
        difference = np.max(np.abs(solutions[fine][:, :coarse] - solutions[coarse]))
        rows.append(TruncationRow(coarse, fine, float(difference)))
    return rows


@dataclasses.dataclass(frozen=True)
class StepRow:
    h_coarse: float
    h_fine: float
    difference: float


def step_study(
    problem: PLapProblem, grid: TimeGrid, tol: float = 1e-8, max_iter: int = 200
) -> StepRow:
    """Compare the solution on grid with the one on the halved grid at shared nodes."""
    coarse = solve_semidiscrete(problem, grid, tol, max_iter).solution.values
    fine = solve_semidiscrete(problem, grid.halve(), tol, max_iter).solution.values
    difference = float(np.max(np.abs(fine[::2] - coarse)))
    return StepRow(grid.h, grid.h / 2, difference)


def mass_balance(problem: PLapProblem, report: SolveReport) -> float:
    """Defect of the summed equation.

    Summing the stencil over n = 1..N telescopes, so the total mass obeys

        sum_n u_n(t) - sum_n u_n(0) = J^alpha[ -r_{N+1/2} Phi_p(u_N)
                                       - r_{1/2} Phi_p(u_1 - psi) + sum_n F_n ](t).

    Returns:
        The sup over nodes of the difference between both sides.
    """
    u = report.solution.values
    t = report.solution.nodes
    p, N = problem.p, problem.N
    outflow = problem.r(t, N + 0.5) * phi_p(u[:, -1], p)
    inflow = problem.r(t, 0.5) * phi_p(u[:, 0] - problem.psi(t, 0.0), p)
    sources = np.sum(problem.F(t[:, None], problem.sites()[None, :]), axis=1)
    flux = (-outflow - inflow + sources)[:, None]
    integral = fractional_sums(flux, report.solution.grid.h, problem.alpha.alpha)[:, 0]
    mass = np.sum(u, axis=1)
    return float(np.max(np.abs(mass - mass[0] - integral)))
