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

"""Acceptance battery run by `fracdyn selftest`.

Every check compares the library against a closed form, a classical integrator
or an exact structural identity and returns a one-line detail string.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, List, NamedTuple, Tuple

import numpy as np
from scipy import integrate

from . import kamke, mnc, plap
from .frac_core import caputo_derivative, gamma, mittag_leffler, rl_derivative, rl_integral
from .paths import SampledPath, TimeGrid
from .state import StateVec
from .volterra import IVProblem, existence_delta, picard_solve, uniqueness_delta

logger = logging.getLogger(__name__)

ORDERS = (0.25, 0.5, 0.75)
TEST_FUNCTIONS = {"sin t": np.sin, "cos t": np.cos, "t^2": lambda t: t ** 2}

# phi(n) = 2^(-n), written in the expression grammar.
HALVING_PROFILE = "exp(-0.6931471805599453*x)"


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _sup(path: SampledPath, first: int = 0) -> float:
    return float(np.max(np.abs(path.values[first:])))


def _identity_errors(h: float) -> Tuple[List[float], List[float]]:
    """Sup errors of the identities on the whole grid and from t = 0.05 on.

    The composite identity D^(1 - alpha) D^alpha J^1 f = f ends in a one-sided
    difference of low order at t = a and is measured from t = 0.05 on.
    """
    grid = TimeGrid.with_step(0.0, 1.0, h)
    first = grid.index_of(0.05)
    errors, composite_errors = [], []
    for f in TEST_FUNCTIONS.values():
        path = SampledPath.from_function(grid, f)
        cumulative = rl_integral(path, 1.0)
        for alpha in ORDERS:
            semigroup = rl_integral(rl_integral(path, alpha), 1 - alpha) - cumulative
            inversion = rl_derivative(rl_integral(path, alpha), alpha) - path
            caputo = rl_integral(caputo_derivative(path, alpha), alpha) - path.shifted()
            errors.append(max(_sup(semigroup), _sup(inversion), _sup(caputo)))
            composite = rl_derivative(rl_derivative(cumulative, alpha), 1 - alpha) - path
            composite_errors.append(_sup(composite, first))
    return errors, composite_errors


def _min_shrink(coarse: List[float], fine: List[float]) -> float:
    factors = [c / f for c, f in zip(coarse, fine) if c > 1e-12]
    return min(factors) if factors else math.inf


def check_operator_identities() -> Tuple[bool, str]:
    coarse, composite_coarse = _identity_errors(1e-3)
    fine, composite_fine = _identity_errors(5e-4)
    worst = max(coarse + composite_coarse)
    factor = min(_min_shrink(coarse, fine), _min_shrink(composite_coarse, composite_fine))
    return worst <= 5e-3 and factor >= 1.5, f"sup error {worst:.3e}, min shrink {factor:.3g}"


def check_closed_forms() -> Tuple[bool, str]:
    grid = TimeGrid.with_step(0.0, 1.0, 1e-3)
    first = grid.index_of(0.05)
    one = SampledPath.constant(grid, 1.0)
    ramp = SampledPath.from_function(grid, lambda t: t)
    worst_integral, worst_derivative = 0.0, 0.0
    for alpha in ORDERS:
        exact = SampledPath.from_function(grid, lambda t: t ** alpha / gamma(alpha + 1))
        worst_integral = max(worst_integral, _sup(rl_integral(one, alpha) - exact))
        exact = SampledPath.from_function(grid, lambda t: t ** (1 - alpha) / gamma(2 - alpha))
        worst_derivative = max(worst_derivative, _sup(caputo_derivative(ramp, alpha) - exact, first))
    passed = worst_integral <= 1e-3 and worst_derivative <= 1e-3
    return passed, f"J^a 1 error {worst_integral:.3e}, D^a t error {worst_derivative:.3e}"


def _decay_problem(
    alpha: float, bar_delta: float = 1.0, beta: float = math.inf, M: float = math.inf
) -> IVProblem:
    """D^alpha u = -u, u(0) = 1, solved by E_alpha(-t^alpha)."""
    return IVProblem(
        a=0.0,
        bar_delta=bar_delta,
        u0=StateVec([1.0]),
        alpha=alpha,
        rhs=lambda t, u: -u,
        beta=beta,
        M=M,
        kappa=1.0,
    )


def check_volterra_equivalence() -> Tuple[bool, str]:
    tol = 1e-10
    errors, residuals = [], []
    problem = _decay_problem(0.5)
    for h in (1e-3, 5e-4):
        grid = TimeGrid.with_step(0.0, 1.0, h)
        report = picard_solve(problem, grid, tol=tol, check_horizon=False)
        residuals.append(report.residual)
        mismatch = caputo_derivative(report.solution, 0.5) - problem.rhs_path(report.solution)
        errors.append(_sup(mismatch, grid.index_of(0.05)))
    order = math.log2(errors[0] / errors[1])
    passed = max(residuals) <= tol and order >= 0.5
    return passed, f"residual {max(residuals):.3e}, observed order {order:.3g}"


def check_contraction() -> Tuple[bool, str]:
    alpha, C = 0.5, 0.5
    delta = uniqueness_delta(10.0, 1e6, 1.0, 1.0, C, alpha)
    # |u| <= 2 on the ball B(1, 1).
    problem = _decay_problem(alpha, delta, beta=1.0, M=2.0)
    grid = TimeGrid.over(0.0, delta, 200)
    report = picard_solve(problem, grid, tol=1e-12, check_horizon=False)
    return report.observed_ratio <= 0.55, (
        f"delta {delta:.6g}, largest increment ratio {report.observed_ratio:.3g}"
    )


def _mittag_leffler_path(grid: TimeGrid, alpha: float, sign: float) -> np.ndarray:
    return np.array([mittag_leffler(alpha, sign * t ** alpha).value for t in grid.nodes])


def check_mittag_leffler() -> Tuple[bool, str]:
    grid = TimeGrid.with_step(0.0, 1.0, 1e-3)
    report = picard_solve(_decay_problem(0.5), grid, tol=1e-12, check_horizon=False)
    error = float(np.max(np.abs(report.solution.values[:, 0] - _mittag_leffler_path(grid, 0.5, -1))))
    return error <= 1e-3, f"sup error {error:.3e}"


def _worked_problem() -> plap.PLapProblem:
    return plap.PLapProblem(
        p=2, alpha=0.5, T=1.0, N=8, phi="2*exp(-0.6931471805599453*x)", beta=1.0
    )


def check_interval_arithmetic() -> Tuple[bool, str]:
    delta = existence_delta(10, 1, 2, 0.5)
    cert = plap.certify(_worked_problem())
    errors = [
        abs(delta - math.pi / 16),
        abs(cert.M - 8),
        abs(cert.delta - math.pi / 256),
        abs(cert.C1 - 4),
        abs(cert.C2 - 8),
    ]
    return max(errors) <= 1e-12, f"largest deviation {max(errors):.3e}"


def check_certified_containment() -> Tuple[bool, str]:
    problem = _worked_problem()
    cert = plap.certify(problem)
    report = plap.solve_semidiscrete(problem, TimeGrid.over(0.0, cert.delta, 100), tol=1e-12)
    passed = report.ball_escapes == 0 and report.max_deviation <= problem.beta * (1 + 1e-9)
    return passed, (
        f"delta {cert.delta:.6g}, escapes {report.ball_escapes}, "
        f"largest deviation {report.max_deviation:.3e} (beta {problem.beta:g})"
    )


def check_mnc_suite() -> Tuple[bool, str]:
    families = mnc.stock_families()
    chi = mnc.axiom_suite(mnc.hausdorff_c0, families)
    sup = mnc.axiom_suite(mnc.sup_norm_measure, families)
    unit = mnc.hausdorff_c0(mnc.UNIT_BASIS).value
    harmonic = mnc.hausdorff_c0(mnc.HARMONIC_BASIS).value
    passed = chi.passed and sup.failed() == ["singleton"] and unit == 1.0 and harmonic == 0.0
    return passed, (
        f"chi failed {chi.failed() or 'none'}, sup-norm failed {sup.failed()}, "
        f"chi(e_j) = {unit!r}, chi(e_j/j) = {harmonic!r}"
    )


def check_kernel_inequality() -> Tuple[bool, str]:
    failures = []
    cases = mnc.stock_kernel_cases()
    for label, family, alpha in cases:
        check = mnc.kernel_integral_check(family, alpha, 1.0)
        g = family.g.values
        changes_sign = g.min() < 0 < g.max()
        if not check.holds or (changes_sign and not check.lhs < check.rhs):
            failures.append(f"{label} at alpha={alpha}")
    return not failures, f"{len(cases)} cases, failures: {', '.join(failures) or 'none'}"


def check_kamke() -> Tuple[bool, str]:
    alpha, eps_list = 0.5, [1e-2, 1e-3, 1e-4, 1e-5]
    spec = kamke.KamkeSpec(alpha, 1.0)
    grid = TimeGrid.with_step(0.0, 1.0, 1e-3)
    solutions = kamke.comparison_family(spec, eps_list, grid)
    oracle = _mittag_leffler_path(grid, alpha, 1)
    oracle_error = max(
        float(np.max(np.abs(u.values[:, 0] / eps - oracle))) for u, eps in zip(solutions, eps_list)
    )
    scan = kamke.stability_scan(spec, eps_list, grid)
    spread = max(scan.ratios) - min(scan.ratios)
    candidates = {
        "t^0.5": lambda t: t ** 0.5,
        "t": lambda t: t,
        "t^2": lambda t: t ** 2,
        "0.01": lambda t: np.full_like(t, 0.01),
        "exp(t) - 1": np.expm1,
    }
    accepted = [
        label
        for label, u in candidates.items()
        if kamke.candidate_violation(spec, SampledPath.from_function(grid, u)).admissible
    ]
    zero = kamke.candidate_violation(spec, SampledPath.constant(grid, 0.0)).admissible
    passed = oracle_error <= 1e-3 and spread <= 1e-8 and not accepted and zero
    return passed, (
        f"oracle error {oracle_error:.3e}, ratio spread {spread:.3e}, "
        f"accepted nonzero candidates: {', '.join(accepted) or 'none'}"
    )


def check_plap_reductions() -> Tuple[bool, str]:
    rng = np.random.default_rng(0)
    problem = plap.PLapProblem(p=2, alpha=1.0, T=1.0, N=16, phi=HALVING_PROFILE)
    u = rng.standard_normal(problem.N)
    stencil = plap.assemble_rhs(problem)(np.zeros(1), u[None, :])[0]
    laplacian = np.diff(np.concatenate([[0.0], u, [0.0]]), n=2)
    stencil_error = float(np.max(np.abs(stencil - laplacian)) / np.max(np.abs(laplacian)))

    cert = plap.certify(problem)
    grid = TimeGrid.with_step(0.0, min(problem.T, cert.delta), 1e-3)
    report = plap.solve_semidiscrete(problem, grid, tol=1e-12)
    rhs = plap.assemble_rhs(problem)
    reference = integrate.solve_ivp(
        lambda t, y: rhs(np.array([t]), y[None, :])[0],
        (0.0, grid.b),
        problem.initial_state().entries,
        t_eval=grid.nodes,
        rtol=1e-11,
        atol=1e-13,
    )
    trajectory_error = float(np.max(np.abs(reference.y.T - report.solution.values)))

    growth_ok = True
    for p in (2.0, 2.5, 3.0, 4.5):
        z = rng.uniform(0, 10, 2500)
        x = rng.uniform(-1, 1, 2500) * z
        y = rng.uniform(-1, 1, 2500) * z
        bound = 2 ** (p - 1) * z ** (p - 1) * (1 + 1e-12)
        growth_ok &= bool(np.all(np.abs(plap.phi_p(x - y, p)) <= bound))

    passed = stencil_error <= 1e-15 and trajectory_error <= 1e-3 and growth_ok
    return passed, (
        f"stencil error {stencil_error:.3e}, trajectory error {trajectory_error:.3e}, "
        f"growth bound {'holds' if growth_ok else 'violated'}"
    )


def check_truncation() -> Tuple[bool, str]:
    problem = plap.PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=HALVING_PROFILE)
    cert = plap.certify(problem)
    grid = TimeGrid.with_step(0.0, min(problem.T, cert.delta), 1e-3)
    rows = plap.truncation_study(problem, [8, 16, 32], grid, tol=1e-12)
    differences = [row.difference for row in rows]
    monotone = all(b <= a for a, b in zip(differences, differences[1:]))
    return monotone, "differences " + ", ".join(f"{d:.3e}" for d in differences)


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("operator identities", check_operator_identities),
    ("closed-form calculus", check_closed_forms),
    ("volterra equivalence", check_volterra_equivalence),
    ("contraction certificate", check_contraction),
    ("mittag-leffler oracle", check_mittag_leffler),
    ("interval arithmetic", check_interval_arithmetic),
    ("certified containment", check_certified_containment),
    ("mnc axioms", check_mnc_suite),
    ("kernel inequality", check_kernel_inequality),
    ("kamke machinery", check_kamke),
    ("p-laplacian reductions", check_plap_reductions),
    ("truncation behaviour", check_truncation),
]


def run_battery() -> List[CheckResult]:
    """Run every check; an exception counts as a failure with its message."""
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check()
        except (ValueError, RuntimeError, ArithmeticError) as err:
            passed, detail = False, f"{type(err).__name__}: {err}"
        logger.info("%s: %s (%s)", name, "PASS" if passed else "FAIL", detail)
        results.append(CheckResult(name, passed, detail))
    return results
