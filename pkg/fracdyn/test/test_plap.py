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

import dataclasses
import logging
import math

import numpy as np
import pytest
from scipy import integrate

from fracdyn.paths import TimeGrid
from fracdyn.plap import (
    K_RULE,
    PLapProblem,
    assemble_rhs,
    certify,
    growth_bound,
    lambda_np,
    lipschitz_bound,
    mass_balance,
    phi_norm,
    phi_p,
    solve_semidiscrete,
    step_study,
    truncation_study,
)
from fracdyn.state import StateVec
from fracdyn.utils import CertificationError

HALVING = "exp(-0.6931471805599453*x)"
UNIT_PEAK = "2*exp(-0.6931471805599453*x)"


def certified_grid(problem, h=1e-3):
    return TimeGrid.with_step(0.0, min(problem.T, certify(problem).delta), h)


def test_phi_p():
    for x in (-3.0, 0.0, 7.0):
        assert phi_p(x, 2) == x
    assert phi_p(-2.0, 3) == -4.0
    for p in (2.0, 2.5, 4.0):
        assert phi_p(0.0, p) == 0.0
    x = np.linspace(-3, 3, 61)
    y = phi_p(x, 3.5)
    np.testing.assert_array_equal(y, -phi_p(-x, 3.5))
    assert np.all(np.diff(y) > 0)
    with pytest.raises(ValueError, match="p must be >= 2"):
        phi_p(1.0, 1.5)


def test_problem_validation():
    PLapProblem(p=2, alpha=0.5, T=1.0, N=2)
    with pytest.raises(ValueError, match="p must be >= 2"):
        PLapProblem(p=1.5, alpha=0.5, T=1.0, N=8)
    with pytest.raises(ValueError):
        PLapProblem(p=2, alpha=1.5, T=1.0, N=8)
    with pytest.raises(ValueError):
        PLapProblem(p=2, alpha=0.5, T=0.0, N=8)
    with pytest.raises(ValueError):
        PLapProblem(p=2, alpha=0.5, T=1.0, N=1)
    with pytest.raises(ValueError):
        PLapProblem(p=2, alpha=0.5, T=1.0, N=8, beta=0.0)
    with pytest.raises(ValueError, match="phi may only depend on x"):
        PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi="t")
    with pytest.raises(ValueError, match="psi may only depend on t"):
        PLapProblem(p=2, alpha=0.5, T=1.0, N=8, psi="x")
    with pytest.raises(ValueError, match="offset"):
        PLapProblem(p=2, alpha=0.5, T=1.0, N=8, r="1 +")

    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=4, phi=HALVING)
    np.testing.assert_allclose(problem.initial_state().entries, [0.5, 0.25, 0.125, 0.0625])


def test_lambda_np():
    u = StateVec([1.0, 2.0, 4.0, 0.0])
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=4)
    assert lambda_np(0.0, u, 0.0, 2, problem) == 1.0
    assert lambda_np(0.0, u, 0.0, 2, dataclasses.replace(problem, p=3)) == 3.0
    assert lambda_np(0.0, StateVec([5.0, 5.0, 5.0, 5.0]), 5.0, 1, problem) == 0.0
    # The boundary value enters the first stencil
    assert lambda_np(0.0, u, 3.0, 1, problem) == (2.0 - 1.0) - (1.0 - 3.0)
    with pytest.raises(IndexError):
        lambda_np(0.0, u, 0.0, 0, problem)
    with pytest.raises(IndexError):
        lambda_np(0.0, u, 0.0, 4, problem)


def test_stencil_is_discrete_laplacian():
    rng = np.random.default_rng(1)
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=32)
    rhs = assemble_rhs(problem)
    u = rng.standard_normal((5, problem.N))
    expected = np.diff(np.pad(u, ((0, 0), (1, 1))), n=2, axis=1)
    np.testing.assert_array_equal(rhs(np.linspace(0, 1, 5), u), expected)
    state = StateVec(u[0])
    for n in range(1, problem.N):
        assert lambda_np(0.0, state, 0.0, n, problem) == pytest.approx(expected[0, n - 1], rel=1e-15, abs=1e-15)


def test_stencil_examples():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=8)
    rhs = assemble_rhs(problem)
    assert rhs.at(0.0, StateVec.zeros(8)) == StateVec.zeros(8)
    assert rhs.at(0.0, StateVec.basis(4, 8)) == StateVec([0, 0, 1, -2, 1, 0, 0, 0])
    # u_{N+1} = 0 closes the last component
    assert rhs.at(0.0, StateVec.basis(8, 8)) == StateVec([0, 0, 0, 0, 0, 0, 1, -2])

    forced = PLapProblem(p=2, alpha=0.5, T=1.0, N=3, F="t * x", psi="2 * t")
    value = assemble_rhs(forced).at(1.0, StateVec([1.0, 1.0, 1.0]))
    assert value == StateVec([(0.0 - (1.0 - 2.0)) + 1.0, 2.0, -1.0 + 3.0])


def test_negative_coefficient():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=4, r="1 - t")
    rhs = assemble_rhs(problem)
    rhs(np.array([0.5]), np.ones((1, 4)))
    with pytest.raises(ValueError, match="non-negative"):
        rhs(np.array([2.0]), np.ones((1, 4)))


def test_worked_certificate():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=UNIT_PEAK, beta=1.0)
    assert phi_norm(problem) == pytest.approx(1.0, abs=1e-12)
    cert = certify(problem)
    assert cert.lam == 1
    assert cert.P == 0
    assert cert.Q == pytest.approx(4, abs=1e-12)
    assert cert.M == pytest.approx(8, abs=1e-12)
    assert cert.delta == pytest.approx(math.pi / 256, abs=1e-12)
    assert cert.C1 == pytest.approx(4, abs=1e-12)
    assert cert.C2 == pytest.approx(8, abs=1e-12)
    assert cert.k_rule == K_RULE
    assert not cert.boundary_terms_unverified
    assert list(cert.as_dict()) == ["lambda", "P", "Q", "M", "delta", "C1", "C2", "k_rule"]
    assert lipschitz_bound(problem, cert) == cert.Q


def test_cubic_certificate():
    problem = PLapProblem(p=3, alpha=0.5, T=1.0, N=8, r="0.5", phi=UNIT_PEAK, beta=1.0)
    cert = certify(problem)
    assert cert.lam == 2
    assert cert.Q == pytest.approx(4, abs=1e-12)
    assert cert.M == pytest.approx(16, abs=1e-12)
    assert cert.C1 == pytest.approx(16, abs=1e-12)
    assert cert.C2 == pytest.approx(32, abs=1e-12)
    assert lipschitz_bound(problem, cert) == cert.C1


def test_certificate_refusals(caplog):
    base = PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=HALVING)
    with pytest.raises(CertificationError, match="degenerate bound"):
        certify(dataclasses.replace(base, r="0", phi="0"))
    with pytest.raises(CertificationError, match="does not provably vanish"):
        certify(dataclasses.replace(base, F="sin(x)"))
    with pytest.raises(CertificationError, match="does not provably vanish"):
        certify(dataclasses.replace(base, phi="1"))
    with pytest.raises(CertificationError, match="not certified"):
        certify(dataclasses.replace(base, r="x"))
    with pytest.raises(CertificationError, match="non-negative"):
        certify(dataclasses.replace(base, r="sin(x)"))

    with caplog.at_level(logging.WARNING, logger="fracdyn.plap"):
        cert = certify(dataclasses.replace(base, psi="sin(t)"))
    assert cert.boundary_terms_unverified
    assert "psi is not identically zero" in caplog.text
    assert "boundary" not in "".join(cert.as_dict())

    # Time-dependent data is bounded over [0, T]
    cert = certify(dataclasses.replace(base, F="t * exp(-x)", r="1 + sin(t)^2"))
    assert cert.P == pytest.approx(math.exp(-1.0))
    assert cert.Q == pytest.approx(4 * (1 + math.sin(1.0) ** 2))


def test_growth_bound():
    rng = np.random.default_rng(2)
    problem = PLapProblem(
        p=3.0, alpha=0.5, T=1.0, N=12, r="1 + sin(t * x)^2", F="cos(t) * exp(-x)", psi="t"
    )
    rhs = assemble_rhs(problem)
    for _ in range(200):
        t = rng.uniform(0.0, 1.0)
        u = StateVec(rng.uniform(-2.0, 2.0, problem.N))
        bound = growth_bound(problem, t, u)
        assert np.all(np.abs(rhs.at(t, u).entries) <= bound * (1 + 1e-12))


def test_growth_inequality():
    rng = np.random.default_rng(3)
    for p in (2.0, 2.5, 3.0, 5.0):
        z = rng.uniform(0.0, 10.0, 2500)
        x = rng.uniform(-1.0, 1.0, 2500) * z
        y = rng.uniform(-1.0, 1.0, 2500) * z
        assert np.all(np.abs(phi_p(x - y, p)) <= 2 ** (p - 1) * z ** (p - 1) * (1 + 1e-12))


def test_solve_zero():
    problem = PLapProblem(p=2.5, alpha=0.5, T=1.0, N=8)
    report = solve_semidiscrete(problem, TimeGrid.over(0.0, 0.1, 20), certified=False)
    assert np.all(report.solution.values == 0.0)
    assert report.iterations == 1


def test_classical_oracle():
    problem = PLapProblem(p=2, alpha=1.0, T=1.0, N=8, phi=HALVING)
    grid = certified_grid(problem)
    report = solve_semidiscrete(problem, grid, tol=1e-12)
    rhs = assemble_rhs(problem)
    reference = integrate.solve_ivp(
        lambda t, y: rhs(np.array([t]), y[None, :])[0],
        (0.0, grid.b),
        problem.initial_state().entries,
        t_eval=grid.nodes,
        rtol=1e-11,
        atol=1e-13,
    )
    assert np.max(np.abs(reference.y.T - report.solution.values)) <= 1e-3


def test_certified_containment():
    problem = PLapProblem(p=3, alpha=0.5, T=1.0, N=8, phi=HALVING, beta=0.5)
    grid = certified_grid(problem, h=1e-4)
    report = solve_semidiscrete(problem, grid)
    assert report.ball_escapes == 0
    assert report.max_deviation <= problem.beta


def test_mass_balance():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=HALVING)
    report = solve_semidiscrete(problem, certified_grid(problem), tol=1e-12)
    assert mass_balance(problem, report) <= 1e-6

    forced = PLapProblem(p=3, alpha=0.5, T=1.0, N=6, phi=HALVING, F="exp(-x) * t", psi="0.1 * t")
    report = solve_semidiscrete(forced, TimeGrid.over(0.0, 0.01, 10), tol=1e-12)
    assert mass_balance(forced, report) <= 1e-6


def test_uncertified_solve(caplog):
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=4, phi="1 / (1 + x)", F="sin(x)")
    with caplog.at_level(logging.WARNING, logger="fracdyn.plap"):
        report = solve_semidiscrete(problem, TimeGrid.over(0.0, 0.01, 10))
    assert "without a certificate" in caplog.text
    assert report.residual <= 1e-7


def test_truncation_study():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=HALVING)
    grid = certified_grid(problem)
    rows = truncation_study(problem, [8, 16, 32], grid, tol=1e-12)
    assert [(row.n_coarse, row.n_fine) for row in rows] == [(8, 16), (16, 32)]
    assert rows[1].difference <= rows[0].difference
    assert truncation_study(problem, [8, 8], grid)[0].difference == 0.0
    with pytest.raises(ValueError):
        truncation_study(problem, [8], grid)
    with pytest.raises(ValueError):
        truncation_study(problem, [16, 8], grid)


def test_step_study():
    problem = PLapProblem(p=2, alpha=0.5, T=1.0, N=8, phi=HALVING)
    grid = certified_grid(problem)
    row = step_study(problem, grid, tol=1e-12)
    assert row.h_fine == row.h_coarse / 2
    assert 0 < row.difference <= 1e-3
