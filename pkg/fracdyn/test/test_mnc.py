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

import math

import numpy as np
import pytest

from fracdyn.mnc import (
    HARMONIC_BASIS,
    UNIT_BASIS,
    CoefficientRule,
    ConvexHull,
    ConvexPair,
    FinitePathFamily,
    FiniteSet,
    Measurement,
    ParametricPathFamily,
    Scale,
    ScaledBasis,
    Singleton,
    Translate,
    axiom_suite,
    hausdorff_c0,
    kernel_integral_check,
    path_mnc,
    stock_families,
    stock_kernel_cases,
    sup_norm_measure,
)
from fracdyn.paths import SampledPath, TimeGrid
from fracdyn.state import StateVec


def test_hausdorff_values():
    assert hausdorff_c0(UNIT_BASIS) == Measurement(1.0)
    assert hausdorff_c0(HARMONIC_BASIS) == Measurement(0.0)
    assert hausdorff_c0(Singleton(StateVec([1.0, 2.0]))) == Measurement(0.0)
    assert hausdorff_c0(FiniteSet((StateVec([5.0]), StateVec([0.0, -7.0])))).value == 0.0
    assert hausdorff_c0(-3 * UNIT_BASIS).value == 3.0
    assert hausdorff_c0(UNIT_BASIS + StateVec([4.0])).value == 1.0
    assert hausdorff_c0(ScaledBasis(CoefficientRule(2.0, -1.0, 0.5, alternating=True))).value == 2.0
    assert hausdorff_c0(ScaledBasis(CoefficientRule(2.0, 1.0))).value == 3.0

    # Adding a relatively compact set leaves the measure unchanged
    three = FiniteSet((StateVec([1.0]), StateVec([0.0, 2.0])))
    assert hausdorff_c0(UNIT_BASIS + three) == Measurement(1.0)
    # Two non-compact summands only give an upper bound
    assert hausdorff_c0(UNIT_BASIS + UNIT_BASIS) == Measurement(2.0, upper_bound=True)
    assert hausdorff_c0(ConvexPair(UNIT_BASIS, HARMONIC_BASIS, 0.25)).value == 0.25
    assert hausdorff_c0(ConvexHull(UNIT_BASIS)).value == 1.0


def test_not_in_c0():
    bad = Singleton(StateVec([1.0], tail_env=1.0, tail_vanishes=False))
    with pytest.raises(ValueError, match="not in c0"):
        hausdorff_c0(bad)
    with pytest.raises(ValueError, match="not in c0"):
        hausdorff_c0(UNIT_BASIS + bad)


def test_sup_norm_values():
    assert sup_norm_measure(UNIT_BASIS) == Measurement(1.0)
    assert sup_norm_measure(Singleton(StateVec([3.0, -4.0]))) == Measurement(4.0)
    assert sup_norm_measure(ScaledBasis(CoefficientRule(0.5, 0.5, 2.0))).value == 1.0
    assert sup_norm_measure(Translate(UNIT_BASIS, StateVec([1.0]))) == Measurement(2.0, True)
    assert sup_norm_measure(Translate(FiniteSet((StateVec([1.0]),)), StateVec([1.0]))).value == 2.0


def test_structure():
    three = FiniteSet((StateVec([1.0]), StateVec([0.0, 2.0])))
    assert Singleton(StateVec([1.0])).is_subset(three)
    assert not Singleton(StateVec([3.0])).is_subset(three)
    assert three.is_subset(ConvexHull(three))
    assert UNIT_BASIS.contains(StateVec.basis(5, 7))
    assert not UNIT_BASIS.contains(StateVec.basis(5, 7, 2.0))
    assert HARMONIC_BASIS.contains(StateVec.basis(4, 4, 0.25))
    assert UNIT_BASIS.is_subset(UNIT_BASIS + FiniteSet((StateVec.zeros(1),)))
    assert (2 * UNIT_BASIS).contains(StateVec.basis(3, 3, 2.0))
    assert Translate(UNIT_BASIS, StateVec([1.0])).contains(StateVec([1.0, 1.0]))
    assert Scale(UNIT_BASIS, 0.0).members() == [StateVec.zeros(1)]
    assert HARMONIC_BASIS.is_relatively_compact()
    assert not UNIT_BASIS.is_relatively_compact()
    with pytest.raises(ValueError):
        FiniteSet(())
    with pytest.raises(ValueError):
        ConvexPair(UNIT_BASIS, UNIT_BASIS, 1.5)


def test_axiom_suite():
    families = stock_families()
    assert len(families) == 10

    report = axiom_suite(hausdorff_c0, families)
    assert report.passed, report.failed()
    assert report.measure == "hausdorff_c0"
    for result in report.results.values():
        assert result.checked > 0, result.name

    report = axiom_suite(sup_norm_measure, families)
    assert report.failed() == ["singleton"]
    assert "3.0 != 0.0" in report.results["singleton"].witness

    with pytest.raises(ValueError):
        axiom_suite(hausdorff_c0, [])


def test_axiom_suite_catches_bad_measure():
    def doubled_on_scale(X):
        value = hausdorff_c0(X)
        if isinstance(X, Scale):
            return Measurement(2 * value.value)
        return value

    report = axiom_suite(doubled_on_scale, stock_families())
    assert "homogeneity" in report.failed()
    assert report.results["homogeneity"].witness is not None


def test_kernel_inequality_closed_form():
    grid = TimeGrid.over(0.0, 1.0, 1000)
    family = ParametricPathFamily(SampledPath.constant(grid, 1.0), UNIT_BASIS)
    check = kernel_integral_check(family, 0.5, 1.0)
    assert check.lhs == pytest.approx(2 / math.sqrt(math.pi), abs=1e-9)
    assert check.rhs == pytest.approx(check.lhs, abs=1e-12)
    assert check.holds


def test_kernel_inequality_corpus():
    cases = stock_kernel_cases()
    assert len(cases) == 40
    for label, family, alpha in cases:
        check = kernel_integral_check(family, alpha, 1.0)
        assert check.holds, (label, alpha)
        g = family.g.scalar_values()
        if g.min() < 0 < g.max():
            assert check.lhs < check.rhs, (label, alpha)

    grid = TimeGrid.over(0.0, 1.0, 10)
    paths = FinitePathFamily((SampledPath.constant(grid, 1.0),))
    with pytest.raises(ValueError, match="parametric"):
        kernel_integral_check(paths, 0.5, 1.0)


def test_path_mnc():
    grid = TimeGrid.over(0.0, 1.0, 100)
    smooth = ParametricPathFamily(SampledPath.from_function(grid, np.sin), HARMONIC_BASIS)
    assert path_mnc(smooth) == pytest.approx(0.0, abs=1e-4)

    spread = ParametricPathFamily(SampledPath.constant(grid, 2.0), UNIT_BASIS)
    assert path_mnc(spread) == pytest.approx(2.0)
    assert path_mnc(spread, sup_norm_measure) == pytest.approx(2.0)

    # A jump that no refinement resolves keeps the equicontinuity term alive
    step = SampledPath.from_function(grid, lambda t: (t > 0.5).astype(float))
    jumps = FinitePathFamily((step, SampledPath.constant(grid, 0.0)))
    assert path_mnc(jumps) == pytest.approx(1.0)

    with pytest.raises(ValueError, match="grid too small"):
        path_mnc(FinitePathFamily((SampledPath.constant(TimeGrid.over(0.0, 1.0, 1), 0.0),)))
