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

"""Measures of non-compactness on representable subsets of c0.

Subsets of c0 are represented symbolically. Finite sets are stored explicitly;
infinite families such as {c_j e_j : j >= 1} are stored through a closed-form
rule for c_j. New families are formed by translation, scaling, Minkowski sums,
convex combinations and convex hulls:

    X + Y      Minkowski sum
    X + v      translate by a state v
    lam * X    scale

Two measures are provided. The Hausdorff measure

    chi(X) = lim_k sup_{x in X} sup_{l >= k} |x_l|

vanishes exactly on relatively compact sets. The sup-norm measure
mu(X) = sup_{x in X} |x| is sublinear but assigns non-zero values to singletons.
Values that can only be bounded from above are flagged as such.
"""
from __future__ import annotations

import abc
import dataclasses
import itertools
import logging
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .frac_core import rl_integral
from .paths import SampledPath, TimeGrid
from .state import OrderLike, StateVec, as_order
from .utils import ContractError

logger = logging.getLogger(__name__)


class Measurement(NamedTuple):
    """A measure value; if upper_bound is set only value >= true value is known."""

    value: float
    upper_bound: bool = False


_ZERO = StateVec.zeros(1)


class SetFamily(abc.ABC):
    """A non-empty bounded subset of c0."""

    @abc.abstractmethod
    def members(self) -> Optional[List[StateVec]]:
        """All members if the family is finite, else None."""

    @abc.abstractmethod
    def check_c0(self) -> None:
        """Raise ContractError if some member is not in c0."""

    @abc.abstractmethod
    def is_relatively_compact(self) -> bool:
        pass

    @abc.abstractmethod
    def contains(self, x: StateVec) -> bool:
        """Structural membership test; False when membership cannot be shown."""

    @abc.abstractmethod
    def _hausdorff(self) -> Measurement:
        pass

    @abc.abstractmethod
    def _sup_norm(self) -> Measurement:
        pass

    def is_subset(self, other: SetFamily) -> bool:
        """Structural inclusion test; False when inclusion cannot be shown."""
        if self == other:
            return True
        if isinstance(other, ConvexHull) and self.is_subset(other.base):
            return True
        if isinstance(other, MinkowskiSum):
            if other.right.contains(_ZERO) and self.is_subset(other.left):
                return True
            if other.left.contains(_ZERO) and self.is_subset(other.right):
                return True
        members = self.members()
        if members is not None:
            return all(other.contains(x) for x in members)
        return False

    def __add__(self, other):
        if isinstance(other, SetFamily):
            return MinkowskiSum(self, other)
        if isinstance(other, StateVec):
            return Translate(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, bool) or not isinstance(other, (int, float, np.floating)):
            return NotImplemented
        return Scale(self, float(other))


def _finite_sup_norm(members: Sequence[StateVec]) -> Measurement:
    return Measurement(max(x.norm() for x in members))


def _check_members(members: Sequence[StateVec]) -> None:
    for x in members:
        if not x.in_c0:
            raise ContractError(f"{x!r} is not in c0")


@dataclasses.dataclass(frozen=True)
class FiniteSet(SetFamily):
    points: Tuple[StateVec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ContractError("a finite set needs at least one member")

    def members(self) -> List[StateVec]:
        return list(self.points)

    def check_c0(self) -> None:
        _check_members(self.points)

    def is_relatively_compact(self) -> bool:
        return True

    def contains(self, x: StateVec) -> bool:
        return x in self.points

    def _hausdorff(self) -> Measurement:
        return Measurement(0.0)

    def _sup_norm(self) -> Measurement:
        return _finite_sup_norm(self.points)


@dataclasses.dataclass(frozen=True)
class Singleton(SetFamily):
    point: StateVec

    def members(self) -> List[StateVec]:
        return [self.point]

    def check_c0(self) -> None:
        _check_members([self.point])

    def is_relatively_compact(self) -> bool:
        return True

    def contains(self, x: StateVec) -> bool:
        return x == self.point

    def _hausdorff(self) -> Measurement:
        return Measurement(0.0)

    def _sup_norm(self) -> Measurement:
        return Measurement(self.point.norm())


@dataclasses.dataclass(frozen=True)
class CoefficientRule:
    """The coefficients c_j = sign_j (c + d / j^s) for j >= 1.

    sign_j is (-1)^(j + 1) if alternating, else 1.
    """

    c: float
    d: float = 0.0
    s: float = 0.0
    alternating: bool = False

    def __post_init__(self) -> None:
        if self.s < 0:
            raise ContractError("decay exponent s must be non-negative")

    def __call__(self, j: int) -> float:
        sign = -1.0 if self.alternating and j % 2 == 0 else 1.0
        return sign * (self.c + self.d / j ** self.s)

    def limsup(self) -> float:
        """limsup_j |c_j|."""
        if self.s == 0:
            return abs(self.c + self.d)
        return abs(self.c)

    def sup_abs(self) -> float:
        """sup_j |c_j|; j^(-s) sweeps (0, 1] so the extremes sit at the ends."""
        if self.s == 0:
            return abs(self.c + self.d)
        return max(abs(self.c + self.d), abs(self.c))


@dataclasses.dataclass(frozen=True)
class ScaledBasis(SetFamily):
    """The family {c_j e_j : j >= 1}."""

    rule: CoefficientRule

    def members(self) -> None:
        return None

    def check_c0(self) -> None:
        pass

    def is_relatively_compact(self) -> bool:
        return self.rule.limsup() == 0

    def contains(self, x: StateVec) -> bool:
        nonzero = np.flatnonzero(x.entries)
        if x.tail_env != 0 or len(nonzero) != 1:
            return False
        j = int(nonzero[0]) + 1
        return x.entries[j - 1] == self.rule(j)

    def _hausdorff(self) -> Measurement:
        return Measurement(self.rule.limsup())

    def _sup_norm(self) -> Measurement:
        return Measurement(self.rule.sup_abs())


@dataclasses.dataclass(frozen=True)
class Translate(SetFamily):
    base: SetFamily
    offset: StateVec

    def members(self) -> Optional[List[StateVec]]:
        members = self.base.members()
        if members is None:
            return None
        return [x + self.offset for x in members]

    def check_c0(self) -> None:
        self.base.check_c0()
        _check_members([self.offset])

    def is_relatively_compact(self) -> bool:
        return self.base.is_relatively_compact()

    def contains(self, x: StateVec) -> bool:
        return self.base.contains(x - self.offset)

    def _hausdorff(self) -> Measurement:
        return self.base._hausdorff()

    def _sup_norm(self) -> Measurement:
        members = self.members()
        if members is not None:
            return _finite_sup_norm(members)
        base = self.base._sup_norm()
        shift = self.offset.norm()
        if shift == 0:
            return base
        return Measurement(base.value + shift, upper_bound=True)


@dataclasses.dataclass(frozen=True)
class Scale(SetFamily):
    base: SetFamily
    factor: float

    def members(self) -> Optional[List[StateVec]]:
        members = self.base.members()
        if members is None:
            return [StateVec.zeros(1)] if self.factor == 0 else None
        return [self.factor * x for x in members]

    def check_c0(self) -> None:
        self.base.check_c0()

    def is_relatively_compact(self) -> bool:
        return self.factor == 0 or self.base.is_relatively_compact()

    def contains(self, x: StateVec) -> bool:
        if self.factor == 0:
            return x == _ZERO
        return self.base.contains((1 / self.factor) * x)

    def _hausdorff(self) -> Measurement:
        base = self.base._hausdorff()
        return Measurement(abs(self.factor) * base.value, base.upper_bound and self.factor != 0)

    def _sup_norm(self) -> Measurement:
        base = self.base._sup_norm()
        return Measurement(abs(self.factor) * base.value, base.upper_bound and self.factor != 0)


def _exact_zero(measurement: Measurement) -> bool:
    return measurement.value == 0 and not measurement.upper_bound


@dataclasses.dataclass(frozen=True)
class MinkowskiSum(SetFamily):
    left: SetFamily
    right: SetFamily

    def members(self) -> Optional[List[StateVec]]:
        left, right = self.left.members(), self.right.members()
        if left is None or right is None:
            return None
        return [x + y for x, y in itertools.product(left, right)]

    def check_c0(self) -> None:
        self.left.check_c0()
        self.right.check_c0()

    def is_relatively_compact(self) -> bool:
        return self.left.is_relatively_compact() and self.right.is_relatively_compact()

    def contains(self, x: StateVec) -> bool:
        left, right = self.left.members(), self.right.members()
        if left is not None:
            return any(self.right.contains(x - a) for a in left)
        if right is not None:
            return any(self.left.contains(x - b) for b in right)
        return False

    def _hausdorff(self) -> Measurement:
        left, right = self.left._hausdorff(), self.right._hausdorff()
        # Adding a relatively compact set leaves chi unchanged.
        if _exact_zero(left):
            return right
        if _exact_zero(right):
            return left
        return Measurement(left.value + right.value, upper_bound=True)

    def _sup_norm(self) -> Measurement:
        members = self.members()
        if members is not None:
            return _finite_sup_norm(members)
        left, right = self.left._sup_norm(), self.right._sup_norm()
        if _exact_zero(left):
            return right
        if _exact_zero(right):
            return left
        return Measurement(left.value + right.value, upper_bound=True)


@dataclasses.dataclass(frozen=True)
class ConvexPair(SetFamily):
    """The set lam X + (1 - lam) Y for lam in [0, 1]."""

    first: SetFamily
    second: SetFamily
    lam: float

    def __post_init__(self) -> None:
        if not 0 <= self.lam <= 1:
            raise ContractError("convex weight must lie in [0,1]")

    @property
    def as_sum(self) -> MinkowskiSum:
        return MinkowskiSum(Scale(self.first, self.lam), Scale(self.second, 1 - self.lam))

    def members(self) -> Optional[List[StateVec]]:
        return self.as_sum.members()

    def check_c0(self) -> None:
        self.as_sum.check_c0()

    def is_relatively_compact(self) -> bool:
        return self.as_sum.is_relatively_compact()

    def contains(self, x: StateVec) -> bool:
        return self.as_sum.contains(x)

    def _hausdorff(self) -> Measurement:
        return self.as_sum._hausdorff()

    def _sup_norm(self) -> Measurement:
        return self.as_sum._sup_norm()


@dataclasses.dataclass(frozen=True)
class ConvexHull(SetFamily):
    """The convex hull of a family.

    A convex combination cannot exceed the largest member in any coordinate, so
    the coordinate envelopes sup_x |x_l| of the hull and the base agree. Both
    measures are functions of these envelopes.
    """

    base: SetFamily

    def members(self) -> Optional[List[StateVec]]:
        members = self.base.members()
        if members is not None and len(members) == 1:
            return members
        return None

    def check_c0(self) -> None:
        self.base.check_c0()

    def is_relatively_compact(self) -> bool:
        return self.base.is_relatively_compact()

    def contains(self, x: StateVec) -> bool:
        return self.base.contains(x)

    def _hausdorff(self) -> Measurement:
        return self.base._hausdorff()

    def _sup_norm(self) -> Measurement:
        return self.base._sup_norm()


def hausdorff_c0(X: SetFamily) -> Measurement:
    """The Hausdorff measure of non-compactness chi(X) in c0.

    Raises:
        ContractError: If a member of X is not in c0.
    """
    X.check_c0()
    return X._hausdorff()


def sup_norm_measure(X: SetFamily) -> Measurement:
    """The measure sup_{x in X} |x|."""
    return X._sup_norm()


Measure = Callable[[SetFamily], Measurement]


@dataclasses.dataclass
class AxiomResult:
    """Outcome of one axiom over a corpus.

    Attributes:
        name: Name of the axiom.
        checked: Number of conclusive comparisons.
        inconclusive: Comparisons undecidable because a value is only an upper bound.
        witness: Description of the first violation, if any.
    """

    name: str
    checked: int = 0
    inconclusive: int = 0
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.witness is None


@dataclasses.dataclass
class AxiomReport:
    measure: str
    results: Dict[str, AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failed(self) -> List[str]:
        return [name for name, r in self.results.items() if not r.passed]


_SLACK = 1e-12

CONVEX_WEIGHTS = (0.0, 0.25, 0.5, 1.0)
HOMOGENEITY_FACTORS = (-2.0, 0.0, 0.5, 3.0)


def _record_le(result: AxiomResult, lhs: Measurement, rhs: Measurement, witness: str) -> None:
    """Record the check lhs <= rhs.

    An upper bound on the left is harmless when the check passes, an upper
    bound on the right makes a pass inconclusive.
    """
    holds = lhs.value <= rhs.value + _SLACK
    if (holds and rhs.upper_bound) or (not holds and lhs.upper_bound):
        result.inconclusive += 1
        return
    result.checked += 1
    if not holds and result.witness is None:
        result.witness = f"{witness}: {lhs.value!r} > {rhs.value!r}"


def _record_eq(result: AxiomResult, lhs: Measurement, rhs: Measurement, witness: str) -> None:
    if lhs.upper_bound or rhs.upper_bound:
        result.inconclusive += 1
        return
    result.checked += 1
    if abs(lhs.value - rhs.value) > _SLACK and result.witness is None:
        result.witness = f"{witness}: {lhs.value!r} != {rhs.value!r}"


def axiom_suite(measure: Measure, families: Sequence[SetFamily]) -> AxiomReport:
    """Check the measure axioms over a corpus of families.

    The axioms are: a non-empty kernel of relatively compact sets, monotonicity
    under structural inclusion, invariance under convex hulls, the convexity
    inequality, homogeneity, subadditivity and the singleton property.
    Failures are reported with a witness.
    """
    if not families:
        raise ContractError("axiom suite needs at least one family")
    results = {
        name: AxiomResult(name)
        for name in (
            "kernel",
            "monotonicity",
            "convex_hull",
            "convexity",
            "homogeneity",
            "subadditivity",
            "singleton",
        )
    }
    values = [measure(X) for X in families]

    kernel = results["kernel"]
    zeros = [X for X, v in zip(families, values) if _exact_zero(v)]
    kernel.checked = len(zeros)
    if not zeros:
        kernel.witness = "no family of the corpus lies in the kernel"
    for X in zeros:
        if not X.is_relatively_compact() and kernel.witness is None:
            kernel.witness = f"{X!r} is in the kernel but not relatively compact"

    marker = FiniteSet((_ZERO, StateVec.basis(1, 1)))
    pairs = [(X, Y) for X in families for Y in families if X is not Y and X.is_subset(Y)]
    pairs += [(X, ConvexHull(X)) for X in families]
    pairs += [(X, X + marker) for X in families]
    for X, Y in pairs:
        _record_le(results["monotonicity"], measure(X), measure(Y), f"{X!r} <= {Y!r}")

    for X, v in zip(families, values):
        _record_eq(results["convex_hull"], measure(ConvexHull(X)), v, f"conv {X!r}")
        for lam in HOMOGENEITY_FACTORS:
            scaled = Measurement(abs(lam) * v.value, v.upper_bound and lam != 0)
            _record_eq(results["homogeneity"], measure(lam * X), scaled, f"{lam} * {X!r}")
        if isinstance(X, Singleton) or (X.members() is not None and len(X.members()) == 1):
            _record_eq(results["singleton"], v, Measurement(0.0), f"{X!r}")

    for (X, vx), (Y, vy) in itertools.product(zip(families, values), repeat=2):
        combined = Measurement(vx.value + vy.value, vx.upper_bound or vy.upper_bound)
        _record_le(results["subadditivity"], measure(X + Y), combined, f"{X!r} + {Y!r}")
        for lam in CONVEX_WEIGHTS:
            bound = Measurement(
                lam * vx.value + (1 - lam) * vy.value, vx.upper_bound or vy.upper_bound
            )
            _record_le(
                results["convexity"],
                measure(ConvexPair(X, Y, lam)),
                bound,
                f"{lam} X + {1 - lam} Y with X={X!r}, Y={Y!r}",
            )

    report = AxiomReport(getattr(measure, "__name__", repr(measure)), results)
    logger.info("axiom suite for %s: failed %s", report.measure, report.failed() or "none")
    return report


UNIT_BASIS = ScaledBasis(CoefficientRule(1.0))
HARMONIC_BASIS = ScaledBasis(CoefficientRule(0.0, 1.0, 1.0))


def stock_families() -> List[SetFamily]:
    """The ten-family test corpus."""
    three = FiniteSet(
        (StateVec([1.0, 2.0]), StateVec([0.0, -1.0, 4.0]), StateVec([0.5]))
    )
    alternating = ScaledBasis(CoefficientRule(2.0, -1.0, 0.5, alternating=True))
    return [
        Singleton(StateVec([3.0, -1.0, 0.5])),
        FiniteSet((StateVec.zeros(1),)),
        three,
        UNIT_BASIS,
        HARMONIC_BASIS,
        alternating,
        Translate(UNIT_BASIS, StateVec([1.0, -2.0])),
        Scale(ScaledBasis(CoefficientRule(0.5, 0.5, 2.0)), -3.0),
        MinkowskiSum(UNIT_BASIS, three),
        ConvexPair(alternating, HARMONIC_BASIS, 0.3),
    ]


class PathFamily(abc.ABC):
    """A bounded set of continuous paths sampled on one grid."""

    @property
    @abc.abstractmethod
    def grid(self) -> TimeGrid:
        pass

    @abc.abstractmethod
    def section(self, j: int) -> SetFamily:
        """The set {u(t_j) : u in the family}."""

    @abc.abstractmethod
    def modulus(self, lag: int) -> Measurement:
        """sup over members of max |u(t_i) - u(t_k)| over 0 < |i - k| <= lag."""


def _lagged_differences(values: np.ndarray, lag: int) -> float:
    if lag >= values.shape[0]:
        raise ContractError("lag exceeds the grid")
    return max(
        float(np.max(np.abs(values[m:] - values[:-m]))) for m in range(1, lag + 1)
    )


@dataclasses.dataclass(frozen=True)
class ParametricPathFamily(PathFamily):
    """The paths t -> g(t) x for x in a base family."""

    g: SampledPath
    base: SetFamily

    def __post_init__(self) -> None:
        if self.g.dim != 1:
            raise ContractError("the profile g must be a scalar path")

    @property
    def grid(self) -> TimeGrid:
        return self.g.grid

    def section(self, j: int) -> SetFamily:
        return Scale(self.base, float(self.g.values[j, 0]))

    def modulus(self, lag: int) -> Measurement:
        size = sup_norm_measure(self.base)
        return Measurement(_lagged_differences(self.g.values, lag) * size.value, size.upper_bound)


@dataclasses.dataclass(frozen=True)
class FinitePathFamily(PathFamily):
    paths: Tuple[SampledPath, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paths", tuple(self.paths))
        if not self.paths:
            raise ContractError("a path family needs at least one path")
        if any(u.grid != self.paths[0].grid for u in self.paths):
            raise ContractError("paths live on mismatched grids")

    @property
    def grid(self) -> TimeGrid:
        return self.paths[0].grid

    def section(self, j: int) -> SetFamily:
        return FiniteSet(tuple(u[j] for u in self.paths))

    def modulus(self, lag: int) -> Measurement:
        return Measurement(max(_lagged_differences(u.values, lag) for u in self.paths))


def path_mnc(X: PathFamily, base_measure: Measure = hausdorff_c0) -> float:
    """Discrete measure of non-compactness of a path family.

    The equicontinuity term extrapolates the modulus of continuity at lags one
    and two grid steps linearly to lag zero, max(0, 2 w(h) - w(2h)). The second
    term is the largest base measure of a section.
    """
    if X.grid.n_steps < 2:
        raise ContractError("grid too small: the modulus needs at least 3 nodes")
    equicontinuity = max(0.0, 2 * X.modulus(1).value - X.modulus(2).value)
    sections = max(base_measure(X.section(j)).value for j in range(X.grid.size))
    return equicontinuity + sections


class KernelCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def kernel_integral_check(X: PathFamily, alpha: OrderLike, t: float) -> KernelCheck:
    """Compare chi(J^alpha X)(t) with J^alpha[chi(X(.))](t).

    For X = {g(.) x : x in B} the left side is |J^alpha g(t)| chi(B) and the
    right side is J^alpha |g| (t) chi(B).

    Raises:
        ContractError: If X is not a parametric family.
    """
    if not isinstance(X, ParametricPathFamily):
        raise ContractError("the kernel inequality is only computable for parametric families")
    order = as_order(alpha)
    j = X.grid.index_of(t)
    chi = hausdorff_c0(X.base).value
    lhs = abs(float(rl_integral(X.g, order).values[j, 0])) * chi
    rhs = float(rl_integral(abs(X.g), order).values[j, 0]) * chi
    return KernelCheck(lhs, rhs, lhs <= rhs + 1e-9)


KERNEL_ORDERS = (0.25, 0.5, 0.75, 1.0)

KERNEL_PROFILES: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "1": np.ones_like,
    "t": lambda t: t,
    "t - 0.5": lambda t: t - 0.5,
    "sin(2 pi t)": lambda t: np.sin(2 * math.pi * t),
    "cos(3 t)": lambda t: np.cos(3 * t),
    "exp(-t)": lambda t: np.exp(-t),
    "t^2": lambda t: t ** 2,
    "0": np.zeros_like,
    "2 t^2 - 1": lambda t: 2 * t ** 2 - 1,
    "|t - 0.3|": lambda t: np.abs(t - 0.3),
}


def stock_kernel_cases(n_steps: int = 1000) -> List[Tuple[str, ParametricPathFamily, float]]:
    """The (profile, family, order) cases of the kernel inequality on [0, 1]."""
    grid = TimeGrid.over(0.0, 1.0, n_steps)
    cases = []
    for label, g in KERNEL_PROFILES.items():
        family = ParametricPathFamily(SampledPath.from_function(grid, g), UNIT_BASIS)
        cases.extend((label, family, alpha) for alpha in KERNEL_ORDERS)
    return cases
