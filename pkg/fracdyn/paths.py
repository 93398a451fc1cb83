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

"""Uniform time grids and functions sampled on them.

A `SampledPath` is the numerical stand-in for a continuous function from an
interval [a, b] into c0 (or into the reals). Values are stored as a two
dimensional array with one row per grid node; scalar paths have one column.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Any, Callable

import numpy as np

from .state import StateVec
from .utils import ArrayLike, ContractError, as_array


@dataclasses.dataclass(frozen=True)
class TimeGrid:
    """The nodes t_j = a + j * h for j = 0, ..., n_steps."""

    a: float
    h: float
    n_steps: int

    def __post_init__(self) -> None:
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ContractError("grid step h must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ContractError("grid needs n_steps >= 1")

    @classmethod
    def over(cls, a: float, b: float, n_steps: int) -> TimeGrid:
        """A grid with n_steps uniform steps spanning [a, b]."""
        if not b > a:
            raise ContractError("interval [a, b] must have b > a")
        return cls(float(a), (b - a) / n_steps, int(n_steps))

    @classmethod
    def with_step(cls, a: float, b: float, h: float) -> TimeGrid:
        """A grid with step h whose last node does not pass b."""
        if not b > a:
            raise ContractError("interval [a, b] must have b > a")
        n_steps = max(1, int(math.floor((b - a) / h + 1e-9)))
        return cls(float(a), float(h), n_steps)

    @property
    def b(self) -> float:
        return self.a + self.h * self.n_steps

    @property
    def size(self) -> int:
        return self.n_steps + 1

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n_steps + 1)

    def halve(self) -> TimeGrid:
        return TimeGrid(self.a, self.h / 2, 2 * self.n_steps)

    def index_of(self, t: float) -> int:
        """The index of the node at time t."""
        j = int(round((t - self.a) / self.h))
        if not 0 <= j <= self.n_steps or not math.isclose(
            self.a + j * self.h, t, rel_tol=1e-9, abs_tol=1e-12
        ):
            raise ContractError(f"t={t} is not a node of the grid")
        return j


class SampledPath:
    """A function sampled at the nodes of a time grid.

    Attributes:
        grid: The time grid.
        values: Read-only array of shape (grid.size, dim).
        scalar: Whether the path was built from scalar samples.
    """

    __slots__ = ["grid", "values", "scalar"]

    def __init__(self, grid: TimeGrid, values: ArrayLike) -> None:
        array = np.asarray(values, dtype=float)
        scalar = array.ndim == 1
        if scalar:
            array = array[:, None]
        if array.ndim != 2 or array.shape[0] != grid.size:
            raise ContractError(
                f"path needs {grid.size} rows of values, got shape {np.shape(values)}"
            )
        self.grid = grid
        self.values = as_array(array)
        self.scalar = scalar

    def __repr__(self) -> str:
        return f"SampledPath({self.grid!r}, dim={self.dim})"

    @classmethod
    def from_function(cls, grid: TimeGrid, f: Callable[[np.ndarray], Any]) -> SampledPath:
        """Sample a vectorised function of time on the grid."""
        return cls(grid, np.broadcast_to(np.asarray(f(grid.nodes), dtype=float), (grid.size,)))

    @classmethod
    def constant(cls, grid: TimeGrid, value: ArrayLike) -> SampledPath:
        value = np.asarray(value, dtype=float)
        if value.ndim == 0:
            return cls(grid, np.full(grid.size, float(value)))
        return cls(grid, np.tile(value, (grid.size, 1)))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def scalar_values(self) -> np.ndarray:
        if self.dim != 1:
            raise ContractError("path is not scalar")
        return self.values[:, 0]

    def __getitem__(self, j: int) -> StateVec:
        return StateVec(self.values[j])

    def node_norms(self) -> np.ndarray:
        """The sup-norm of the state at every node."""
        return np.max(np.abs(self.values), axis=1)

    def sup_norm(self) -> float:
        return float(np.max(self.node_norms()))

    def with_values(self, values: ArrayLike) -> SampledPath:
        values = np.asarray(values, dtype=float)
        if self.scalar and values.ndim == 2 and values.shape[1] == 1:
            values = values[:, 0]
        return SampledPath(self.grid, values)

    def shifted(self) -> SampledPath:
        """The path t -> f(t) - f(a)."""
        return self.with_values(self.values - self.values[0])

    def _check_compatible(self, other: SampledPath) -> None:
        if self.grid != other.grid:
            raise ContractError("paths live on mismatched grids")
        if self.dim != other.dim:
            raise ContractError("paths have mismatched dimensions")

    def __add__(self, other: SampledPath) -> SampledPath:
        if not isinstance(other, SampledPath):
            return NotImplemented
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: SampledPath) -> SampledPath:
        if not isinstance(other, SampledPath):
            return NotImplemented
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __neg__(self) -> SampledPath:
        return self.with_values(-self.values)

    def __rmul__(self, other: float) -> SampledPath:
        if isinstance(other, bool) or not isinstance(other, (int, float, np.floating)):
            return NotImplemented
        return self.with_values(float(other) * self.values)

    def __abs__(self) -> SampledPath:
        return self.with_values(np.abs(self.values))
