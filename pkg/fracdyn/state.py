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

"""Orders of fractional operators and truncated elements of c0.

This module contains the two value types that every other module passes around:
the order of a fractional operator and a truncated element of the sequence
space c0 of real sequences converging to zero, equipped with the sup-norm.
"""
from __future__ import annotations

from typing import Any, Union

import numpy as np

from .utils import ArrayLike, ContractError, as_array


class FracOrder:
    """The order of a fractional integral or derivative.

    Orders live in (0, 1]. The value 1 recovers the classical integral and
    derivative.

    Attributes:
        alpha: The order as a float.
    """

    __slots__ = ["alpha"]

    def __init__(self, alpha: float) -> None:
        alpha = float(alpha)
        if not 0.0 < alpha <= 1.0:
            raise ContractError("alpha must lie in (0,1]")
        self.alpha = alpha

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.alpha!r})"

    def __float__(self) -> float:
        return self.alpha

    def __hash__(self) -> int:
        return hash(self.alpha)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, FracOrder):
            return self.alpha == other.alpha
        elif isinstance(other, (int, float)):
            return self.alpha == other
        else:
            return False

    def complement(self) -> float:
        """Return 1 - alpha, which is 0 for the classical order."""
        return 1.0 - self.alpha


OrderLike = Union[FracOrder, float]


def as_order(alpha: OrderLike) -> FracOrder:
    if isinstance(alpha, FracOrder):
        return alpha
    return FracOrder(alpha)


def is_zero_order(alpha: OrderLike) -> bool:
    """Whether alpha denotes the identity operator of order zero."""
    return not isinstance(alpha, FracOrder) and float(alpha) == 0.0


class StateVec:
    """A truncated element of c0.

    The first N components are stored explicitly. Components beyond N are not
    stored; instead their absolute values are bounded by a declared envelope.

    Attributes:
        entries: Read-only array with the components u_1, ..., u_N.
        tail_env: Bound on |u_l| for all l > N.
        tail_vanishes: Whether sup_{l >= k} |u_l| tends to 0. Required for
            membership in c0.
    """

    __slots__ = ["entries", "tail_env", "tail_vanishes"]

    def __init__(
        self, entries: ArrayLike, tail_env: float = 0.0, tail_vanishes: bool = True
    ) -> None:
        self.entries = as_array(np.atleast_1d(entries), ndim=1)
        if tail_env < 0 or not np.isfinite(tail_env):
            raise ContractError("tail envelope must be finite and non-negative")
        self.tail_env = float(tail_env)
        self.tail_vanishes = bool(tail_vanishes)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.entries.tolist()!r}, "
            f"tail_env={self.tail_env!r}, tail_vanishes={self.tail_vanishes!r})"
        )

    def __hash__(self) -> int:
        return hash(repr(self))

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def zeros(cls, size: int) -> StateVec:
        return cls(np.zeros(size))

    @classmethod
    def basis(cls, index: int, size: int, coefficient: float = 1.0) -> StateVec:
        """The scaled unit vector coefficient * e_index (1-based index)."""
        if not 1 <= index <= size:
            raise ContractError(f"basis index {index} outside 1..{size}")
        entries = np.zeros(size)
        entries[index - 1] = coefficient
        return cls(entries)

    @property
    def in_c0(self) -> bool:
        return self.tail_vanishes

    def norm(self) -> float:
        """The sup-norm max(max_l |u_l|, tail_env)."""
        head = float(np.max(np.abs(self.entries))) if len(self.entries) else 0.0
        return max(head, self.tail_env)

    def padded(self, size: int) -> np.ndarray:
        """The explicit entries extended by zeros to the given length."""
        if size < len(self.entries):
            raise ContractError("cannot pad to a shorter length")
        return np.pad(self.entries, (0, size - len(self.entries)))

    def _coerce(self, other: Any) -> StateVec:
        if isinstance(other, StateVec):
            return other
        if isinstance(other, (int, float)) and other == 0:
            return StateVec.zeros(len(self))
        raise TypeError(f"cannot combine StateVec with {type(other).__name__}")

    def __add__(self, other: StateVec) -> StateVec:
        if not isinstance(other, (StateVec, int, float)):
            return NotImplemented
        other = self._coerce(other)
        size = max(len(self), len(other))
        return StateVec(
            self.padded(size) + other.padded(size),
            tail_env=self.tail_env + other.tail_env,
            tail_vanishes=self.tail_vanishes and other.tail_vanishes,
        )

    def __radd__(self, other: Any) -> StateVec:
        return self + other

    def __sub__(self, other: StateVec) -> StateVec:
        if not isinstance(other, StateVec):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> StateVec:
        return StateVec(-self.entries, self.tail_env, self.tail_vanishes)

    def __rmul__(self, other: float) -> StateVec:
        """Left-multiply the state by a real factor."""
        if isinstance(other, bool) or not isinstance(other, (int, float, np.floating)):
            return NotImplemented
        factor = float(other)
        return StateVec(factor * self.entries, abs(factor) * self.tail_env, self.tail_vanishes)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, StateVec):
            return False
        size = max(len(self), len(other))
        return (
            np.array_equal(self.padded(size), other.padded(size))
            and self.tail_env == other.tail_env
            and self.tail_vanishes == other.tail_vanishes
        )


StateLike = Union[StateVec, ArrayLike]


def as_state(value: StateLike) -> StateVec:
    if isinstance(value, StateVec):
        return value
    return StateVec(value)
