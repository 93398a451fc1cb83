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

from typing import Optional, Sequence, Union

import numpy as np


ArrayLike = Union[np.ndarray, Sequence[float], float]


class ContractError(ValueError):
    """A precondition or invariant of an operation was violated."""


class CertificationError(ContractError):
    """The certifier cannot vouch for the supplied problem data."""


class ConvergenceError(RuntimeError):
    """Picard iteration did not reach the requested tolerance.

    Attributes:
        iterations: Number of iterations performed.
        last_increment: Sup-norm of the last Picard update.
    """

    def __init__(self, message: str, iterations: int, last_increment: float) -> None:
        super().__init__(message)
        self.iterations = iterations
        self.last_increment = last_increment


def as_array(data: ArrayLike, ndim: Optional[int] = None) -> np.ndarray:
    """Convert a sequence of reals into a read-only float array.

    Args:
        data: A scalar, a sequence of reals or a NumPy array.
        ndim: If given, the number of dimensions the result must have.

    Returns:
        A read-only float64 copy of the data.

    """
    array = np.array(data, dtype=float)
    if ndim is not None and array.ndim != ndim:
        raise ContractError(f"expected {ndim}-dimensional data, got {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise ContractError("data must be finite")
    array.setflags(write=False)
    return array
