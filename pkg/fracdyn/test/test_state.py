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

import numpy as np
import pytest

from fracdyn.state import FracOrder, StateVec, as_order, as_state, is_zero_order
from fracdyn.utils import ContractError


def test_order():
    alpha = FracOrder(0.5)
    assert eval(repr(alpha)) == alpha
    assert float(alpha) == 0.5
    assert alpha.complement() == 0.5
    assert FracOrder(1.0).complement() == 0.0
    assert alpha == 0.5
    assert alpha != FracOrder(0.25)
    assert hash(alpha) == hash(FracOrder(0.5))
    assert as_order(0.75) == FracOrder(0.75)
    assert as_order(alpha) is alpha

    for bad in (0.0, -0.1, 1.5, float("nan")):
        with pytest.raises(ValueError, match=r"alpha must lie in \(0,1\]"):
            FracOrder(bad)


def test_zero_order():
    assert is_zero_order(0.0)
    assert is_zero_order(0)
    assert not is_zero_order(0.5)
    assert not is_zero_order(FracOrder(0.5))


def test_state_constructors():
    x = StateVec([1.0, -2.0, 0.5])
    assert len(x) == 3
    assert eval(repr(x)) == x
    assert x.in_c0
    assert x.norm() == 2.0
    assert StateVec([0.5], tail_env=3.0).norm() == 3.0
    assert StateVec.zeros(4).norm() == 0.0
    assert StateVec.basis(2, 3, 5.0) == StateVec([0.0, 5.0, 0.0])
    assert as_state([1.0]) == StateVec([1.0])

    with pytest.raises(ValueError):
        StateVec([1.0, float("inf")])
    with pytest.raises(ValueError):
        StateVec([1.0], tail_env=-1.0)
    with pytest.raises(ValueError):
        StateVec.basis(0, 3)
    with pytest.raises(ValueError):
        x.padded(2)

    assert not StateVec([1.0], tail_env=1.0, tail_vanishes=False).in_c0
    with pytest.raises(ValueError):
        x.entries[0] = 3.0


def test_state_arithmetic():
    x = StateVec([1.0, 2.0])
    y = StateVec([0.5, -1.0, 3.0], tail_env=0.25)

    # Shorter states are padded with zeros
    assert x + y == StateVec([1.5, 1.0, 3.0], tail_env=0.25)
    assert x - x == StateVec.zeros(2)
    assert StateVec([1.0]) == StateVec([1.0, 0.0])
    assert -y == StateVec([-0.5, 1.0, -3.0], tail_env=0.25)
    assert -2 * y == StateVec([-1.0, 2.0, -6.0], tail_env=0.5)
    assert sum([x, x, x]) == 3 * x
    assert hash(x) == hash(StateVec([1.0, 2.0]))

    with pytest.raises(TypeError):
        x * 2
    with pytest.raises(TypeError):
        x + 1.0


def test_state_is_read_only_copy():
    data = np.array([1.0, 2.0])
    x = StateVec(data)
    data[0] = 7.0
    assert x.entries[0] == 1.0
