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

from fracdyn.expr import (
    Binary,
    Call,
    Limit,
    Num,
    Unary,
    Var,
    as_expression,
    parse_expression,
    vanishes_at_infinity,
)


def test_evaluate():
    assert parse_expression("2*t + exp(-x)")(1.0, 0.0) == 3.0
    assert parse_expression("sin(0)")() == 0.0
    assert parse_expression("abs(-3) - cos(0)")() == 2.0
    assert parse_expression("1.5e2 / 3")() == 50.0
    values = parse_expression("t * x")(np.array([1.0, 2.0])[:, None], np.array([3.0, 4.0, 5.0]))
    assert values.shape == (2, 3)
    np.testing.assert_array_equal(values[1], [6.0, 8.0, 10.0])
    # Constants broadcast to the shape of the arguments
    np.testing.assert_array_equal(parse_expression("7")(np.zeros(4)), np.full(4, 7.0))


def test_precedence():
    assert parse_expression("2^3^2")() == 512.0
    assert parse_expression("-2^2")() == -4.0
    assert parse_expression("2^-1")() == 0.5
    assert parse_expression("1 - 2 - 3")() == -4.0
    assert parse_expression("8 / 4 / 2")() == 1.0
    assert parse_expression("1 + 2 * 3")() == 7.0
    assert parse_expression("(1 + 2) * 3")() == 9.0
    assert parse_expression("--t")(2.0) == 2.0
    assert parse_expression("2*t + exp(-x)") == Binary(
        "+", Binary("*", Num(2.0), Var("t")), Call("exp", Unary(Var("x")))
    )


def test_syntax_errors():
    with pytest.raises(ValueError, match="at offset 3") as info:
        parse_expression("t +")
    assert info.value.offset == 3
    with pytest.raises(ValueError, match="unknown identifier 'y'"):
        parse_expression("2 * y")
    with pytest.raises(ValueError, match="offset 4"):
        parse_expression("(t +)")
    with pytest.raises(ValueError, match=r"expected '\)'"):
        parse_expression("sin(t")
    with pytest.raises(ValueError, match="unexpected character"):
        parse_expression("t $ 2")
    with pytest.raises(ValueError, match="unexpected token"):
        parse_expression("t 2")
    with pytest.raises(ValueError):
        parse_expression("")
    with pytest.raises(ValueError):
        parse_expression("exp")


def test_evaluation_errors():
    with pytest.raises(ValueError, match="division by zero"):
        parse_expression("1 / x")(0.0, np.array([1.0, 0.0]))
    with pytest.raises(ValueError, match="negative power"):
        parse_expression("x ^ -1")(0.0, 0.0)
    with pytest.raises(ValueError, match="fractional exponent"):
        parse_expression("x ^ 0.5")(0.0, -1.0)
    with pytest.raises(ValueError, match="not finite"):
        parse_expression("exp(x)")(0.0, 1000.0)
    assert parse_expression("x ^ 2")(0.0, -3.0) == 9.0


def test_print_round_trip():
    t = np.linspace(0.0, 2.0, 10)[:, None]
    x = np.linspace(0.5, 10.0, 10)[None, :]
    for source in (
        "2*t + exp(-x)",
        "-x^2 / (1 + t) - 3",
        "abs(sin(3*t)) * exp(-0.6931471805599453*x) + 1e-3",
        "cos(t)^2 - 2^(-x)",
        "0.1 * (x - t) ^ 3",
    ):
        e = parse_expression(source)
        again = parse_expression(str(e))
        assert again == e
        np.testing.assert_array_equal(again(t, x), e(t, x))


def test_bounds():
    e = parse_expression("2*t + exp(-x)")
    lo, hi = e.bounds((0.0, 1.0), (0.0, 1.0))
    assert lo <= math.exp(-1.0) and hi >= 3.0
    assert hi == pytest.approx(3.0)
    assert lo == pytest.approx(math.exp(-1.0))

    lo, hi = parse_expression("sin(t) * exp(-x)").bounds((0.0, 1.0), (2.0, math.inf))
    assert lo <= 0.0 <= hi
    assert hi == pytest.approx(math.exp(-2.0) * math.sin(1.0))

    assert parse_expression("cos(x)").bounds((0.0, 0.0), (0.0, math.inf)) == (-1.0, 1.0)
    assert parse_expression("x").sup_abs((0.0, 0.0), (1.0, math.inf)) == math.inf
    assert parse_expression("-abs(t - 2)").sup_abs((0.0, 1.0), (0.0, 0.0)) == pytest.approx(2.0)

    with pytest.raises(ValueError):
        parse_expression("x ^ 0.5").bounds((0.0, 0.0), (-1.0, 1.0))


def test_limits():
    decaying = (
        "exp(-0.6931471805599453*x)",
        "exp(-x) * sin(t)",
        "1 / x",
        "2^(-x)",
        "(1 + x)^(-2)",
        "-3 * exp(-x)",
        "exp(-x) + x^-1",
        "0",
    )
    for source in decaying:
        assert vanishes_at_infinity(parse_expression(source)), source
    others = {
        "1": Limit.BOUNDED,
        "sin(x)": Limit.BOUNDED,
        "x": Limit.POS_INF,
        "-x": Limit.NEG_INF,
        "x - x": Limit.UNKNOWN,
        "x * sin(x)": Limit.UNKNOWN,
        "exp(x)": Limit.POS_INF,
        "t + exp(-x)": Limit.BOUNDED,
    }
    for source, kind in others.items():
        assert parse_expression(source).limit() == kind, source


def test_as_expression():
    assert as_expression(2) == Num(2.0)
    assert as_expression("t") == Var("t")
    e = parse_expression("x")
    assert as_expression(e) is e
    assert not e.depends_on("t")
    assert parse_expression("sin(t) * x").depends_on("t")
    with pytest.raises(ValueError):
        Num(math.inf)
