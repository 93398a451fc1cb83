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

"""JSON run configurations for the command line front end.

A configuration is a flat JSON object. Problem data r, F, phi and psi are
strings in the expression grammar of `fracdyn.expr`. The `kamke` command reads
an optional nested object:

    {"command": "kamke", "alpha": 0.5,
     "kamke": {"H": 1, "lambda": 2, "eps_list": [1e-2, 1e-3], "a": 0, "b": 0.1}}
"""
from __future__ import annotations

import dataclasses
import json
from typing import Any, Dict, Optional, Tuple

from .expr import Expr, parse_expression
from .kamke import KamkeSpec
from .plap import PLapProblem
from .state import FracOrder
from .utils import ContractError

COMMANDS = ("certify", "solve", "sweep", "mnc", "kamke", "selftest")
_PROBLEM_COMMANDS = ("certify", "solve", "sweep")


class ConfigError(ContractError):
    """A configuration value is missing or invalid.

    Attributes:
        field: Dotted path of the offending field.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclasses.dataclass(frozen=True)
class KamkeConfig:
    H: float = 1.0
    lam: float = 1.0
    eps_list: Tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5)
    a: float = 0.0
    b: float = 1.0

    def spec(self, alpha: FracOrder) -> KamkeSpec:
        return KamkeSpec(alpha, self.lam, self.a, self.b, self.H)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """A validated run configuration.

    Attributes:
        command: One of COMMANDS.
        alpha: Order of the problem, absent for `mnc` and `selftest`.
        p, T, N, beta, r, F, phi, psi: Data of the p-Laplacian problem.
        h: Time step.
        tol: Picard tolerance.
        max_iter: Picard iteration limit.
        out: Output directory.
        N_list: Truncation lengths of the `sweep` command.
        kamke: Settings of the `kamke` command.
    """

    command: str
    alpha: Optional[FracOrder] = None
    p: float = 2.0
    T: float = 1.0
    N: int = 0
    beta: float = 1.0
    r: Expr = parse_expression("1")
    F: Expr = parse_expression("0")
    phi: Expr = parse_expression("0")
    psi: Expr = parse_expression("0")
    h: float = 1e-3
    tol: float = 1e-8
    max_iter: int = 200
    out: str = "."
    N_list: Tuple[int, ...] = ()
    kamke: KamkeConfig = KamkeConfig()

    def problem(self) -> PLapProblem:
        return PLapProblem(
            p=self.p,
            alpha=self.alpha,
            T=self.T,
            N=self.N,
            r=self.r,
            F=self.F,
            phi=self.phi,
            psi=self.psi,
            beta=self.beta,
        )


def _number(data: Dict[str, Any], key: str, path: str, default: Any = None) -> float:
    value = data.get(key, default)
    if value is None:
        raise ConfigError(path, "missing required field")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _integer(data: Dict[str, Any], key: str, path: str, default: Any = None) -> int:
    value = _number(data, key, path, default)
    if value != int(value):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return int(value)


def _expression(data: Dict[str, Any], key: str, default: Optional[str] = None) -> Expr:
    source = data.get(key, default)
    if source is None:
        raise ConfigError(key, "missing required field")
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        source = repr(float(source))
    if not isinstance(source, str):
        raise ConfigError(key, f"expected an expression string, got {source!r}")
    try:
        return parse_expression(source)
    except ContractError as err:
        raise ConfigError(key, str(err)) from err


def _kamke(data: Any) -> KamkeConfig:
    if data is None:
        return KamkeConfig()
    if not isinstance(data, dict):
        raise ConfigError("kamke", "expected an object")
    unknown = set(data) - {"H", "lambda", "eps_list", "a", "b"}
    if unknown:
        raise ConfigError(f"kamke.{sorted(unknown)[0]}", "unknown field")
    defaults = KamkeConfig()
    lam = _number(data, "lambda", "kamke.lambda", defaults.lam)
    if not lam >= 1:
        raise ConfigError("kamke.lambda", "lambda must be >= 1")
    H = _number(data, "H", "kamke.H", defaults.H)
    if not H >= 0:
        raise ConfigError("kamke.H", "H must be non-negative")
    eps_list = data.get("eps_list", list(defaults.eps_list))
    if not isinstance(eps_list, list) or not eps_list:
        raise ConfigError("kamke.eps_list", "expected a non-empty list of numbers")
    eps = tuple(
        _number({"eps": value}, "eps", f"kamke.eps_list[{i}]") for i, value in enumerate(eps_list)
    )
    if any(not value > 0 for value in eps):
        raise ConfigError("kamke.eps_list", "eps values must be positive")
    a = _number(data, "a", "kamke.a", defaults.a)
    b = _number(data, "b", "kamke.b", defaults.b)
    if not b > a:
        raise ConfigError("kamke.b", "b must exceed a")
    return KamkeConfig(H, lam, eps, a, b)


_FIELDS = {
    "command", "alpha", "p", "T", "N", "beta", "r", "F", "phi", "psi",
    "h", "tol", "max_iter", "out", "N_list", "kamke",
}


def parse_config(
    source: str, out: Optional[str] = None, command: Optional[str] = None
) -> RunConfig:
    """Parse and validate a JSON configuration.

    Args:
        source: The JSON text.
        out: Output directory overriding the `out` field.
        command: Command given on the command line. The `command` field may
            then be omitted but must agree when present.

    Raises:
        ConfigError: Naming the offending field.
    """
    try:
        data = json.loads(source)
    except json.JSONDecodeError as err:
        raise ConfigError("<root>", f"invalid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")

    if command is not None:
        if data.get("command", command) != command:
            raise ConfigError(
                "command", f"config is for {data['command']!r}, not {command!r}"
            )
    else:
        command = data.get("command")
    if command not in COMMANDS:
        raise ConfigError("command", f"expected one of {', '.join(COMMANDS)}, got {command!r}")
    needs_problem = command in _PROBLEM_COMMANDS

    alpha = None
    if needs_problem or command == "kamke" or "alpha" in data:
        value = _number(data, "alpha", "alpha")
        try:
            alpha = FracOrder(value)
        except ContractError as err:
            raise ConfigError("alpha", str(err)) from err

    p = _number(data, "p", "p", None if needs_problem else 2.0)
    if not p >= 2:
        raise ConfigError("p", "p must be >= 2")
    T = _number(data, "T", "T", None if needs_problem else 1.0)
    if not T > 0:
        raise ConfigError("T", "T must be positive")
    N = _integer(data, "N", "N", None if needs_problem else 0)
    if needs_problem and N < 2:
        raise ConfigError("N", "N must be >= 2")
    beta = _number(data, "beta", "beta", 1.0)
    if not beta > 0:
        raise ConfigError("beta", "beta must be positive")
    h = _number(data, "h", "h", 1e-3)
    if not h > 0:
        raise ConfigError("h", "h must be positive")
    tol = _number(data, "tol", "tol", 1e-8)
    if not tol > 0:
        raise ConfigError("tol", "tol must be positive")
    max_iter = _integer(data, "max_iter", "max_iter", 200)
    if max_iter < 1:
        raise ConfigError("max_iter", "max_iter must be at least 1")

    N_list = data.get("N_list", [N, 2 * N, 4 * N] if needs_problem else [])
    if not isinstance(N_list, list):
        raise ConfigError("N_list", "expected a list of integers")
    N_list = tuple(
        _integer({"N": value}, "N", f"N_list[{i}]") for i, value in enumerate(N_list)
    )
    if any(n < 2 for n in N_list):
        raise ConfigError("N_list", "every N must be >= 2")
    if any(b < a for a, b in zip(N_list, N_list[1:])):
        raise ConfigError("N_list", "N_list must be non-decreasing")

    output = out if out is not None else data.get("out", ".")
    if not isinstance(output, str):
        raise ConfigError("out", "expected a path")

    config = RunConfig(
        command=command,
        alpha=alpha,
        p=p,
        T=T,
        N=N,
        beta=beta,
        r=_expression(data, "r", "1"),
        F=_expression(data, "F", "0"),
        phi=_expression(data, "phi", None if needs_problem else "0"),
        psi=_expression(data, "psi", "0"),
        h=h,
        tol=tol,
        max_iter=max_iter,
        out=output,
        N_list=N_list,
        kamke=_kamke(data.get("kamke")),
    )
    if needs_problem:
        try:
            config.problem()
        except ContractError as err:
            raise ConfigError("<problem>", str(err)) from err
    return config
