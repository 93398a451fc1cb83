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

"""Command line front end.

    fracdyn <certify|solve|sweep|mnc|kamke|selftest> --config <path> [--out <dir>]

Exit status is 0 on success, 1 on a violated contract or invalid configuration
and 2 when an iteration does not converge. Files written by a failed command
are removed.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from . import battery, mnc, plap, serialize
from .config import COMMANDS, RunConfig, parse_config
from .kamke import stability_scan
from .paths import TimeGrid
from .utils import CertificationError, ContractError, ConvergenceError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_CONVERGENCE = 2


def _solve_grid(config: RunConfig, problem: plap.PLapProblem) -> TimeGrid:
    """The grid [0, min(T, delta)] with step h, or [0, T] without a certificate."""
    try:
        horizon = min(problem.T, plap.certify(problem).delta)
    except CertificationError as err:
        logger.warning("no certified interval (%s); solving on [0, %g]", err, problem.T)
        horizon = problem.T
    if config.h > horizon:
        raise ContractError(f"step h={config.h:g} exceeds the solve interval {horizon:.6g}")
    return TimeGrid.with_step(0.0, horizon, config.h)


def _certify(config: RunConfig) -> Dict[str, str]:
    certificate = plap.certify(config.problem())
    return {"certificate.json": serialize.export_certificate_json(certificate)}


def _solve(config: RunConfig) -> Dict[str, str]:
    problem = config.problem()
    grid = _solve_grid(config, problem)
    report = plap.solve_semidiscrete(problem, grid, config.tol, config.max_iter)
    return {
        "trajectory.csv": serialize.export_trajectory_csv(report.solution),
        "report.json": serialize.export_report_json(
            report, mass_balance=plap.mass_balance(problem, report)
        ),
    }


def _sweep(config: RunConfig) -> Dict[str, str]:
    problem = config.problem()
    grid = _solve_grid(config, problem)
    rows = plap.truncation_study(problem, config.N_list, grid, config.tol, config.max_iter)
    step = plap.step_study(problem, grid, config.tol, config.max_iter)
    return {"sweep.csv": serialize.export_sweep_csv(rows, step)}


def _mnc(config: RunConfig) -> Dict[str, str]:
    del config
    families = mnc.stock_families()
    reports = [
        mnc.axiom_suite(mnc.hausdorff_c0, families),
        mnc.axiom_suite(mnc.sup_norm_measure, families),
    ]
    kernel = [
        (label, alpha, mnc.kernel_integral_check(family, alpha, 1.0))
        for label, family, alpha in mnc.stock_kernel_cases()
    ]
    return {"mnc_report.json": serialize.export_mnc_json(reports, kernel)}


def _kamke(config: RunConfig) -> Dict[str, str]:
    settings = config.kamke
    spec = settings.spec(config.alpha)
    grid = TimeGrid.with_step(settings.a, settings.b, config.h)
    scan = stability_scan(spec, settings.eps_list, grid, config.tol, config.max_iter)
    text = serialize.export_kamke_json(
        config.alpha.alpha, settings.lam, settings.eps_list, scan
    )
    return {"kamke.json": text}


_HANDLERS = {
    "certify": _certify,
    "solve": _solve,
    "sweep": _sweep,
    "mnc": _mnc,
    "kamke": _kamke,
}


def selftest() -> int:
    """Run the acceptance battery and print one PASS/FAIL line per check."""
    results = battery.run_battery()
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    return EXIT_OK if all(result.passed for result in results) else EXIT_CONTRACT


def _write(out: str, artifacts: Dict[str, str]) -> List[str]:
    os.makedirs(out, exist_ok=True)
    written = []
    try:
        for name, text in artifacts.items():
            path = os.path.join(out, name)
            written.append(path)
            with open(path, "w", newline="") as handle:
                handle.write(text)
    except OSError:
        _remove(written)
        raise
    return written


def _remove(paths: List[str]) -> None:
    for path in paths:
        if os.path.exists(path):
            os.remove(path)


def run(config: RunConfig) -> int:
    """Execute a validated configuration and return the exit status."""
    if config.command == "selftest":
        return selftest()
    logger.info("running %s, output to %s", config.command, config.out)
    try:
        artifacts = _HANDLERS[config.command](config)
        written = _write(config.out, artifacts)
    except ConvergenceError as err:
        print(f"fracdyn {config.command}: no convergence: {err}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ContractError, ValueError, OSError) as err:
        print(f"fracdyn {config.command}: {err}", file=sys.stderr)
        return EXIT_CONTRACT
    for path in written:
        logger.info("wrote %s", path)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdyn", description="Fractional initial value problems and their certificates."
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output directory, overrides the config")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        format="[%(levelname)s] %(name)s: %(message)s",
        level=logging.INFO if args.verbose else logging.WARNING,
    )
    if args.command == "selftest" and args.config is None:
        return selftest()
    if args.config is None:
        print(f"fracdyn {args.command}: --config is required", file=sys.stderr)
        return EXIT_CONTRACT
    try:
        with open(args.config) as handle:
            source = handle.read()
        config = parse_config(source, out=args.out, command=args.command)
    except OSError as err:
        print(f"fracdyn {args.command}: cannot read config: {err}", file=sys.stderr)
        return EXIT_CONTRACT
    except ContractError as err:
        print(f"fracdyn {args.command}: {err}", file=sys.stderr)
        return EXIT_CONTRACT
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
