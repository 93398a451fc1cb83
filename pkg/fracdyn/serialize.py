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

"""Serialize certificates, reports and trajectories to JSON and CSV text.

Every float is written in its shortest round-trip form (`repr`), keys keep a
fixed order, so identical runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, List, Sequence

from .kamke import StabilityScan
from .mnc import AxiomReport
from .paths import SampledPath
from .plap import Certificate, StepRow, TruncationRow
from .utils import ContractError
from .volterra import SolveReport


def _number(value: float) -> Any:
    value = float(value)
    if math.isfinite(value):
        return value
    # JSON has no infinities; keep them readable.
    return repr(value)


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def _format_cell(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return repr(float(value))


def export_table_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with the given header; floats in shortest round-trip form."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ContractError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([_format_cell(value) for value in row])
    return buffer.getvalue()


def export_certificate_json(certificate: Certificate) -> str:
    data = certificate.as_dict()
    return _dumps({k: v if isinstance(v, str) else _number(v) for k, v in data.items()})


def export_trajectory_csv(solution: SampledPath) -> str:
    """The trajectory with header t,u_1,...,u_N, one row per node."""
    header = ["t"] + [f"u_{n}" for n in range(1, solution.dim + 1)]
    rows = (
        [t] + list(values) for t, values in zip(solution.nodes, solution.values)
    )
    return export_table_csv(header, rows)


def report_dict(report: SolveReport) -> dict:
    grid = report.solution.grid
    return {
        "iterations": report.iterations,
        "final_increment": _number(report.final_increment),
        "observed_ratio": _number(report.observed_ratio),
        "residual": _number(report.residual),
        "ball_escapes": report.ball_escapes,
        "max_deviation": _number(report.max_deviation),
        "grid": {"a": _number(grid.a), "h": _number(grid.h), "n_steps": grid.n_steps},
    }


def export_report_json(report: SolveReport, **extra: float) -> str:
    """The solve report without its trajectory, plus extra diagnostics."""
    data = report_dict(report)
    for key, value in extra.items():
        data[key] = _number(value)
    return _dumps(data)


def export_sweep_csv(truncation: Sequence[TruncationRow], step: StepRow) -> str:
    """One table holding the truncation rows followed by the step-size row."""
    rows: List[list] = [
        ["truncation", row.n_coarse, row.n_fine, row.difference] for row in truncation
    ]
    rows.append(["step", step.h_coarse, step.h_fine, step.difference])
    return export_table_csv(["study", "coarse", "fine", "difference"], rows)


def _axiom_report_dict(report: AxiomReport) -> dict:
    return {
        "measure": report.measure,
        "passed": report.passed,
        "axioms": [
            {
                "name": result.name,
                "checked": result.checked,
                "inconclusive": result.inconclusive,
                "passed": result.passed,
                "witness": result.witness,
            }
            for result in report.results.values()
        ],
    }


def export_mnc_json(
    reports: Sequence[AxiomReport], kernel: Sequence[tuple]
) -> str:
    """Axiom reports plus the kernel inequality rows (label, alpha, KernelCheck)."""
    rows = []
    for label, alpha, check in kernel:
        rows.append(
            {
                "profile": label,
                "alpha": _number(alpha),
                "lhs": _number(check.lhs),
                "rhs": _number(check.rhs),
                "holds": check.holds,
            }
        )
    return _dumps(
        {
            "measures": [_axiom_report_dict(report) for report in reports],
            "kernel_inequality": rows,
        }
    )


def export_kamke_json(
    alpha: float, lam: float, eps_list: Sequence[float], scan: StabilityScan
) -> str:
    return _dumps(
        {
            "alpha": _number(alpha),
            "lambda": _number(lam),
            "eps": [_number(eps) for eps in eps_list],
            "ratios": [_number(ratio) for ratio in scan.ratios],
            "A_hat": _number(scan.A_hat),
        }
    )
