"""JSON and CSV renderings of criterion, classification and construction
results

JSON floats use the shortest round-trip representation and CSV cells use 17
significant digits, so both parse back to the same doubles. Reports carry no
timestamps, worker counts or other run-dependent data.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from os import PathLike
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence

from .criteria import CriterionReport
from .utils import format17

CSV_COLUMNS = (
    "family",
    "p",
    "criterion",
    "verdict",
    "value_log",
    "witness_params",
    "horizon",
)


def p_label(p: float) -> str | float:
    """p for reports; p = inf is the c_0 space"""
    return "c_0" if math.isinf(p) else p


def p_cell(p: float) -> str:
    return _cell(p_label(p))


def _pairs(mapping: Mapping[str, Any]) -> str:
    return ";".join(f"{key}={_cell(value)}" for key, value in mapping.items())


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format17(value)
    if value is None:
        return ""
    return str(value)


def criterion_row(family: str, p: float, report: CriterionReport) -> Dict[str, str]:
    return {
        "family": family,
        "p": p_cell(p),
        "criterion": report.criterion,
        "verdict": report.verdict.value,
        "value_log": format17(report.value_log),
        "witness_params": _pairs(report.witness),
        "horizon": _pairs(report.horizon),
    }


def summary_row(
    family: str,
    p: float,
    reports: Sequence[CriterionReport],
) -> Dict[str, str]:
    witnessed = [r.criterion for r in reports if r.witnessed]
    return {
        "family": family,
        "p": p_cell(p),
        "criterion": "summary",
        "verdict": f"{len(witnessed)}/{len(reports)} witnessed",
        "value_log": "",
        "witness_params": ";".join(witnessed),
        "horizon": "",
    }


def status_row(family: str, p: float, node: str, status: Any) -> Dict[str, str]:
    """A classification node; witness_params holds the justifying chain"""
    return {
        "family": family,
        "p": p_cell(p),
        "criterion": f"status:{node}",
        "verdict": status.status,
        "value_log": "",
        "witness_params": " > ".join(status.via or status.refuted_via),
        "horizon": "",
    }


def approximation_row(
    family: str,
    p: float,
    result: Any,
    j_max: int,
    m_max: int,
) -> Dict[str, str]:
    """A transition result, found or not"""
    found = bool(result.to_json()["found"])
    if found:
        value, params = result.residual_direct_log, f"j={result.j};m={result.m}"
    else:
        value = result.best_bound_log
        params = ";".join(
            f"{key}={val}" for key, val in zip(("j", "m"), result.best_params)
        )
    return {
        "family": family,
        "p": p_cell(p),
        "criterion": "approximate",
        "verdict": "found" if found else "not_found",
        "value_log": format17(value),
        "witness_params": params,
        "horizon": f"j_max={j_max};m_max={m_max}",
    }


def summary(reports: Sequence[CriterionReport]) -> Dict[str, Any]:
    return {
        "witnessed": [r.criterion for r in reports if r.witnessed],
        "undetermined": [r.criterion for r in reports if not r.witnessed],
    }


def dumps_json(data: Any) -> str:
    """Serialize a report; non-finite floats must already be strings"""
    return json.dumps(data, indent=2, allow_nan=False) + "\n"


def dumps_csv(
    rows: Iterable[Mapping[str, str]],
    columns: Sequence[str] = CSV_COLUMNS,
) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def analysis_rows(
    family: str,
    p: float,
    reports: Sequence[CriterionReport],
) -> List[Dict[str, str]]:
    rows = [criterion_row(family, p, report) for report in reports]
    rows.append(summary_row(family, p, reports))
    return rows


def write_output(text: str, out: str | PathLike | None) -> None:
    """Write to a file, or to stdout when `out` is None or "-"

    OSError propagates to the caller.
    """
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
