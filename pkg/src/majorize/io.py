"""Loading, saving, and deterministic serialization.

Experiments travel as JSON objects with a ``columns`` list (one probability
vector per column) and optional ``labels``, or as CSV with one matrix row per
line.  All JSON emitted here is canonical: keys sorted, floats printed with 17
significant digits, infinities as the strings "inf" and "-inf" (JSON has no
literal for them), NaN rejected.  Identical values therefore serialize to
identical bytes.
"""

from __future__ import annotations

import csv
import enum
import io as _io
import json
import math
import sys
from typing import Any

import numpy as np

from .catalysis import CatalystSearchResult
from .certify import CertReport, CheckRecord, GridSpec
from .errors import InvalidDataError
from .experiment import Experiment
from .feasibility import FeasibilityResult
from .power_universal import PowerUniversalReport
from .thermal import DiagonalState, ThermalSystem, ThermalVerdict


def format_float(x: float) -> str:
    """17-significant-digit decimal token; infinities by name, NaN refused."""
    if math.isnan(x):
        raise InvalidDataError("cannot serialize NaN")
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _emit(obj: Any, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            out.append(f'"{format_float(x)}"')
        else:
            out.append(format_float(x))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, enum.Enum):
        _emit(obj.value, out, indent)
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), out, indent)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad + "  ")
            _emit(item, out, indent + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        keys = sorted(obj)
        if any(not isinstance(k, str) for k in keys):
            raise InvalidDataError("JSON object keys must be strings")
        out.append("{\n")
        for i, k in enumerate(keys):
            out.append(pad + "  " + json.dumps(k, ensure_ascii=True) + ": ")
            _emit(obj[k], out, indent + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    else:
        raise InvalidDataError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    out: list[str] = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


# -- experiments ----------------------------------------------------------------


def experiment_to_dict(exp: Experiment) -> dict:
    return {
        "labels": list(exp.labels) if exp.labels is not None else None,
        "columns": [exp.matrix[:, k].tolist() for k in range(exp.n_cols)],
    }


def experiment_from_dict(data: dict) -> Experiment:
    if not isinstance(data, dict) or "columns" not in data:
        raise InvalidDataError('experiment JSON needs a "columns" list')
    columns = data["columns"]
    if not isinstance(columns, list) or not columns:
        raise InvalidDataError('"columns" must be a nonempty list of vectors')
    labels = data.get("labels")
    if labels is not None:
        labels = tuple(str(name) for name in labels)
    return Experiment(columns, labels=labels)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse_json(text: str, path: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidDataError(f"{path}: not valid JSON ({exc})") from exc


def load_experiment(path: str) -> Experiment:
    """Read an experiment from JSON (default) or CSV (by .csv extension).

    The path "-" reads JSON from stdin.  CSV files carry one outcome per row
    with a header line of column labels.
    """
    text = _read_text(path)
    if path.endswith(".csv"):
        return _experiment_from_csv(text, path)
    return experiment_from_dict(_parse_json(text, path))


def _experiment_from_csv(text: str, path: str) -> Experiment:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r]
    if len(rows) < 2:
        raise InvalidDataError(f"{path}: CSV needs a header and at least one row")
    labels = tuple(name.strip() for name in rows[0])
    try:
        matrix = np.array([[float(cell) for cell in row] for row in rows[1:]])
    except ValueError as exc:
        raise InvalidDataError(f"{path}: non-numeric CSV cell ({exc})") from exc
    if matrix.shape[1] != len(labels):
        raise InvalidDataError(f"{path}: ragged CSV rows")
    return Experiment.from_matrix(matrix, labels=labels)


def save_experiment(exp: Experiment, path: str) -> None:
    text = canonical_json(experiment_to_dict(exp))
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load_thermal(path: str) -> tuple[DiagonalState, DiagonalState, ThermalSystem]:
    """Read a thermal instance: {"energies", "beta", "rho", "sigma"}."""
    data = _parse_json(_read_text(path), path)
    if not isinstance(data, dict):
        raise InvalidDataError(f"{path}: thermal JSON must be an object")
    missing = {"energies", "beta", "rho", "sigma"} - set(data)
    if missing:
        raise InvalidDataError(f"{path}: missing keys {sorted(missing)}")
    sys_ = ThermalSystem(data["energies"], data["beta"])
    rho = DiagonalState(np.asarray(data["rho"], dtype=float))
    sigma = DiagonalState(np.asarray(data["sigma"], dtype=float))
    return rho, sigma, sys_


# -- report serializers -----------------------------------------------------------


def grid_to_dict(grid: GridSpec) -> dict:
    return {
        "simplex_resolution": grid.simplex_resolution,
        "alpha_max": grid.alpha_max,
        "include_infinity": grid.include_infinity,
        "tie_tol": grid.tie_tol,
    }


def check_to_dict(check: CheckRecord) -> dict:
    alpha = check.alpha
    if isinstance(alpha, tuple):
        alpha = list(alpha)
    return {
        "functional": check.functional,
        "alpha": alpha,
        "charset": list(check.charset) if check.charset is not None else None,
        "column": check.column,
        "value_p": check.value_p,
        "value_q": check.value_q,
        "margin": check.margin,
        "strict": check.strict,
        "direction": check.direction.value,
    }


def report_to_dict(report: CertReport) -> dict:
    return {
        "regime": report.regime.value,
        "verdict": report.verdict.value,
        "note": report.note,
        "grid": grid_to_dict(report.grid),
        "min_margin": report.min_margin(),
        "checks": [check_to_dict(c) for c in report.checks],
    }


def feasibility_to_dict(result: FeasibilityResult) -> dict:
    return {
        "feasible": result.feasible,
        "status": result.status,
        "max_residual": result.max_residual,
        "witness": result.witness.entries.tolist() if result.witness else None,
    }


def search_to_dict(result: CatalystSearchResult) -> dict:
    return {
        "kind": result.kind.value,
        "n_found": result.n_found,
        "checked_up_to": result.checked_up_to,
        "capped": result.capped,
        "note": result.note,
        "witness": result.witness.entries.tolist() if result.witness else None,
    }


def power_report_to_dict(report: PowerUniversalReport) -> dict:
    return {
        "is_power_universal": report.is_power_universal,
        "regime": report.regime.value,
        "witnesses": [
            {
                "column": w.column,
                "other": w.other,
                "row": w.row,
                "satisfied": w.satisfied,
            }
            for w in report.witnesses
        ],
    }


def thermal_to_dict(verdict: ThermalVerdict) -> dict:
    return {
        "answer": verdict.answer.value,
        "case": verdict.case.value,
        "shift": verdict.shift,
        "note": verdict.note,
        "report": report_to_dict(verdict.report) if verdict.report else None,
    }


# -- delimited tables --------------------------------------------------------------


def divergence_csv(rows: list[dict], fields: list[str]) -> str:
    """Render value rows as CSV with the canonical float tokens."""
    lines = [",".join(fields)]
    for row in rows:
        cells = []
        for f in fields:
            v = row[f]
            if isinstance(v, float):
                cells.append(format_float(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
