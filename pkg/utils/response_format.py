"""
Standardized report and error formatting
"""
import csv
import io
import json
import math
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from app_env_config import TOOL_NAME, TOOL_VERSION
from schemas.report import ExperimentConfig, OutputFormat, RunReport
from utils import constants


def create_response(
    data: Optional[Dict[str, Any]] = None,
    error: Optional[str] = None,
    status: str = "success",
    metadata: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    Create a standardized response payload

    Args:
        data: The main payload
        error: Error message if any
        status: success, validation_error, computation_error, io_error
        metadata: Additional metadata (exit code, tool version, ...)

    Returns:
        Response dictionary without None values
    """
    response = {
        "status": status,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "data": data or {},
        "error": error,
        "metadata": {"tool": TOOL_NAME, "version": TOOL_VERSION, **(metadata or {})}
    }
    return {k: v for k, v in response.items() if v is not None}


def _cell(value: Any) -> Any:
    """JSON-safe scalar: numpy scalars unwrapped, non-finite floats become None"""
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _csv_cell(value: Any) -> str:
    value = _cell(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # shortest repr that round-trips
        return repr(value)
    return str(value)


def format_results_table(columns: List[str], rows: List[Dict[str, Any]], output_format: OutputFormat) -> str:
    """Results table as CSV (header row first) or JSON lines, columns in order"""
    if OutputFormat(output_format) is OutputFormat.CSV:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(c)) for c in columns])
        return buffer.getvalue()

    lines = [json.dumps({c: _cell(row.get(c)) for c in columns}, allow_nan=False) for row in rows]
    return "".join(line + "\n" for line in lines)


def create_run_report(
    config: ExperimentConfig,
    columns: List[str],
    rows: List[Dict[str, Any]],
    summary: Dict[str, Any],
    processing_time: float,
) -> RunReport:
    """Wrap a results table with the provenance needed to reproduce it"""
    return RunReport(
        tool=TOOL_NAME,
        version=TOOL_VERSION,
        constants_version=constants.table_version(),
        constants_sha256=constants.table_hash(),
        config=config.echo(),
        columns=columns,
        rows=rows,
        summary={k: _json_safe(v) for k, v in summary.items()},
        processing_time_seconds=round(max(processing_time, 0.0), 3),
    )


def _json_safe(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return _cell(value)


def format_report_metadata(report: RunReport, results_path: str) -> str:
    """Reproducibility block written next to the results table"""
    meta = report.model_dump(mode="json", exclude={"rows"})
    meta["results_path"] = results_path
    meta["row_count"] = len(report.rows)
    return json.dumps(meta, indent=2, sort_keys=True, allow_nan=False) + "\n"


def format_error_response(
    error_message: str,
    exit_code: int,
    error_type: str = "error",
    issues: Optional[List[str]] = None
) -> Dict[str, Any]:
    """Format error payload in standardized format"""

    return create_response(
        data={"issues": issues} if issues else None,
        error=error_message,
        status=error_type,
        metadata={
            "exit_code": exit_code
        }
    )
