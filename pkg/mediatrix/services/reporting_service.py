"""Report rendering (CSV and JSON).

CSV layout:

    # mediatrix-report-v1
    # kind=<run|fuzz|locc-verify>
    <row columns>
    <rows...>
    # summary
    <key>,<value>

Floats are rendered with 17 significant digits and empty cells stand for
missing values, so identical inputs give byte-identical files.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel

from mediatrix.config import settings
from mediatrix.schemas.report import FuzzRow, LoccRow, Report, StepRow

logger = logging.getLogger(__name__)

ReportFormat = Literal["csv", "json"]

ROW_MODELS: dict[str, type[BaseModel]] = {
    "run": StepRow,
    "fuzz": FuzzRow,
    "locc-verify": LoccRow,
}


def format_value(value: Any) -> str:
    """Deterministic text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, list):
        return ";".join(format_value(item) for item in value)
    return str(value)


class ReportingService:
    """Serialize reports."""

    def render_csv(self, report: Report) -> str:
        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")
        output.write(f"{settings.report_header}\n")
        output.write(f"# kind={report.kind}\n")
        columns = list(ROW_MODELS[report.kind].model_fields)
        writer.writerow(columns)
        for row in report.rows:
            writer.writerow([format_value(getattr(row, column)) for column in columns])
        output.write("# summary\n")
        for name in type(report).model_fields:
            if name not in ("kind", "rows", "summary"):
                writer.writerow([name, format_value(getattr(report, name))])
        for name in type(report.summary).model_fields:
            writer.writerow([name, format_value(getattr(report.summary, name))])
        return output.getvalue()

    def render_json(self, report: BaseModel) -> str:
        return json.dumps(report.model_dump(mode="json"), indent=2) + "\n"

    def render(self, report: Report, fmt: ReportFormat | None = None) -> str:
        fmt = fmt or settings.report_format
        if fmt == "json":
            return self.render_json(report)
        return self.render_csv(report)

    def write(self, report: Report, path: str | Path, fmt: ReportFormat | None = None) -> Path:
        """Render and write a report, creating parent directories."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.render(report, fmt), encoding="utf-8")
        logger.info(f"Report written: {target} ({len(report.rows)} rows)")
        return target


reporting_service = ReportingService()
