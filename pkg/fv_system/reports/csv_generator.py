# fv_system/reports/csv_generator.py
"""
CSV summaries of run reports.
Flat tables for spreadsheets and plotting tools.
"""
import io
import csv
import logging
from typing import Any, Dict, List, Tuple

logger = logging.getLogger(__name__)


class CSVGenerator:
    """Flattens report dictionaries built by ReportBuilder."""

    # Report type registry
    REPORTS = {
        "checks": {
            "name": "Check Summary",
            "description": "One row per check with its worst deviation"
        },
        "campaign": {
            "name": "Campaign Trials",
            "description": "One row per campaign trial and deviation"
        }
    }

    def generate(self, report: Dict[str, Any], report_type: str = "checks") -> str:
        """
        Generate a CSV table.

        Args:
            report: Report dictionary from ReportBuilder.build
            report_type: Key of REPORTS

        Returns:
            CSV text

        Raises:
            KeyError: If the report type is unknown
        """
        if report_type not in self.REPORTS:
            raise KeyError(f"Unknown CSV report type: {report_type}")

        generator = getattr(self, f"_generate_{report_type}")
        headers, rows = generator(report)

        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(headers)
        for row in rows:
            writer.writerow(row)
        logger.debug(f"CSV {report_type}: {len(rows)} rows")
        return output.getvalue()

    def generate_for(self, report: Dict[str, Any]) -> str:
        """Campaign table for campaign reports, check summary otherwise."""
        kind = "campaign" if report.get("experiment") == "campaign" else "checks"
        return self.generate(report, kind)

    def _generate_checks(self, report: Dict[str, Any]) -> Tuple[List[str], List[List[Any]]]:
        headers = ["check", "passed", "deviation", "value"]
        rows = []
        for check in report["checks"]:
            deviations = check["deviations"] or {"": ""}
            for key in sorted(deviations):
                rows.append([check["name"], check["passed"], key, deviations[key]])
        return headers, rows

    def _generate_campaign(self, report: Dict[str, Any]) -> Tuple[List[str], List[List[Any]]]:
        headers = ["check", "trial", "seed", "passed", "deviation", "value"]
        rows = []
        for check in report["checks"]:
            for trial in check["details"].get("per_trial", []):
                deviations = trial["deviations"] or {"": ""}
                for key in sorted(deviations):
                    rows.append([check["name"], trial["index"], trial["seed"], trial["passed"],
                                 key, deviations[key]])
        return headers, rows
