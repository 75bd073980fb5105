"""
HTML check-record summaries rendered with Jinja2.
"""
from collections import Counter
from typing import Any, Dict, Optional, Sequence
from jinja2 import Environment, FileSystemLoader, select_autoescape
import os

from src.harness.records import EQUALITY, HOLDS, INCONCLUSIVE, NOT_APPLICABLE, VIOLATED, CheckRecord

VERDICT_ORDER = (VIOLATED, INCONCLUSIVE, HOLDS, EQUALITY, NOT_APPLICABLE)


class ReportTemplate:
    """HTML report template generator using Jinja2."""

    @staticmethod
    def generate_report(
        data: Dict[str, Any],
        template_name: str = "check_report.html"
    ) -> str:
        """
        Render the HTML report from the template and data.

        Args:
            data: Template variables (title, version, config_hash, counts, records, ...)
            template_name: Name of the HTML template file
        Returns:
            Rendered HTML report as a string
        """
        template_dir = os.path.dirname(os.path.abspath(__file__))
        env = Environment(
            loader=FileSystemLoader(template_dir),
            autoescape=select_autoescape(['html']),
        )
        env.filters['number'] = format_number
        template = env.get_template(template_name)
        return template.render(**data)

    @staticmethod
    def summary_data(
        records: Sequence[CheckRecord],
        title: str,
        version: str,
        config_hash: str,
        parameters: Optional[Dict[str, Any]] = None,
    ) -> Dict[str, Any]:
        """Template variables for a list of records; violated records are listed first."""
        counts = Counter(record.verdict for record in records)
        ordered = sorted(records, key=lambda r: VERDICT_ORDER.index(r.verdict))
        return {
            'title': title,
            'version': version,
            'config_hash': config_hash,
            'parameters': dict(sorted((parameters or {}).items())),
            'counts': [(verdict, counts.get(verdict, 0)) for verdict in VERDICT_ORDER],
            'total': len(records),
            'records': [record.to_dict() for record in ordered],
        }


def format_number(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)
