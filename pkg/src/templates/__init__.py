"""Report template generators."""
from .report_html import ReportTemplate

__all__ = ['ReportTemplate']