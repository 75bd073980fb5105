"""Output services: artifacts, convergence tables and plots."""
from .artifacts import ArtifactWriter, config_digest, read_table
from .convergence import ConvergenceTable, build_convergence_table, emit_convergence_table
from .plots import line_plot

__all__ = [
    'ArtifactWriter',
    'config_digest',
    'read_table',
    'ConvergenceTable',
    'build_convergence_table',
    'emit_convergence_table',
    'line_plot',
]
