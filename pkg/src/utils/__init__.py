"""Utility functions and helpers."""
from .logger import LOG_LEVELS, setup_logging
from .validators import (
    parse_descriptor,
    validate_chart_descriptor,
    validate_shape_descriptor,
    validate_u0_descriptor,
)

__all__ = [
    'setup_logging',
    'LOG_LEVELS',
    'parse_descriptor',
    'validate_chart_descriptor',
    'validate_shape_descriptor',
    'validate_u0_descriptor',
]
