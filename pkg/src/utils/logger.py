"""
Logging setup for command-line runs.
"""
import logging
import sys
from typing import Optional, TextIO

from src.utils.errors import ConfigurationError

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')

# Libraries that log at INFO on every figure or font lookup.
QUIET_LOGGERS = ('matplotlib', 'PIL')


def setup_logging(level: str = "INFO", stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Configure the root logger for one run.

    Records go to stderr so that the artifacts and stdout stay free of log text.

    Args:
        level: One of DEBUG, INFO, WARNING, ERROR (case-insensitive)
        stream: Destination stream, stderr by default

    Returns:
        The root logger

    Raises:
        ConfigurationError: unknown level name
    """
    name = str(level).strip().upper()
    if name not in LOG_LEVELS:
        raise ConfigurationError(f"Unknown log level '{level}' (expected one of: {', '.join(LOG_LEVELS)})")

    formatter = logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, name))
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(formatter)
    root_logger.addHandler(handler)

    for noisy in QUIET_LOGGERS:
        logging.getLogger(noisy).setLevel(max(logging.WARNING, root_logger.level))

    return root_logger
