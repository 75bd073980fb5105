"""
Configuration settings for the Dirac eigenvalue laboratory.
"""
import os
from dataclasses import dataclass


@dataclass
class Config:
    """Process-wide numerical and output defaults."""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Output settings
    OUTPUT_DIR: str = "results"
    OUTPUT_FORMAT: str = "json"

    # Spectral solver settings
    DEFAULT_TRUNCATION: int = 16
    MAX_TRUNCATION: int = 96
    TRUNCATION_STEP: int = 8
    QUADRATURE_PADDING: int = 16
    CONVERGENCE_TOL: float = 1e-7

    # Harness tolerances
    EQUALITY_TOL: float = 1e-6
    FIT_TOL: float = 1e-3

    # Execution
    THREADS: int = 1
    SEED: int = 12345

    @classmethod
    def from_env(cls) -> 'Config':
        """Create config from environment variables."""
        return cls(
            LOG_LEVEL=os.environ.get('LOG_LEVEL', 'INFO'),
            OUTPUT_DIR=os.environ.get('OUTPUT_DIR', 'results'),
            OUTPUT_FORMAT=os.environ.get('OUTPUT_FORMAT', 'json'),
            DEFAULT_TRUNCATION=int(os.environ.get('DEFAULT_TRUNCATION', 16)),
            MAX_TRUNCATION=int(os.environ.get('MAX_TRUNCATION', 96)),
            TRUNCATION_STEP=int(os.environ.get('TRUNCATION_STEP', 8)),
            QUADRATURE_PADDING=int(os.environ.get('QUADRATURE_PADDING', 16)),
            CONVERGENCE_TOL=float(os.environ.get('CONVERGENCE_TOL', 1e-7)),
            EQUALITY_TOL=float(os.environ.get('EQUALITY_TOL', 1e-6)),
            FIT_TOL=float(os.environ.get('FIT_TOL', 1e-3)),
            THREADS=int(os.environ.get('THREADS', 1)),
            SEED=int(os.environ.get('SEED', 12345)),
        )

    def validate(self) -> list[str]:
        """Validate configuration and return list of errors."""
        errors = []

        if self.OUTPUT_FORMAT not in ('csv', 'json'):
            errors.append("OUTPUT_FORMAT must be 'csv' or 'json'")
        if self.DEFAULT_TRUNCATION < 1:
            errors.append("DEFAULT_TRUNCATION must be at least 1")
        if self.MAX_TRUNCATION < self.DEFAULT_TRUNCATION:
            errors.append("MAX_TRUNCATION must not be below DEFAULT_TRUNCATION")
        if self.TRUNCATION_STEP < 1:
            errors.append("TRUNCATION_STEP must be at least 1")
        if self.QUADRATURE_PADDING < 0:
            errors.append("QUADRATURE_PADDING must be nonnegative")
        if not 0 < self.CONVERGENCE_TOL < 1:
            errors.append("CONVERGENCE_TOL must lie in (0, 1)")
        if self.EQUALITY_TOL <= 0:
            errors.append("EQUALITY_TOL must be positive")
        if self.FIT_TOL <= 0:
            errors.append("FIT_TOL must be positive")
        if self.THREADS < 1:
            errors.append("THREADS must be at least 1")

        return errors


# Global config instance
config = Config.from_env()
