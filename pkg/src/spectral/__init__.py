"""Dirac spectra of conformal metrics on the 2-sphere."""
from .basis import RoundEigenBasis, build_round_basis
from .metric import ConformalSphereMetric
from .solver import (
    DiracSpectrumResult,
    assemble_multiplication_matrix,
    axisymmetric_mode_spectrum,
    conformal_dirac_spectrum,
)

__all__ = [
    'RoundEigenBasis',
    'build_round_basis',
    'ConformalSphereMetric',
    'DiracSpectrumResult',
    'assemble_multiplication_matrix',
    'axisymmetric_mode_spectrum',
    'conformal_dirac_spectrum',
]
