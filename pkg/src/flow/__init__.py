"""Quasi-spherical scalar-flat extensions and the mass certificate."""
from .certificate import Theorem1Certificate, dirac_initial_data, theorem1_certificate
from .flow import FlowTrajectory, QSFlowState, QuasiSphericalFlow, run_flow
from .foliation import ExteriorFoliation
from .residual import derive_pde_residual

__all__ = [
    'Theorem1Certificate',
    'dirac_initial_data',
    'theorem1_certificate',
    'FlowTrajectory',
    'QSFlowState',
    'QuasiSphericalFlow',
    'run_flow',
    'ExteriorFoliation',
    'derive_pde_residual',
]
