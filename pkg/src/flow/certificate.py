"""
Certificate tying the Dirac eigenvalue bound to the quasi-spherical mass.

With u0 = H0 / (2 lambda1) the monotone quantity starts at
Q(0) = int H0 - 2 lambda1 |Sigma| and decreases to 8 pi m >= 0, which is the
upper bound lambda1 <= int H0 / (2 |Sigma|).
"""
import logging
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from config.settings import config
from src.flow.collocation import lobatto_nodes
from src.flow.flow import MASS_NORMALIZATION, FlowTrajectory
from src.flow.foliation import ExteriorFoliation
from src.geometry.surface import EmbeddedSurface
from src.spectral.solver import DiracSpectrumResult
from src.utils.errors import PreconditionError

logger = logging.getLogger(__name__)


def dirac_initial_data(base: EmbeddedSurface, lambda1: float) -> Callable[[np.ndarray], np.ndarray]:
    """u0 = H0 / (2 lambda1), evaluated through the foliation so the poles are regular."""
    if lambda1 <= 0:
        raise PreconditionError(f"lambda1 must be positive, got {lambda1}")
    foliation = ExteriorFoliation(base)

    def u0(theta):
        return foliation.at(0.0, theta).mean_curvature / (2.0 * lambda1)

    return u0


@dataclass
class Theorem1Certificate:
    """Eigenvalue bound, flow data and the inequality chain Q(0) >= Q(rho) >= 8 pi m >= 0."""

    label: str
    lambda1: float
    total_mean_curvature: float
    area: float
    thm1_lhs: float
    thm1_rhs: float
    slack: float
    Q0: float
    mass: float
    herzlich_H_over_2: float
    Q0_identity_defect: float
    chain_holds: bool
    monotone: bool
    flat_consistent: bool
    max_residual: float
    tolerance: float

    @property
    def equality(self) -> bool:
        return abs(self.slack) <= self.tolerance and abs(self.mass) <= self.tolerance

    def to_dict(self) -> dict:
        data = asdict(self)
        data['equality'] = self.equality
        return data


def theorem1_certificate(
    base: EmbeddedSurface,
    spectrum: DiracSpectrumResult,
    flow: FlowTrajectory,
    tol: Optional[float] = None,
) -> Theorem1Certificate:
    """
    Assemble the certificate for one base surface.

    Args:
        base: Surface the flow was run on
        spectrum: Dirac spectrum of the induced metric of ``base``
        flow: Trajectory started from u0 = H0 / (2 lambda1)
        tol: Equality / chain tolerance (defaults to EQUALITY_TOL)

    Raises:
        PreconditionError: the flow was not started from H0 / (2 lambda1)
    """
    tol = config.EQUALITY_TOL if tol is None else tol
    lambda1 = spectrum.lambda1
    initial = flow.initial
    x, _, _ = lobatto_nodes(initial.u.size - 1)
    theta = np.arccos(x)
    base_mean = ExteriorFoliation(base).at(0.0, theta).mean_curvature
    expected = base_mean / (2.0 * lambda1)
    if np.max(np.abs(initial.u - expected)) > 1e-8 * np.max(np.abs(expected)):
        raise PreconditionError(f"{base.label}: flow was not started from u0 = H0/(2 lambda1)")

    total = base.total_mean_curvature
    area = base.area
    rhs = total / (2.0 * area)
    q = flow.monotone_quantities
    increments = np.diff(q)
    monotone = bool(np.all(increments <= 1e-8 * np.maximum(1.0, np.abs(q[:-1]))))
    chain = bool(
        q[0] >= q[-1] - tol
        and q[-1] >= MASS_NORMALIZATION * flow.mass - tol * MASS_NORMALIZATION
        and flow.mass >= -tol
    )
    residuals = [s.residual for s in flow.states if np.isfinite(s.residual)]

    certificate = Theorem1Certificate(
        label=base.label,
        lambda1=lambda1,
        total_mean_curvature=total,
        area=area,
        thm1_lhs=lambda1,
        thm1_rhs=rhs,
        slack=rhs - lambda1,
        Q0=float(q[0]),
        mass=flow.mass,
        herzlich_H_over_2=float(np.mean(base_mean / (2.0 * initial.u))),
        Q0_identity_defect=abs(float(q[0]) - (total - 2.0 * lambda1 * area)),
        chain_holds=chain,
        monotone=monotone,
        flat_consistent=flow.flat_consistent,
        max_residual=max(residuals) if residuals else float('nan'),
        tolerance=tol,
    )
    logger.info(
        f"Certificate for {base.label}: slack {certificate.slack:.3e}, Q0 {certificate.Q0:.6g}, "
        f"mass {certificate.mass:.6g}"
    )
    return certificate
