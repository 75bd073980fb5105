"""
Scalar curvature of u^2 drho^2 + f_rho^2 dtheta^2 + h_rho^2 dphi^2 by finite differences.

The metric is sampled around sample points of the (rho, theta, phi) product
grid and fed through the generic Ricci routine, independently of the
parabolic equation used by the solver.
"""
import logging
from typing import Callable, Optional

import numpy as np

from src.ambient.charts import richardson_derivative
from src.ambient.curvature import scalar_curvature
from src.flow.collocation import interpolant
from src.flow.foliation import ExteriorFoliation

logger = logging.getLogger(__name__)

PROBE_STEP = 1e-3
PROBE_ANGLES = np.linspace(0.4, np.pi - 0.4, 7)

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def linearized_field(state) -> Field:
    """u(rho', theta) = u(theta) + (rho' - rho) d_rho u(theta) around a flow state."""
    values = interpolant(state.u)
    rates = interpolant(state.rate)

    def field(rho, theta):
        x = np.cos(theta)
        return values(x) + (rho - state.rho) * rates(x)

    return field


def quasi_spherical_metric(foliation: ExteriorFoliation, field: Field):
    """Metric evaluator on points (..., 3) = (rho, theta, phi)."""
    def metric(points):
        rho, theta = points[..., 0], points[..., 1]
        geom = foliation.at(rho, theta)
        g = np.zeros(points.shape[:-1] + (3, 3))
        g[..., 0, 0] = field(rho, theta) ** 2
        g[..., 1, 1] = geom.f ** 2
        g[..., 2, 2] = geom.h ** 2
        return g
    return metric


def derive_pde_residual(state, foliation: ExteriorFoliation, field: Optional[Field] = None) -> float:
    """
    max |R(g_u)| over interior sample points of the leaf at state.rho.

    Args:
        state: QSFlowState (u and d_rho u at the collocation nodes)
        foliation: The foliation the state lives on
        field: Optional closed-form u(rho, theta) replacing the state's
            linearization in rho

    Returns:
        Largest absolute scalar curvature found
    """
    field = field or linearized_field(state)
    metric = quasi_spherical_metric(foliation, field)

    def first(points):
        return richardson_derivative(metric, points, PROBE_STEP, relative=False)[0]

    points = np.stack(
        [np.full_like(PROBE_ANGLES, state.rho), PROBE_ANGLES, np.zeros_like(PROBE_ANGLES)], axis=-1
    )
    g = metric(points)
    dg = first(points)
    ddg, _ = richardson_derivative(first, points, PROBE_STEP, relative=False)
    residual = float(np.max(np.abs(scalar_curvature(g, dg, ddg))))
    logger.debug(f"Scalar curvature residual on {foliation.label} at rho={state.rho:.4g}: {residual:.3e}")
    return residual
