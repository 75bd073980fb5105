"""
Curvature of a metric from its values and first two coordinate derivatives.

Every routine works on batches: ``g`` has shape (..., 3, 3), ``dg`` has
shape (..., 3, 3, 3) indexed [a, i, j] = d_a g_ij and ``ddg`` has shape
(..., 3, 3, 3, 3) indexed [a, b, i, j].
"""
import logging
from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np

from src.ambient.charts import AmbientChart, richardson_derivative
from src.utils.errors import NumericalError

logger = logging.getLogger(__name__)

LAPLACIAN_STEP = 1e-2


def christoffel_symbols(g: np.ndarray, dg: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns:
        (g^-1, lowered symbols Gamma_lij, Gamma^k_ij)
    """
    g_inv = np.linalg.inv(g)
    lowered = 0.5 * (
        np.swapaxes(dg, -3, -2)
        + np.einsum('...jli->...lij', dg)
        - dg
    )
    return g_inv, lowered, np.einsum('...kl,...lij->...kij', g_inv, lowered)


def christoffel_derivative(g_inv: np.ndarray, lowered: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """d_m Gamma^k_ij indexed [m, k, i, j]."""
    d_lowered = 0.5 * (
        np.einsum('...milj->...mlij', ddg)
        + np.einsum('...mjli->...mlij', ddg)
        - ddg
    )
    d_inverse = -np.einsum('...ka,...mab,...bl->...mkl', g_inv, dg, g_inv)
    return (
        np.einsum('...mkl,...lij->...mkij', d_inverse, lowered)
        + np.einsum('...kl,...mlij->...mkij', g_inv, d_lowered)
    )


def ricci_tensor(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Ric_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik.

    Returns:
        (Ric, g^-1, Gamma^k_ij)
    """
    g_inv, lowered, gamma = christoffel_symbols(g, dg)
    d_gamma = christoffel_derivative(g_inv, lowered, dg, ddg)
    ricci = (
        np.einsum('...kkij->...ij', d_gamma)
        - np.einsum('...jkik->...ij', d_gamma)
        + np.einsum('...kkl,...lij->...ij', gamma, gamma)
        - np.einsum('...kjl,...lik->...ij', gamma, gamma)
    )
    return 0.5 * (ricci + np.swapaxes(ricci, -1, -2)), g_inv, gamma


def scalar_curvature(g: np.ndarray, dg: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    ricci, g_inv, _ = ricci_tensor(g, dg, ddg)
    return np.einsum('...ij,...ij->...', g_inv, ricci)


@dataclass
class CurvatureInvariants:
    """Curvature data of a chart at a point."""

    point: np.ndarray
    scalar: float
    ricci: np.ndarray
    ricci_norm_sq: float
    traceless_norm_sq: float
    scalar_laplacian: float
    laplacian_error: float = 0.0

    @property
    def expansion_coefficient(self) -> float:
        """L(p) = (9/4) R^2 + 2 |Ric|^2 + 9 Laplacian R."""
        return 2.25 * self.scalar ** 2 + 2.0 * self.ricci_norm_sq + 9.0 * self.scalar_laplacian

    def to_dict(self) -> dict:
        data = asdict(self)
        data['point'] = self.point.tolist()
        data['ricci'] = self.ricci.tolist()
        data['L'] = self.expansion_coefficient
        return data


def _chart_scalar_curvature(chart: AmbientChart):
    def scalar(points):
        return scalar_curvature(
            chart.metric(points), chart.metric_derivative(points), chart.metric_second_derivative(points)
        )
    return scalar


def curvature_at(chart: AmbientChart, point) -> CurvatureInvariants:
    """
    Scalar and Ricci curvature, |Ric|^2, |E|^2 and the Laplacian of R at a point.

    Ricci curvature uses the chart's derivative evaluators (exact for closed-form
    charts). The Laplacian of R differentiates R numerically with a
    Richardson-checked fourth-order stencil.

    Raises:
        PreconditionError: point outside the chart domain
        NumericalError: non-finite curvature or derivative values
    """
    point = np.asarray(point, dtype=float).reshape(3)
    chart.check_domain(point)
    at = point[None, :]

    g = chart.metric(at)
    dg = chart.metric_derivative(at)
    ddg = chart.metric_second_derivative(at)
    ricci, g_inv, gamma = ricci_tensor(g, dg, ddg)
    scalar = float(np.einsum('...ij,...ij->...', g_inv, ricci)[0])
    raised = np.einsum('...ia,...ab,...bj->...ij', g_inv, ricci, g_inv)
    ricci_norm_sq = float(np.einsum('...ij,...ij->...', raised, ricci)[0])

    scalar_field = _chart_scalar_curvature(chart)
    gradient, gradient_error = richardson_derivative(scalar_field, at, LAPLACIAN_STEP)

    def gradient_field(points):
        return richardson_derivative(scalar_field, points, LAPLACIAN_STEP)[0]

    hessian, hessian_error = richardson_derivative(gradient_field, at, LAPLACIAN_STEP)
    hessian = 0.5 * (hessian + np.swapaxes(hessian, -1, -2))
    covariant = hessian - np.einsum('...kij,...k->...ij', gamma, gradient)
    laplacian = float(np.einsum('...ij,...ij->...', g_inv, covariant)[0])

    values = (scalar, ricci_norm_sq, laplacian)
    if not all(np.isfinite(v) for v in values) or not np.all(np.isfinite(ricci)):
        raise NumericalError(f"Non-finite curvature of {chart.label} at {point.tolist()}")

    error = max(gradient_error, hessian_error)
    if error > 1e-4 * (1.0 + abs(laplacian)):
        logger.warning(f"Laplacian of R on {chart.label} has step-check error {error:.2e}")

    invariants = CurvatureInvariants(
        point=point,
        scalar=scalar,
        ricci=ricci[0],
        ricci_norm_sq=ricci_norm_sq,
        traceless_norm_sq=max(ricci_norm_sq - scalar ** 2 / 3.0, 0.0),
        scalar_laplacian=laplacian,
        laplacian_error=error,
    )
    logger.debug(f"Curvature of {chart.label} at {point.tolist()}: R={scalar:.6g}, L={invariants.expansion_coefficient:.6g}")
    return invariants
