"""
Independent per-mode shooting solver for axisymmetric conformal metrics.

For an azimuthal block m >= 1/2 the theta-parts (g1, g2) of an eigenspinor
satisfy a first-order 2x2 system. Factoring out the pole behaviour,
g1 = cos^{m+1/2} sin^{m-1/2} P and g2 = cos^{m-1/2} sin^{m+1/2} Q (half-angles),
leaves a regular system for (P, Q):

    P' = tan(theta/2) * ((m + 1/2) P - lambda e^u Q)
    Q' = cot(theta/2) * (lambda e^u P - (m + 1/2) Q)

Eigenvalues are the zeros of the Wronskian of the solutions regular at
the two poles, matched at the equator.
"""
import logging
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src.spectral.metric import ConformalSphereMetric
from src.utils.errors import NumericalError, PreconditionError

logger = logging.getLogger(__name__)

POLE_OFFSET = 1e-4


def _rhs(metric: ConformalSphereMetric, m: float, lam: float):
    k = m + 0.5

    def rhs(theta, y):
        p, q = y
        weight = lam * np.exp(metric.values(np.array([theta]))[0])
        half = theta / 2.0
        return [
            np.tan(half) * (k * p - weight * q),
            (weight * p - k * q) / np.tan(half),
        ]

    return rhs


def matching_determinant(
    metric: ConformalSphereMetric,
    m: float,
    lam: float,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> float:
    """Wronskian at the equator of the solutions regular at each pole."""
    k = m + 0.5
    eps = POLE_OFFSET
    u_north = metric.values(np.array([0.0]))[0]
    u_south = metric.values(np.array([np.pi]))[0]
    rhs = _rhs(metric, m, lam)

    north = solve_ivp(
        rhs, (eps, np.pi / 2), [1.0, lam * np.exp(u_north) / k],
        method='DOP853', rtol=rtol, atol=atol,
    )
    south = solve_ivp(
        rhs, (np.pi - eps, np.pi / 2), [lam * np.exp(u_south) / k, 1.0],
        method='DOP853', rtol=rtol, atol=atol,
    )
    if not (north.success and south.success):
        raise NumericalError(f"Shooting integration failed at lambda={lam}")

    p_n, q_n = north.y[:, -1]
    p_s, q_s = south.y[:, -1]
    return float(p_n * q_s - q_n * p_s)


def shoot_block_eigenvalue(
    metric: ConformalSphereMetric,
    m: float = 0.5,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
    n_scan: int = 40,
) -> float:
    """
    Smallest eigenvalue of block m inside [lower, upper].

    Args:
        metric: Axisymmetric conformal metric
        m: Half-integer azimuthal index, m >= 1/2
        lower: Scan start (default 0.5 * exp(-max u))
        upper: Scan end (default 1.5 * exp(-min u))
        n_scan: Number of scan points used to bracket the first sign change

    Returns:
        The first root of the matching determinant
    """
    if not metric.axisymmetric:
        raise PreconditionError("Shooting requires an axisymmetric metric")
    if m < 0.5 or abs(2 * m - round(2 * m)) > 1e-12 or round(2 * m) % 2 == 0:
        raise PreconditionError(f"Shooting supports half-integers m >= 1/2, got {m}")

    samples = metric.values(np.linspace(0.0, np.pi, 257))
    lower = 0.5 * np.exp(-samples.max()) if lower is None else lower
    upper = 1.5 * np.exp(-samples.min()) if upper is None else upper

    grid = np.linspace(lower, upper, n_scan)
    values = [matching_determinant(metric, m, lam) for lam in grid]
    for left, right, f_left, f_right in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f_left == 0.0:
            return float(left)
        if f_left * f_right < 0:
            root = brentq(
                lambda lam: matching_determinant(metric, m, lam),
                left, right, xtol=1e-14, rtol=1e-14,
            )
            logger.debug(f"Shooting block m={m}: eigenvalue {root:.15g}")
            return float(root)
    raise NumericalError(f"No eigenvalue of block m={m} found in [{lower}, {upper}]")
