"""
Geodesic and coordinate spheres of an ambient chart.

Geodesic spheres are sampled through the exponential map: one unit-speed
geodesic per direction of a Gauss-Legendre x uniform-azimuth grid, integrated
with classical RK4 together with the two Jacobi fields obtained by varying
the direction in theta and phi. At t = r the Jacobi fields span the tangent
plane of S_r, so

    gamma_ab = g(J_a, J_b),    H = (1/2) tr(gamma^-1 d_r gamma),

with d_r gamma read off from the Jacobi data at the endpoint.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import legendre

from config.settings import config
from src.ambient.charts import AmbientChart
from src.ambient.curvature import christoffel_derivative, christoffel_symbols
from src.geometry.uniformize import uniformize_warped
from src.spectral.basis import SphereGrid, make_grid
from src.spectral.metric import ConformalSphereMetric
from src.utils.errors import NumericalError, PreconditionError, RadiusTooLargeError

logger = logging.getLogger(__name__)

DEFAULT_THETA_NODES = 24
DEFAULT_STEPS = 64
INJECTIVITY_FLOOR = 1e-8
ROUND_TOL = 1e-6


@dataclass
class GeodesicSphereSample:
    """Induced metric and mean curvature of a sphere sampled on a direction grid."""

    center: np.ndarray
    radius: float
    grid: SphereGrid
    gamma: np.ndarray
    mean_curvature: np.ndarray
    kind: str = 'geodesic'
    chart_label: str = ''
    beta: Optional[float] = None

    @property
    def density(self) -> np.ndarray:
        """Area element relative to the round area element dx dphi."""
        det = self.gamma[..., 0, 0] * self.gamma[..., 1, 1] - self.gamma[..., 0, 1] ** 2
        sin_t = np.sin(self.grid.theta)[:, None]
        return np.sqrt(det) / sin_t

    def integrate(self, values) -> float:
        """Integral of values dS_r over the sphere."""
        return self.grid.integrate(np.broadcast_to(values, self.density.shape) * self.density)

    @property
    def area(self) -> float:
        return self.integrate(1.0)

    @property
    def total_mean_curvature(self) -> float:
        return self.integrate(self.mean_curvature)

    @property
    def effective_radius(self) -> float:
        """Radius of the round sphere with the same area."""
        return float(np.sqrt(self.area / (4.0 * np.pi)))

    def conformal_metric(self, tol: float = ROUND_TOL) -> ConformalSphereMetric:
        """
        The induced metric as e^{2u} g_round.

        Round samples are read off directly; axisymmetric samples about the
        grid axis are uniformized.

        Raises:
            PreconditionError: the induced metric is not axisymmetric about the grid axis
        """
        sin2 = np.sin(self.grid.theta)[:, None] ** 2
        g_tt = self.gamma[..., 0, 0]
        g_tp = self.gamma[..., 0, 1]
        g_pp = self.gamma[..., 1, 1]
        scale = float(np.max(g_tt))
        label = f"S_r:{self.kind}:r={self.radius:g}"

        azimuthal_spread = np.max(np.ptp(g_tt, axis=1)) + np.max(np.ptp(g_pp / sin2, axis=1))
        axisymmetric = np.max(np.abs(g_tp)) <= tol * scale and azimuthal_spread <= tol * scale

        if np.max(np.abs(g_pp / sin2 - g_tt)) <= tol * scale and np.max(np.abs(g_tp)) <= tol * scale:
            exponent = 0.5 * np.log(g_tt)
            if axisymmetric:
                return ConformalSphereMetric.from_samples(exponent.mean(axis=1), label=label)
            return ConformalSphereMetric.from_samples(exponent, label=label)

        if not axisymmetric:
            raise PreconditionError(f"{label}: induced metric is not axisymmetric about the sampling axis")

        x = self.grid.x
        degree = x.size - 1
        stretch_fit = legendre.legfit(x, np.sqrt(g_tt.mean(axis=1)), degree)
        eta_fit = legendre.legfit(x, np.sqrt(g_pp.mean(axis=1) / sin2[:, 0]), degree)

        def eta(theta):
            return legendre.legval(np.cos(theta), eta_fit)

        def stretch(theta):
            return legendre.legval(np.cos(theta), stretch_fit) / eta(theta)

        return uniformize_warped(eta, stretch, label=label).metric

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'chart': self.chart_label,
            'center': self.center.tolist(),
            'radius': self.radius,
            'area': self.area,
            'total_mean_curvature': self.total_mean_curvature,
            'effective_radius': self.effective_radius,
            'beta': self.beta,
        }


def _unit_directions(grid: SphereGrid):
    theta, phi = np.meshgrid(grid.theta, grid.phi, indexing='ij')
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    sin_p, cos_p = np.sin(phi), np.cos(phi)
    n = np.stack([sin_t * cos_p, sin_t * sin_p, cos_t], axis=-1)
    d_theta = np.stack([cos_t * cos_p, cos_t * sin_p, -sin_t], axis=-1)
    d_phi = np.stack([-sin_t * sin_p, sin_t * cos_p, np.zeros_like(theta)], axis=-1)
    return n, d_theta, d_phi


def _geodesic_rhs(chart: AmbientChart, state: np.ndarray) -> np.ndarray:
    """state[:, 0] = x, [:, 1] = v, then pairs (J, J') of Jacobi fields."""
    x, v = state[:, 0], state[:, 1]
    g, dg, ddg = chart.metric(x), chart.metric_derivative(x), chart.metric_second_derivative(x)
    g_inv, lowered, gamma = christoffel_symbols(g, dg)

    rate = np.empty_like(state)
    rate[:, 0] = v
    rate[:, 1] = -np.einsum('nkij,ni,nj->nk', gamma, v, v)
    if state.shape[1] > 2:
        d_gamma = christoffel_derivative(g_inv, lowered, dg, ddg)
        for slot in range(2, state.shape[1], 2):
            jacobi, jacobi_rate = state[:, slot], state[:, slot + 1]
            rate[:, slot] = jacobi_rate
            rate[:, slot + 1] = (
                -np.einsum('nlkij,nl,ni,nj->nk', d_gamma, jacobi, v, v)
                - 2.0 * np.einsum('nkij,ni,nj->nk', gamma, v, jacobi_rate)
            )
    return rate


def integrate_geodesics(chart: AmbientChart, state: np.ndarray, length: float, n_steps: int) -> np.ndarray:
    """
    Classical RK4 for geodesics and their Jacobi fields over parameter length.

    Args:
        state: (n, 2 + 2k, 3) initial positions, velocities and k Jacobi pairs
    """
    if n_steps < 1:
        raise PreconditionError("Need at least one integration step")
    h = length / n_steps
    state = np.array(state, dtype=float)
    for _ in range(n_steps):
        k1 = _geodesic_rhs(chart, state)
        k2 = _geodesic_rhs(chart, state + 0.5 * h * k1)
        k3 = _geodesic_rhs(chart, state + 0.5 * h * k2)
        k4 = _geodesic_rhs(chart, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(state)):
        raise NumericalError(f"Geodesic integration on {chart.label} produced non-finite values")
    return state


def _inverse_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    return (vectors / np.sqrt(values)) @ vectors.T


def geodesic_sphere(
    chart: AmbientChart,
    center,
    radius: float,
    n_theta: int = DEFAULT_THETA_NODES,
    n_phi: Optional[int] = None,
    n_steps: int = DEFAULT_STEPS,
    threads: Optional[int] = None,
) -> GeodesicSphereSample:
    """
    Sample the geodesic sphere S_r(p) by geodesic shooting.

    Args:
        chart: Ambient chart
        center: Point p in the chart domain
        radius: Geodesic radius r
        n_theta: Gauss-Legendre nodes in cos(theta) for the direction grid
        n_phi: Azimuth nodes (defaults to 2 * n_theta + 1)
        n_steps: RK4 steps per geodesic
        threads: Worker threads for the per-direction integration

    Raises:
        RadiusTooLargeError: the Jacobi determinant degenerates (conjugate point)
        NumericalError: non-finite integration results
    """
    center = np.asarray(center, dtype=float).reshape(3)
    if radius <= 0:
        raise PreconditionError(f"Radius must be positive, got {radius}")
    chart.check_domain(center)

    grid = make_grid(n_theta, n_phi or 2 * n_theta + 1)
    n, d_theta, d_phi = _unit_directions(grid)
    frame = _inverse_sqrt(chart.metric(center[None])[0])

    count = n_theta * grid.n_phi
    state = np.zeros((count, 6, 3))
    state[:, 0] = center
    state[:, 1] = n.reshape(-1, 3) @ frame.T
    state[:, 3] = d_theta.reshape(-1, 3) @ frame.T
    state[:, 5] = d_phi.reshape(-1, 3) @ frame.T

    workers = threads or config.THREADS
    if workers > 1:
        chunks = np.array_split(state, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda chunk: integrate_geodesics(chart, chunk, radius, n_steps), chunks))
        final = np.concatenate(parts)
    else:
        final = integrate_geodesics(chart, state, radius, n_steps)

    x, v = final[:, 0], final[:, 1]
    chart.check_domain(x)
    jacobi = np.stack([final[:, 2], final[:, 4]], axis=1)
    jacobi_rate = np.stack([final[:, 3], final[:, 5]], axis=1)
    g, dg = chart.metric(x), chart.metric_derivative(x)

    gamma = np.einsum('nai,nij,nbj->nab', jacobi, g, jacobi)
    d_gamma = (
        np.einsum('nl,nlij,nai,nbj->nab', v, dg, jacobi, jacobi)
        + np.einsum('nai,nij,nbj->nab', jacobi_rate, g, jacobi)
        + np.einsum('nai,nij,nbj->nab', jacobi, g, jacobi_rate)
    )

    det = np.linalg.det(gamma).reshape(n_theta, grid.n_phi)
    sin2 = np.sin(grid.theta)[:, None] ** 2
    if np.min(det / sin2) < INJECTIVITY_FLOOR * radius ** 4:
        raise RadiusTooLargeError(
            f"Jacobi determinant degenerates on {chart.label} at r={radius:g} (conjugate point)"
        )

    mean = 0.5 * np.einsum('nab,nba->n', np.linalg.inv(gamma), d_gamma)
    sample = GeodesicSphereSample(
        center=center,
        radius=float(radius),
        grid=grid,
        gamma=gamma.reshape(n_theta, grid.n_phi, 2, 2),
        mean_curvature=mean.reshape(n_theta, grid.n_phi),
        kind='geodesic',
        chart_label=chart.label,
    )
    logger.debug(f"Geodesic sphere r={radius:g} on {chart.label}: area {sample.area:.10g}")
    return sample


def coordinate_mean_curvature(chart: AmbientChart, points: np.ndarray) -> tuple:
    """
    Mean curvature of the level sets of |x| and their unit normal.

    H = div_g N with N^i = g^ij nu_j / |nu|_g, nu = dx/|x|.

    Returns:
        (H, N) with shapes (...,) and (..., 3)
    """
    g, dg = chart.metric(points), chart.metric_derivative(points)
    g_inv = np.linalg.inv(g)
    radius = np.linalg.norm(points, axis=-1)
    nu = points / radius[..., None]
    d_nu = (np.eye(3) - nu[..., :, None] * nu[..., None, :]) / radius[..., None, None]
    d_inverse = -np.einsum('...ia,...mab,...bj->...mij', g_inv, dg, g_inv)

    raised = np.einsum('...ij,...j->...i', g_inv, nu)
    norm_sq = np.einsum('...i,...i->...', raised, nu)
    norm = np.sqrt(norm_sq)
    d_norm_sq = (
        np.einsum('...mab,...a,...b->...m', d_inverse, nu, nu)
        + 2.0 * np.einsum('...ab,...a,...mb->...m', g_inv, nu, d_nu)
    )
    divergence = (
        np.einsum('...iij,...j->...', d_inverse, nu) / norm
        + np.einsum('...ij,...ij->...', g_inv, d_nu) / norm
        - np.einsum('...i,...i->...', raised, d_norm_sq) / (2.0 * norm_sq * norm)
    )
    normal = raised / norm[..., None]
    log_volume = 0.5 * np.einsum('...ab,...iab->...i', g_inv, dg)
    return divergence + np.einsum('...i,...i->...', log_volume, normal), normal


def coordinate_sphere(
    chart: AmbientChart,
    radius: float,
    n_theta: int = DEFAULT_THETA_NODES,
    n_phi: Optional[int] = None,
) -> GeodesicSphereSample:
    """
    The coordinate sphere {|x| = r} of an asymptotically flat chart.

    Also reports beta(r) = 1/2 int (g^ij - N^i N^j) sigma_ij dS_r.

    Raises:
        PreconditionError: chart not asymptotically flat or r inside the excluded region
    """
    if not chart.asymptotically_flat:
        raise PreconditionError(f"Coordinate spheres need an asymptotically flat chart, got {chart.label}")
    if radius <= chart.inner_radius or radius >= chart.outer_radius:
        raise PreconditionError(f"Radius {radius:g} outside the domain of {chart.label}")

    grid = make_grid(n_theta, n_phi or 2 * n_theta + 1)
    n, d_theta, d_phi = _unit_directions(grid)
    points = radius * n
    tangents = np.stack([radius * d_theta, radius * d_phi], axis=-2)
    g = chart.metric(points)
    gamma = np.einsum('...ai,...ij,...bj->...ab', tangents, g, tangents)

    mean, normal = coordinate_mean_curvature(chart, points)
    sample = GeodesicSphereSample(
        center=np.zeros(3),
        radius=float(radius),
        grid=grid,
        gamma=gamma,
        mean_curvature=mean,
        kind='coordinate',
        chart_label=chart.label,
    )

    projector = np.linalg.inv(g) - normal[..., :, None] * normal[..., None, :]
    trace = np.einsum('...ij,...ij->...', projector, chart.perturbation_values(points))
    sample.beta = 0.5 * sample.integrate(trace)
    logger.debug(f"Coordinate sphere r={radius:g} on {chart.label}: beta {sample.beta:.6g}")
    return sample
