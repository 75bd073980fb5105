"""
Scalar-flat quasi-spherical metrics u^2 drho^2 + gamma_rho on the exterior of a
convex surface.

R(u^2 drho^2 + gamma_rho) = 0 is equivalent to the parabolic equation

    H_rho d_rho u = u^2 Lap_rho u + (u - u^3) K_rho,

where H_rho and K_rho are the mean and Gauss curvatures of the parallel
surfaces. In x = cos(theta) the Laplacian of an axisymmetric function reads
Lap u = d_x(eta (1 - x^2) u_x / f) / (f eta).

The equation is marched with Chebyshev-Lobatto collocation in x and an
implicit trapezoidal step in rho (backward Euler start-up steps), each step
solved by Newton's method. Along the flow

    Q(rho) = int H_rho (1 - 1/u) dSigma_rho

is nonincreasing and tends to 8 pi m.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np
from scipy import linalg

from src.flow.collocation import lobatto_nodes
from src.flow.foliation import ExteriorFoliation, ParallelGeometry
from src.flow.residual import derive_pde_residual
from src.geometry.surface import EmbeddedSurface
from src.utils.errors import ConsistencyError, FlowFailure, PreconditionError

logger = logging.getLogger(__name__)

MASS_NORMALIZATION = 8.0 * np.pi
DEFAULT_RESOLUTION = 32
STEP_FRACTION = 0.01
RHO_MAX_FACTOR = 50.0
STARTUP_STEPS = 4
MAX_CHANGE = 0.05
MONOTONE_TOL = 1e-8
NEWTON_TOL = 1e-11
NEWTON_ITERATIONS = 12
BLOW_UP = 1e6

InitialData = Union[float, Callable[[np.ndarray], np.ndarray], np.ndarray]


@dataclass
class QSFlowState:
    """u and the monotone quantity on one leaf of the foliation."""

    rho: float
    u: np.ndarray
    rate: np.ndarray
    monotone_quantity: float
    residual: float = float('nan')

    @property
    def mass_estimate(self) -> float:
        return self.monotone_quantity / MASS_NORMALIZATION

    @property
    def min_u(self) -> float:
        return float(np.min(self.u))

    @property
    def max_u(self) -> float:
        return float(np.max(self.u))


@dataclass
class FlowTrajectory:
    """Accepted flow states plus the extrapolated mass."""

    label: str
    states: List[QSFlowState]
    mass: float = float('nan')
    tail_coefficients: tuple = ()
    rejected_steps: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def initial(self) -> QSFlowState:
        return self.states[0]

    @property
    def final(self) -> QSFlowState:
        return self.states[-1]

    @property
    def rho(self) -> np.ndarray:
        return np.array([s.rho for s in self.states])

    @property
    def monotone_quantities(self) -> np.ndarray:
        return np.array([s.monotone_quantity for s in self.states])

    @property
    def max_deviation_from_one(self) -> float:
        return max(float(np.max(np.abs(s.u - 1.0))) for s in self.states)

    @property
    def flat_consistent(self) -> bool:
        """Vanishing mass forces u = 1 along the flow."""
        if abs(self.mass) >= 1e-6:
            return True
        return self.max_deviation_from_one < 1e-4

    def rows(self) -> List[list]:
        """CSV rows: rho, min u, max u, Q, residual."""
        return [[s.rho, s.min_u, s.max_u, s.monotone_quantity, s.residual] for s in self.states]

    def to_dict(self) -> dict:
        return {
            'label': self.label,
            'steps': len(self.states),
            'rejected_steps': self.rejected_steps,
            'rho_max': self.final.rho,
            'Q0': self.initial.monotone_quantity,
            'Q_final': self.final.monotone_quantity,
            'mass': self.mass,
            'tail_coefficients': list(self.tail_coefficients),
            **self.diagnostics,
        }


class QuasiSphericalFlow:
    """Collocation discretization of the quasi-spherical equation on one foliation."""

    def __init__(self, foliation: ExteriorFoliation, resolution: int = DEFAULT_RESOLUTION):
        self.foliation = foliation
        self.resolution = resolution
        self.x, self.D, self.weights = lobatto_nodes(resolution)
        self.theta = np.arccos(self.x)

    def geometry(self, rho: float) -> ParallelGeometry:
        return self.foliation.at(rho, self.theta)

    def laplacian(self, geom: ParallelGeometry) -> np.ndarray:
        """Collocation matrix of the leaf Laplacian acting on axisymmetric functions."""
        flux = geom.eta * (1.0 - self.x ** 2) / geom.f
        return (1.0 / (geom.f * geom.eta))[:, None] * (self.D @ (flux[:, None] * self.D))

    def rate(self, rho: float, u: np.ndarray) -> np.ndarray:
        """d_rho u from the quasi-spherical equation."""
        geom = self.geometry(rho)
        lap = self.laplacian(geom) @ u
        return (u ** 2 * lap + (u - u ** 3) * geom.gauss_curvature) / geom.mean_curvature

    def _rate_and_jacobian(self, rho: float, u: np.ndarray):
        geom = self.geometry(rho)
        L = self.laplacian(geom)
        lap = L @ u
        H, K = geom.mean_curvature, geom.gauss_curvature
        rate = (u ** 2 * lap + (u - u ** 3) * K) / H
        jacobian = np.diag((2.0 * u * lap + (1.0 - 3.0 * u ** 2) * K) / H) + (u ** 2 / H)[:, None] * L
        return rate, jacobian

    def monotone_quantity(self, rho: float, u: np.ndarray) -> float:
        """Q = 2 pi int H (1 - 1/u) f eta dx."""
        geom = self.geometry(rho)
        density = geom.mean_curvature * (1.0 - 1.0 / u) * geom.f * geom.eta
        return float(2.0 * np.pi * np.dot(self.weights, density))

    def state_at(self, rho: float, u: np.ndarray) -> QSFlowState:
        u = np.asarray(u, dtype=float)
        return QSFlowState(
            rho=float(rho), u=u.copy(), rate=self.rate(rho, u), monotone_quantity=self.monotone_quantity(rho, u)
        )

    def step(self, rho: float, u: np.ndarray, d_rho: float, implicitness: float = 0.5) -> Optional[np.ndarray]:
        """
        One theta-scheme step solved by Newton's method.

        Returns:
            u at rho + d_rho, or None when Newton fails or positivity is lost
        """
        explicit = (1.0 - implicitness) * self.rate(rho, u) if implicitness < 1.0 else 0.0
        target = rho + d_rho
        v = u.copy()
        identity = np.eye(u.size)
        for _ in range(NEWTON_ITERATIONS):
            rate, jacobian = self._rate_and_jacobian(target, v)
            residual = v - u - d_rho * (explicit + implicitness * rate)
            try:
                delta = linalg.solve(identity - d_rho * implicitness * jacobian, residual)
            except linalg.LinAlgError:
                return None
            v = v - delta
            if not np.all(np.isfinite(v)) or np.min(v) <= 0:
                return None
            if np.max(np.abs(delta)) < NEWTON_TOL * max(1.0, float(np.max(np.abs(v)))):
                return v
        return None

    def march(
        self,
        u0: np.ndarray,
        rho_max: float,
        step_fraction: float = STEP_FRACTION,
        residual_checkpoints: int = 0,
    ) -> FlowTrajectory:
        """
        Integrate from rho = 0 to rho_max.

        Raises:
            FlowFailure: u loses positivity, blows up, or the step size underflows
            ConsistencyError: Q increases beyond tolerance
        """
        scale = 0.5 * self.foliation.diameter
        u = np.asarray(u0, dtype=float).copy()
        if np.min(u) <= 0:
            raise FlowFailure("Initial data must be positive")

        states = [self.state_at(0.0, u)]
        rho, accepted, rejected = 0.0, 0, 0
        d_rho = step_fraction * scale
        while rho < rho_max * (1.0 - 1e-14):
            d_rho = min(d_rho, step_fraction * (rho + scale), rho_max - rho)
            implicitness = 1.0 if accepted < STARTUP_STEPS else 0.5
            v = self.step(rho, u, d_rho, implicitness)
            change = np.inf if v is None else np.max(np.abs(v - u)) / np.max(np.abs(u))
            if v is None or change > MAX_CHANGE:
                rejected += 1
                d_rho *= 0.5
                logger.debug(f"{self.foliation.label}: rejected step at rho={rho:.6g}, retrying with {d_rho:.3g}")
                if d_rho < 1e-10 * (rho + scale):
                    raise FlowFailure(f"{self.foliation.label}: step size underflow at rho={rho:.6g}")
                continue

            if np.max(v) > BLOW_UP:
                raise FlowFailure(f"{self.foliation.label}: u blew up at rho={rho + d_rho:.6g}")

            rho += d_rho
            u = v
            state = self.state_at(rho, u)
            previous = states[-1].monotone_quantity
            if state.monotone_quantity > previous + MONOTONE_TOL * max(1.0, abs(previous)):
                raise ConsistencyError(
                    f"{self.foliation.label}: Q increased from {previous:.12g} to "
                    f"{state.monotone_quantity:.12g} at rho={rho:.6g}"
                )
            states.append(state)
            accepted += 1
            d_rho *= 2.0

        trajectory = FlowTrajectory(label=self.foliation.label, states=states, rejected_steps=rejected)
        trajectory.mass, trajectory.tail_coefficients = extrapolate_mass(trajectory)

        if residual_checkpoints:
            picks = np.unique(np.geomspace(1, len(states) - 1, residual_checkpoints).astype(int))
            for index in [0, *picks]:
                states[index].residual = derive_pde_residual(states[index], self.foliation)

        logger.info(
            f"Flow on {self.foliation.label} finished at rho={rho:.4g} after {accepted} steps "
            f"({rejected} rejected): mass {trajectory.mass:.8g}"
        )
        return trajectory


def extrapolate_mass(trajectory: FlowTrajectory):
    """
    Fit Q(rho) = Q_inf + a/rho + b/rho^2 on the last decade of rho.

    Returns:
        (Q_inf / 8 pi, (Q_inf, a, b))
    """
    rho = trajectory.rho
    q = trajectory.monotone_quantities
    window = rho >= 0.1 * rho[-1]
    window &= rho > 0
    if np.count_nonzero(window) < 3:
        return q[-1] / MASS_NORMALIZATION, (q[-1], 0.0, 0.0)
    design = np.column_stack([np.ones(np.count_nonzero(window)), 1.0 / rho[window], 1.0 / rho[window] ** 2])
    coefficients, *_ = np.linalg.lstsq(design, q[window], rcond=None)
    return float(coefficients[0] / MASS_NORMALIZATION), tuple(float(c) for c in coefficients)


def initial_samples(u0: InitialData, theta: np.ndarray) -> np.ndarray:
    if callable(u0):
        return np.asarray(u0(theta), dtype=float) * np.ones_like(theta)
    values = np.asarray(u0, dtype=float)
    if values.ndim == 0:
        return np.full_like(theta, float(values))
    if values.shape != theta.shape:
        raise PreconditionError(f"Initial data has shape {values.shape}, expected {theta.shape}")
    return values


def run_flow(
    base: EmbeddedSurface,
    u0: InitialData,
    rho_max: Optional[float] = None,
    resolution: int = DEFAULT_RESOLUTION,
    step_fraction: float = STEP_FRACTION,
    residual_checkpoints: int = 6,
) -> FlowTrajectory:
    """
    Solve the quasi-spherical problem on the exterior of a convex surface.

    Args:
        base: Convex axisymmetric Euclidean surface
        u0: Positive initial data: a constant, a function of theta, or samples
            at the Chebyshev-Lobatto nodes
        rho_max: Final offset (defaults to 50 base diameters)
        resolution: Polynomial degree of the collocation in cos(theta)
        step_fraction: Step size as a fraction of rho + diameter/2
        residual_checkpoints: Number of states whose scalar-curvature residual is recorded

    Returns:
        FlowTrajectory with the tail-fitted mass

    Raises:
        PreconditionError: u0 not positive
        GeometryError: base not convex
        FlowFailure, ConsistencyError: see QuasiSphericalFlow.march
    """
    foliation = ExteriorFoliation(base)
    flow = QuasiSphericalFlow(foliation, resolution)
    samples = initial_samples(u0, flow.theta)
    if not np.all(np.isfinite(samples)) or np.min(samples) <= 0:
        raise PreconditionError("Initial data u0 must be positive and finite")

    rho_max = RHO_MAX_FACTOR * foliation.diameter if rho_max is None else rho_max
    logger.info(f"Running quasi-spherical flow on {base.label} to rho={rho_max:.4g} (N={resolution})")
    return flow.march(samples, rho_max, step_fraction, residual_checkpoints)
