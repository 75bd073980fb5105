"""
Explicit 3-manifold charts g_ij(x) with first and second derivative evaluators.

Closed-form charts are built from sympy matrices and lambdified once; their
derivatives are exact. Charts given only as numeric callables fall back to
fourth-order central differences with a Richardson step check.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import sympy as sp

from src.ambient.expressions import COORDINATES, RADIUS, load_perturbation
from src.utils.errors import ConfigurationError, NumericalError, PreconditionError
from src.utils.validators import parse_descriptor, validate_chart_descriptor

logger = logging.getLogger(__name__)

FD_STEP = 1e-3


def _broadcast_components(functions, points: np.ndarray, shape: tuple) -> np.ndarray:
    """Evaluate a nested list of lambdified components on points (..., 3)."""
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    flat = [np.broadcast_to(np.asarray(f(x, y, z), dtype=float), x.shape) for f in functions]
    return np.stack(flat, axis=-1).reshape(x.shape + shape)


def richardson_derivative(
    func: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    step: float = FD_STEP,
    relative: bool = True,
):
    """
    Derivative of an array-valued function along each coordinate axis.

    Central differences at h and h/2 are combined into a fourth-order
    estimate; their difference is returned as the error estimate.

    Returns:
        (derivative with a new axis of length 3 inserted after the point axes, error estimate)
    """
    points = np.asarray(points, dtype=float)
    lead = points.ndim - 1
    scale = np.full(points.shape[:-1], step)
    if relative:
        scale = scale * np.maximum(1.0, np.linalg.norm(points, axis=-1))
    estimates = []
    for fraction in (1.0, 0.5):
        h = fraction * scale
        axes = []
        for axis in range(3):
            offset = np.zeros_like(points)
            offset[..., axis] = h
            difference = func(points + offset) - func(points - offset)
            trailing = difference.ndim - lead
            axes.append(difference / (2.0 * h.reshape(h.shape + (1,) * trailing)))
        estimates.append(np.stack(axes, axis=lead))
    coarse, fine = estimates
    if not (np.all(np.isfinite(coarse)) and np.all(np.isfinite(fine))):
        raise NumericalError("Finite-difference derivative produced non-finite values")
    return (4.0 * fine - coarse) / 3.0, float(np.max(np.abs(fine - coarse), initial=0.0))


@dataclass
class AmbientChart:
    """
    A Riemannian metric on a domain of R^3 in explicit coordinates.

    Attributes:
        kind: euclidean, schwarzschild, spaceform, perturbed or callable
        parameters: Descriptor parameters (m, k, file, ...)
        symbolic: 3x3 sympy matrix in x, y, z (None for callable charts)
        perturbation: sigma_ij = g_ij - delta_ij when the chart is asymptotically flat
        mass: Mass parameter when known
        decay_rate: tau of sigma_ij = O(|x|^-tau)
        inner_radius: points need |x| > inner_radius
        outer_radius: points need |x| < outer_radius
    """

    kind: str
    parameters: dict = field(default_factory=dict)
    symbolic: Optional[sp.Matrix] = None
    numeric: Optional[Callable[[np.ndarray], np.ndarray]] = None
    perturbation: Optional[sp.Matrix] = None
    mass: Optional[float] = None
    decay_rate: Optional[float] = None
    inner_radius: float = 0.0
    outer_radius: float = np.inf
    label: str = ""

    def __post_init__(self):
        if self.symbolic is None and self.numeric is None:
            raise PreconditionError("Chart needs a symbolic or numeric metric")
        self.label = self.label or self.kind
        if self.symbolic is not None:
            coords = COORDINATES
            g = self.symbolic
            self._g = [sp.lambdify(coords, g[i, j], 'numpy') for i in range(3) for j in range(3)]
            self._dg = [
                sp.lambdify(coords, sp.diff(g[i, j], coords[a]), 'numpy')
                for a in range(3) for i in range(3) for j in range(3)
            ]
            self._ddg = [
                sp.lambdify(coords, sp.diff(g[i, j], coords[a], coords[b]), 'numpy')
                for a in range(3) for b in range(3) for i in range(3) for j in range(3)
            ]
            if self.perturbation is not None:
                self._sigma = [
                    sp.lambdify(coords, self.perturbation[i, j], 'numpy') for i in range(3) for j in range(3)
                ]

    @property
    def closed_form(self) -> bool:
        return self.symbolic is not None

    @property
    def asymptotically_flat(self) -> bool:
        return self.perturbation is not None

    def check_domain(self, points: np.ndarray) -> None:
        radius = np.linalg.norm(np.asarray(points, dtype=float), axis=-1)
        inside = self.inner_radius > 0 and np.any(radius <= self.inner_radius)
        if inside or np.any(radius >= self.outer_radius):
            raise PreconditionError(
                f"Point outside the domain of {self.label} "
                f"({self.inner_radius:g} < |x| < {self.outer_radius:g})"
            )

    def metric(self, points) -> np.ndarray:
        """g_ij at points (..., 3) -> (..., 3, 3)."""
        points = np.asarray(points, dtype=float)
        if self.symbolic is None:
            return np.asarray(self.numeric(points), dtype=float)
        return _broadcast_components(self._g, points, (3, 3))

    def metric_derivative(self, points) -> np.ndarray:
        """d_a g_ij -> (..., 3, 3, 3) indexed [a, i, j]."""
        points = np.asarray(points, dtype=float)
        if self.symbolic is None:
            derivative, error = richardson_derivative(self.metric, points)
            logger.debug(f"{self.label}: metric derivative step check {error:.2e}")
            return derivative
        return _broadcast_components(self._dg, points, (3, 3, 3))

    def metric_second_derivative(self, points) -> np.ndarray:
        """d_a d_b g_ij -> (..., 3, 3, 3, 3) indexed [a, b, i, j]."""
        points = np.asarray(points, dtype=float)
        if self.symbolic is None:
            derivative, _ = richardson_derivative(self.metric_derivative, points)
            return derivative
        return _broadcast_components(self._ddg, points, (3, 3, 3, 3))

    def perturbation_values(self, points) -> np.ndarray:
        """sigma_ij at points; requires an asymptotically flat chart."""
        if self.perturbation is None:
            raise PreconditionError(f"Chart {self.label} is not asymptotically flat")
        points = np.asarray(points, dtype=float)
        return _broadcast_components(self._sigma, points, (3, 3))

    def validate(self) -> list:
        """Positivity of g and, for asymptotically flat charts, the decay rate."""
        errors = []
        rng = np.random.default_rng(0)
        directions = rng.normal(size=(32, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        if np.isfinite(self.outer_radius):
            radii = (0.25 * self.outer_radius, 0.5 * self.outer_radius)
        else:
            base = max(2.0 * self.inner_radius, 0.5)
            radii = (base, 5.0 * base)
        points = np.vstack([directions * r for r in radii])
        try:
            eigenvalues = np.linalg.eigvalsh(self.metric(points))
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
            return [f"Metric of {self.label} cannot be evaluated: {e}"]
        if not np.all(np.isfinite(eigenvalues)) or np.min(eigenvalues) <= 0:
            errors.append(f"Metric of {self.label} is not positive definite at sample points")

        if self.asymptotically_flat and self.decay_rate is not None and np.isfinite(self.decay_rate):
            near = np.max(np.abs(self.perturbation_values(directions * 1e2)))
            far = np.max(np.abs(self.perturbation_values(directions * 1e3)))
            if far > 10.0 * near * 10.0 ** (-self.decay_rate) + 1e-12:
                errors.append(f"Perturbation of {self.label} decays slower than |x|^-{self.decay_rate:g}")
        return errors


def euclidean() -> AmbientChart:
    return AmbientChart(
        kind='euclidean',
        symbolic=sp.eye(3),
        perturbation=sp.zeros(3, 3),
        mass=0.0,
        decay_rate=np.inf,
        label='euclidean',
    )


def schwarzschild(m: float) -> AmbientChart:
    """Isotropic Schwarzschild slice (1 + m/(2|x|))^4 delta_ij on |x| > m/2."""
    psi = 1 + sp.Rational(1, 2) * sp.nsimplify(m) / RADIUS
    factor = psi ** 4
    return AmbientChart(
        kind='schwarzschild',
        parameters={'m': m},
        symbolic=factor * sp.eye(3),
        perturbation=(factor - 1) * sp.eye(3),
        mass=float(m),
        decay_rate=1.0,
        inner_radius=m / 2.0,
        label=f'schwarzschild:m={m:g}',
    )


def space_form(k: float) -> AmbientChart:
    """Constant sectional curvature k in conformally flat (stereographic) coordinates."""
    k_sym = sp.nsimplify(k)
    factor = 1 / (1 + k_sym * RADIUS ** 2 / 4) ** 2
    outer = 2.0 / np.sqrt(-k) if k < 0 else np.inf
    return AmbientChart(
        kind='spaceform',
        parameters={'k': k},
        symbolic=factor * sp.eye(3),
        outer_radius=outer,
        label=f'spaceform:k={k:g}',
    )


def perturbed_flat(path) -> AmbientChart:
    sigma, tau, mass = load_perturbation(path)
    return AmbientChart(
        kind='perturbed',
        parameters={'file': str(path)},
        symbolic=sp.eye(3) + sigma,
        perturbation=sigma,
        mass=mass,
        decay_rate=tau,
        label=f'perturbed:file={path}',
    )


def from_callable(metric: Callable[[np.ndarray], np.ndarray], label: str = 'callable') -> AmbientChart:
    """Chart known only through a numeric evaluator g(x) -> (..., 3, 3)."""
    return AmbientChart(kind='callable', numeric=metric, label=label)


def make_chart(descriptor: str) -> AmbientChart:
    """
    Build a chart from ``euclidean``, ``schwarzschild:m=1``, ``spaceform:k=1``
    or ``perturbed:file=path``.
    """
    errors = validate_chart_descriptor(descriptor)
    if errors:
        raise ConfigurationError(f"Invalid chart descriptor '{descriptor}'", errors)

    kind, params = parse_descriptor(descriptor)
    if kind == 'euclidean':
        chart = euclidean()
    elif kind == 'schwarzschild':
        chart = schwarzschild(float(params['m']))
    elif kind == 'spaceform':
        chart = space_form(float(params['k']))
    else:
        chart = perturbed_flat(params['file'])

    errors = chart.validate()
    if errors:
        raise ConfigurationError(f"Chart '{descriptor}' failed validation", errors)
    logger.info(f"Built chart {chart.label}")
    return chart
