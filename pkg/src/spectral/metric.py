"""
Conformal metrics e^{2u} * g_round on the 2-sphere.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev, legendre

from src.spectral.basis import SphereGrid, make_grid
from src.utils.errors import NumericalError, PreconditionError

logger = logging.getLogger(__name__)

Exponent = Callable[[np.ndarray, np.ndarray], np.ndarray]

# Resolution used for derived quantities (area, curvature, Gauss-Bonnet)
DERIVED_NODES = 96
FD_STEP = 1e-2


def _rotate_points(rotation: np.ndarray, theta: np.ndarray, phi: np.ndarray):
    """Apply the transpose of ``rotation`` to unit vectors given in polar form."""
    sin_t = np.sin(theta)
    points = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta)])
    moved = np.tensordot(rotation.T, points, axes=1)
    new_theta = np.arccos(np.clip(moved[2], -1.0, 1.0))
    new_phi = np.arctan2(moved[1], moved[0])
    return new_theta, new_phi


@dataclass(frozen=True)
class ConformalSphereMetric:
    """
    The metric e^{2u} g_round with u given as a callable u(theta, phi).

    Axisymmetric metrics ignore phi; their exponent is still called with a
    (zero) phi argument so every exponent has the same signature.
    """

    exponent: Exponent
    axisymmetric: bool = False
    label: str = "metric"
    _meta: dict = field(default_factory=dict, compare=False, repr=False)

    # Construction

    @classmethod
    def constant(cls, value: float, label: Optional[str] = None) -> 'ConformalSphereMetric':
        """u identically equal to ``value`` (round sphere of radius e^value)."""
        value = float(value)
        return cls(
            exponent=lambda theta, phi: np.full(np.broadcast(theta, phi).shape, value),
            axisymmetric=True,
            label=label or f"const:{value:.12g}",
            _meta={'constant': value},
        )

    @classmethod
    def round_sphere(cls, radius: float) -> 'ConformalSphereMetric':
        if radius <= 0:
            raise PreconditionError(f"Radius must be positive, got {radius}")
        return cls.constant(np.log(radius), label=f"round:r={radius:g}")

    @classmethod
    def from_profile(cls, profile: Callable[[np.ndarray], np.ndarray], label: str = "profile") -> 'ConformalSphereMetric':
        """Axisymmetric metric from a function u(theta)."""
        return cls(
            exponent=lambda theta, phi: np.asarray(profile(theta + 0.0 * phi), dtype=float),
            axisymmetric=True,
            label=label,
        )

    @classmethod
    def from_legendre(cls, coefficients, label: str = "legendre") -> 'ConformalSphereMetric':
        """Axisymmetric metric u = sum_l a_l P_l(cos theta)."""
        coefficients = np.asarray(coefficients, dtype=float)
        return cls(
            exponent=lambda theta, phi: legendre.legval(np.cos(theta + 0.0 * phi), coefficients),
            axisymmetric=True,
            label=label,
        )

    @classmethod
    def from_samples(cls, values: np.ndarray, label: str = "samples") -> 'ConformalSphereMetric':
        """
        Interpolate nodal samples given on a Gauss-Legendre x uniform-azimuth grid.

        Args:
            values: Array (n_theta,) or (n_theta, n_phi), rows ordered by the
                ascending Gauss-Legendre nodes in cos(theta)
            label: Name carried into reports

        Returns:
            Interpolating metric; axisymmetric when n_phi == 1
        """
        values = np.asarray(values, dtype=float)
        if values.ndim == 2 and values.shape[1] == 1:
            values = values[:, 0]
        if not np.all(np.isfinite(values)):
            raise NumericalError("Conformal exponent samples contain non-finite values")

        n_theta = values.shape[0]
        x, w = legendre.leggauss(n_theta)
        projector = (
            legendre.legvander(x, n_theta - 1).T * w[None, :]
        ) * ((2 * np.arange(n_theta) + 1) / 2.0)[:, None]

        if values.ndim == 1:
            return cls.from_legendre(projector @ values, label=label)

        n_phi = values.shape[1]
        fourier = np.fft.rfft(values, axis=1) / n_phi
        multiplicity = np.full(fourier.shape[1], 2.0)
        multiplicity[0] = 1.0
        if n_phi % 2 == 0:
            multiplicity[-1] = 1.0
        coefficients = projector @ fourier
        wavenumbers = np.arange(fourier.shape[1])

        def exponent(theta, phi):
            theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
            flat_t, flat_p = theta.ravel(), phi.ravel()
            radial = legendre.legvander(np.cos(flat_t), n_theta - 1) @ coefficients
            phase = np.exp(1j * np.outer(flat_p, wavenumbers))
            result = np.real(radial * phase) @ multiplicity
            return result.reshape(theta.shape)

        return cls(exponent=exponent, axisymmetric=False, label=label)

    # Transformations

    def rotated(self, rotation: np.ndarray) -> 'ConformalSphereMetric':
        """Pull back by the rotation omega -> rotation @ omega (an isometry of the round sphere)."""
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (3, 3) or not np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-12):
            raise PreconditionError("Rotation must be an orthogonal 3x3 matrix")
        source = self

        def exponent(theta, phi):
            theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
            new_theta, new_phi = _rotate_points(rotation, theta, phi)
            return source.values(new_theta, new_phi)

        return ConformalSphereMetric(exponent=exponent, axisymmetric=False, label=f"{self.label}|rot")

    def boosted(self, t: float) -> 'ConformalSphereMetric':
        """
        Re-gauge by the Moebius dilation z -> e^t z of the stereographic coordinate.

        The result is isometric to this metric, so the Dirac spectrum is unchanged.
        """
        source = self
        scale = np.exp(t)

        def exponent(theta, phi):
            theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
            c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
            new_theta = 2.0 * np.arctan2(scale * s, c)
            stretch = scale / (c * c + scale * scale * s * s)
            return source.values(new_theta, phi) + np.log(stretch)

        return ConformalSphereMetric(
            exponent=exponent, axisymmetric=self.axisymmetric, label=f"{self.label}|boost:{t:g}"
        )

    def scaled(self, factor: float) -> 'ConformalSphereMetric':
        """Metric scaled by factor^2 (lengths by factor)."""
        if factor <= 0:
            raise PreconditionError(f"Scale factor must be positive, got {factor}")
        source = self
        shift = np.log(factor)
        return ConformalSphereMetric(
            exponent=lambda theta, phi: source.values(theta, phi) + shift,
            axisymmetric=self.axisymmetric,
            label=f"{self.label}|scale:{factor:g}",
        )

    # Evaluation

    @property
    def is_constant(self) -> bool:
        return 'constant' in self._meta

    def values(self, theta, phi=None) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phi = np.zeros_like(theta) if phi is None else np.asarray(phi, dtype=float)
        return np.asarray(self.exponent(theta, phi), dtype=float)

    def sample(self, grid: SphereGrid) -> np.ndarray:
        """u on a quadrature grid: (n_theta,) when axisymmetric, else (n_theta, n_phi)."""
        if self.axisymmetric:
            return self.values(grid.theta)
        theta, phi = np.meshgrid(grid.theta, grid.phi, indexing='ij')
        return self.values(theta, phi)

    def _derived_grid(self, n_theta: int) -> SphereGrid:
        return make_grid(n_theta, 1 if self.axisymmetric else 2 * n_theta)

    def area(self, n_theta: int = DERIVED_NODES) -> float:
        """|Sigma| = integral of e^{2u} dA_round."""
        grid = self._derived_grid(n_theta)
        area = grid.integrate(np.exp(2.0 * self.sample(grid)))
        if not np.isfinite(area) or area <= 0:
            raise NumericalError(f"Metric {self.label} has invalid area {area}")
        return area

    def laplacian_exponent(self, theta, phi=None) -> np.ndarray:
        """Round Laplacian of u."""
        theta = np.asarray(theta, dtype=float)
        if self.axisymmetric:
            series = chebyshev.Chebyshev.interpolate(
                lambda t: self.values(t), DERIVED_NODES, domain=[0.0, np.pi]
            )
            first = series.deriv()
            return first.deriv()(theta) + first(theta) / np.tan(theta)

        phi = np.zeros_like(theta) if phi is None else np.asarray(phi, dtype=float)
        h = FD_STEP
        u0 = self.values(theta, phi)
        ut = [self.values(theta + k * h, phi) for k in (-2, -1, 1, 2)]
        up = [self.values(theta, phi + k * h) for k in (-2, -1, 1, 2)]
        d_theta = (ut[0] - 8 * ut[1] + 8 * ut[2] - ut[3]) / (12 * h)
        d2_theta = (-ut[0] + 16 * ut[1] - 30 * u0 + 16 * ut[2] - ut[3]) / (12 * h * h)
        d2_phi = (-up[0] + 16 * up[1] - 30 * u0 + 16 * up[2] - up[3]) / (12 * h * h)
        sin_t = np.sin(theta)
        return d2_theta + d_theta * np.cos(theta) / sin_t + d2_phi / sin_t ** 2

    def gauss_curvature(self, theta, phi=None) -> np.ndarray:
        """K = e^{-2u} (1 - Laplacian u)."""
        return np.exp(-2.0 * self.values(theta, phi)) * (1.0 - self.laplacian_exponent(theta, phi))

    def gauss_bonnet_integral(self, n_theta: int = DERIVED_NODES) -> float:
        """Integral of K dSigma; 4*pi for every smooth metric on the sphere."""
        grid = self._derived_grid(n_theta)
        if self.axisymmetric:
            theta = grid.theta
            density = self.gauss_curvature(theta) * np.exp(2.0 * self.values(theta))
        else:
            theta, phi = np.meshgrid(grid.theta, grid.phi, indexing='ij')
            density = self.gauss_curvature(theta, phi) * np.exp(2.0 * self.values(theta, phi))
        return grid.integrate(density)
