"""
Axisymmetric surfaces in Euclidean and hyperbolic space.

Every surface is stored as a radial graph r = R(theta) in geodesic polar
coordinates about the origin, where the ambient metric reads
dr^2 + S(r)^2 g_round with S(r) = r (Euclidean) or sinh(kappa r)/kappa
(hyperbolic space of curvature -kappa^2). R is held as a Chebyshev series on
[0, pi], so all derivatives are spectral.

Mean curvature is the sum of principal curvatures for the outward normal
(2/r on a round sphere of radius r).
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Tuple

import numpy as np
from numpy.polynomial import chebyshev, legendre

from src.utils.errors import GeometryError, PreconditionError

logger = logging.getLogger(__name__)

CHEBYSHEV_DEGREE = 128
QUADRATURE_NODES = 160


class SurfaceGeometry(NamedTuple):
    """Pointwise geometry along the generating meridian."""

    theta: np.ndarray
    radius: np.ndarray
    warp: np.ndarray          # S(R): radius of the parallel circle over sin(theta)
    f: np.ndarray             # meridian speed, induced metric f^2 dtheta^2 + h^2 dphi^2
    h: np.ndarray
    kappa_meridian: np.ndarray
    kappa_parallel: np.ndarray

    @property
    def mean_curvature(self) -> np.ndarray:
        return self.kappa_meridian + self.kappa_parallel

    @property
    def stretch(self) -> np.ndarray:
        """f / S(R), the deviation of the meridian from a geodesic polar ray."""
        return self.f / self.warp


def profile_curvatures(
    rho: np.ndarray,
    z: np.ndarray,
    d_rho: np.ndarray,
    d_z: np.ndarray,
    dd_rho: np.ndarray,
    dd_z: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Principal curvatures of the surface of revolution traced by (rho(t), z(t)).

    The curve runs from the north pole (rho = 0, z max) to the south pole with
    any regular parametrization t.

    Returns:
        (speed, kappa_meridian, kappa_parallel)
    """
    speed = np.hypot(d_rho, d_z)
    kappa_meridian = (dd_rho * d_z - d_rho * dd_z) / speed ** 3
    kappa_parallel = -d_z / (rho * speed)
    return speed, kappa_meridian, kappa_parallel


@dataclass(frozen=True)
class EmbeddedSurface:
    """Radial graph r = R(theta) in Euclidean (kappa = 0) or hyperbolic space."""

    radial: chebyshev.Chebyshev
    kappa: float = 0.0
    label: str = "surface"
    n_nodes: int = QUADRATURE_NODES

    @classmethod
    def from_radial_function(
        cls,
        radial: Callable[[np.ndarray], np.ndarray],
        kappa: float = 0.0,
        label: str = "surface",
        degree: int = CHEBYSHEV_DEGREE,
    ) -> 'EmbeddedSurface':
        """Interpolate R(theta) at Chebyshev points of [0, pi]."""
        if kappa < 0:
            raise PreconditionError("kappa must be nonnegative")
        series = chebyshev.Chebyshev.interpolate(radial, degree, domain=[0.0, np.pi])
        surface = cls(radial=series, kappa=float(kappa), label=label)
        surface.validate()
        return surface

    # Ambient warping function

    @property
    def ambient_kind(self) -> str:
        return 'hyperbolic' if self.kappa > 0 else 'euclidean'

    @property
    def is_hyperbolic(self) -> bool:
        return self.kappa > 0

    def warp(self, r: np.ndarray) -> np.ndarray:
        if self.kappa == 0:
            return np.asarray(r, dtype=float)
        return np.sinh(self.kappa * r) / self.kappa

    def warp_derivative(self, r: np.ndarray) -> np.ndarray:
        if self.kappa == 0:
            return np.ones_like(np.asarray(r, dtype=float))
        return np.cosh(self.kappa * r)

    # Pointwise geometry

    @cached_property
    def _derivatives(self):
        first = self.radial.deriv()
        return first, first.deriv()

    def geometry(self, theta: np.ndarray) -> SurfaceGeometry:
        """Induced metric and principal curvatures at the given polar angles."""
        theta = np.asarray(theta, dtype=float)
        first, second = self._derivatives
        R, dR, ddR = self.radial(theta), first(theta), second(theta)
        S, dS = self.warp(R), self.warp_derivative(R)
        sin_t, cos_t = np.sin(theta), np.cos(theta)

        W = np.sqrt(1.0 + (dR / S) ** 2)
        f = S * W
        h = S * sin_t
        mean = (
            2.0 * dS / (S * W)
            + dR ** 2 * dS / (S ** 3 * W ** 3)
            - (cos_t * dR / W + sin_t * ddR / W - sin_t * dR ** 2 * ddR / (S ** 2 * W ** 3))
            / (S ** 2 * sin_t)
        )
        parallel = dS / (S * W) - cos_t * dR / (sin_t * S ** 2 * W)
        return SurfaceGeometry(
            theta=theta, radius=R, warp=S, f=f, h=h,
            kappa_meridian=mean - parallel, kappa_parallel=parallel,
        )

    @cached_property
    def quadrature(self) -> Tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes theta_i and weights for integrals in cos(theta)."""
        x, w = legendre.leggauss(self.n_nodes)
        return np.arccos(x), w

    @cached_property
    def nodes(self) -> SurfaceGeometry:
        return self.geometry(self.quadrature[0])

    def integrate(self, density: np.ndarray) -> float:
        """Integral over the surface of a density sampled at ``nodes``."""
        weights = self.quadrature[1]
        g = self.nodes
        return float(2.0 * np.pi * np.sum(weights * density * g.f * g.warp))

    # Global quantities

    @cached_property
    def area(self) -> float:
        return self.integrate(np.ones(self.n_nodes))

    @cached_property
    def total_mean_curvature(self) -> float:
        return self.integrate(self.nodes.mean_curvature)

    @cached_property
    def mean_curvature_squared_integral(self) -> float:
        return self.integrate(self.nodes.mean_curvature ** 2)

    @cached_property
    def gauss_curvature_integral(self) -> float:
        """Integral of the intrinsic curvature k1 k2 - kappa^2 (Gauss equation)."""
        g = self.nodes
        return self.integrate(g.kappa_meridian * g.kappa_parallel - self.kappa ** 2)

    @cached_property
    def max_mean_curvature(self) -> float:
        theta = np.linspace(0.0, np.pi, 2001)[1:-1]
        return float(np.max(self.geometry(theta).mean_curvature))

    def is_convex(self, samples: int = 2001) -> bool:
        theta = np.linspace(0.0, np.pi, samples)[1:-1]
        g = self.geometry(theta)
        return bool(np.all(g.kappa_meridian > 0) and np.all(g.kappa_parallel > 0))

    def distance_weight(self, theta: np.ndarray) -> np.ndarray:
        """cosh(kappa r) with r the distance from o on the hyperboloid; 1 in Euclidean space."""
        theta = np.asarray(theta, dtype=float)
        if not self.is_hyperbolic:
            return np.ones_like(theta)
        r = self.distance_from_origin(self.hyperboloid_points(theta, np.zeros_like(theta)))
        return np.cosh(self.kappa * r)

    @cached_property
    def diameter(self) -> float:
        """Largest distance between two points (Euclidean model coordinates)."""
        theta = np.linspace(0.0, np.pi, 401)
        R = self.radial(theta)
        rho, z = R * np.sin(theta), R * np.cos(theta)
        across = np.hypot(rho[:, None] + rho[None, :], z[:, None] - z[None, :])
        return float(across.max())

    # Hyperboloid model

    def hyperboloid_points(self, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """
        Points X in Minkowski space R^{3,1} with <X, X> = -1/kappa^2.

        Returns:
            Array (..., 4) with the time coordinate last
        """
        if not self.is_hyperbolic:
            raise PreconditionError("Hyperboloid model needs a hyperbolic surface")
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        R = self.radial(theta)
        S = self.warp(R)
        return np.stack([
            S * np.sin(theta) * np.cos(phi),
            S * np.sin(theta) * np.sin(phi),
            S * np.cos(theta),
            np.cosh(self.kappa * R) / self.kappa,
        ], axis=-1)

    def distance_from_origin(self, points: np.ndarray) -> np.ndarray:
        """Geodesic distance from o = (0, 0, 0, 1/kappa) via the Lorentz product."""
        origin_time = 1.0 / self.kappa
        lorentz = points[..., 3] * origin_time
        return np.arccosh(np.maximum(self.kappa ** 2 * lorentz, 1.0)) / self.kappa

    # Derived surfaces

    def scaled(self, factor: float) -> 'EmbeddedSurface':
        """Euclidean homothety by ``factor``."""
        if self.is_hyperbolic:
            raise PreconditionError("Scaling is only an ambient symmetry in Euclidean space")
        return EmbeddedSurface(radial=self.radial * factor, kappa=0.0,
                               label=f"{self.label}|scale:{factor:g}", n_nodes=self.n_nodes)

    def validate(self):
        """Raise GeometryError unless the surface is a smooth closed radial graph."""
        theta = np.linspace(0.0, np.pi, 1001)
        R = self.radial(theta)
        if not np.all(np.isfinite(R)) or np.min(R) <= 0:
            raise GeometryError(f"{self.label}: radial function must be positive and finite")
        slope = self.radial.deriv()
        if abs(slope(0.0)) > 1e-3 * np.max(R) or abs(slope(np.pi)) > 1e-3 * np.max(R):
            raise GeometryError(f"{self.label}: profile does not close smoothly at the poles")


def total_mean_curvature(surface: EmbeddedSurface) -> float:
    """Integral of H0 over the surface."""
    return surface.total_mean_curvature


def weighted_mean_curvature_integrals(surface: EmbeddedSurface) -> Tuple[float, float]:
    """
    Distance-weighted integrals for surfaces in hyperbolic space.

    Returns:
        (integral of cosh(kappa r) dSigma, integral of H0 cosh(kappa r) dSigma)
    """
    if not surface.is_hyperbolic:
        raise PreconditionError("Weighted integrals are defined for hyperbolic surfaces only")
    g = surface.nodes
    weight = surface.distance_weight(g.theta)
    return surface.integrate(weight), surface.integrate(weight * g.mean_curvature)
