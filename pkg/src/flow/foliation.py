"""
Parallel (equidistant) foliation of the exterior of a convex surface in R^3.

The surface at distance rho from the base is parametrized by its foot point
on the base. In the meridian/parallel principal frame the induced metric is

    f_rho^2 dtheta^2 + h_rho^2 dphi^2,  f_rho = f (1 + rho k_m),  h_rho = h (1 + rho k_p),

with principal curvatures k_i / (1 + rho k_i).
"""
import logging
from typing import NamedTuple

import numpy as np
from numpy.polynomial import chebyshev

from src.geometry.surface import EmbeddedSurface, profile_curvatures
from src.utils.errors import GeometryError, PreconditionError

logger = logging.getLogger(__name__)

SERIES_DEGREE = 128


class ParallelGeometry(NamedTuple):
    """Geometry of the parallel surface at offset rho, sampled along the meridian."""

    rho: np.ndarray
    theta: np.ndarray
    f: np.ndarray
    eta: np.ndarray           # h_rho / sin(theta)
    kappa_meridian: np.ndarray
    kappa_parallel: np.ndarray

    @property
    def h(self) -> np.ndarray:
        return self.eta * np.sin(self.theta)

    @property
    def mean_curvature(self) -> np.ndarray:
        return self.kappa_meridian + self.kappa_parallel

    @property
    def gauss_curvature(self) -> np.ndarray:
        return self.kappa_meridian * self.kappa_parallel


class ExteriorFoliation:
    """Parallel surfaces Sigma_rho of a convex axisymmetric Euclidean surface."""

    def __init__(self, base: EmbeddedSurface):
        if base.is_hyperbolic:
            raise PreconditionError("The quasi-spherical construction runs in Euclidean space only")
        if not base.is_convex():
            raise GeometryError(f"{base.label}: base surface must be convex (focal points otherwise)")
        self.base = base

        def field(name):
            return chebyshev.Chebyshev.interpolate(
                lambda t: getattr(base.geometry(t), name), SERIES_DEGREE, domain=[0.0, np.pi]
            )

        self._f = field('f')
        self._eta = field('warp')
        self._kappa_meridian = field('kappa_meridian')
        self._kappa_parallel = field('kappa_parallel')
        logger.debug(f"Built exterior foliation of {base.label}")

    @property
    def label(self) -> str:
        return self.base.label

    @property
    def diameter(self) -> float:
        return self.base.diameter

    def at(self, rho, theta: np.ndarray) -> ParallelGeometry:
        """
        Geometry of Sigma_rho at foot-point angles theta (poles included).

        rho may be an array broadcasting against theta; small negative offsets
        give the inner parallel surfaces.
        """
        theta = np.asarray(theta, dtype=float)
        rho = np.asarray(rho, dtype=float)
        k_m, k_p = self._kappa_meridian(theta), self._kappa_parallel(theta)
        stretch_m, stretch_p = 1.0 + rho * k_m, 1.0 + rho * k_p
        if np.min(stretch_m) <= 0 or np.min(stretch_p) <= 0:
            raise GeometryError(f"{self.label}: offset reaches a focal point")
        return ParallelGeometry(
            rho=rho,
            theta=theta,
            f=self._f(theta) * stretch_m,
            eta=self._eta(theta) * stretch_p,
            kappa_meridian=k_m / stretch_m,
            kappa_parallel=k_p / stretch_p,
        )

    def direct_offset_curvatures(self, rho: float, theta: np.ndarray):
        """
        Principal curvatures of Sigma_rho computed from the offset generating curve.

        Returns:
            (kappa_meridian, kappa_parallel)
        """
        radial = self.base.radial
        d_radial = radial.deriv()

        def offset(t):
            R, dR = radial(t), d_radial(t)
            rho_ax, z = R * np.sin(t), R * np.cos(t)
            d_rho_ax = dR * np.sin(t) + R * np.cos(t)
            d_z = dR * np.cos(t) - R * np.sin(t)
            speed = np.hypot(d_rho_ax, d_z)
            return rho_ax - rho * d_z / speed, z + rho * d_rho_ax / speed

        curve_rho = chebyshev.Chebyshev.interpolate(lambda t: offset(t)[0], SERIES_DEGREE, domain=[0.0, np.pi])
        curve_z = chebyshev.Chebyshev.interpolate(lambda t: offset(t)[1], SERIES_DEGREE, domain=[0.0, np.pi])
        theta = np.asarray(theta, dtype=float)
        _, k_m, k_p = profile_curvatures(
            curve_rho(theta), curve_z(theta),
            curve_rho.deriv()(theta), curve_z.deriv()(theta),
            curve_rho.deriv(2)(theta), curve_z.deriv(2)(theta),
        )
        return k_m, k_p
