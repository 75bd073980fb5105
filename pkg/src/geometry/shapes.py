"""
Named shapes and profile files turned into EmbeddedSurface objects.
"""
import logging
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from src.geometry.surface import EmbeddedSurface
from src.utils.errors import ArtifactError, ConfigurationError, GeometryError
from src.utils.validators import parse_descriptor, validate_shape_descriptor

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-6


def ellipsoid_radius(a: float, c: float):
    """R(theta) of the spheroid rho^2/a^2 + z^2/c^2 = 1 (polar semi-axis c)."""
    def radius(theta):
        return 1.0 / np.sqrt(np.sin(theta) ** 2 / a ** 2 + np.cos(theta) ** 2 / c ** 2)
    return radius


def sphere(r: float) -> EmbeddedSurface:
    return EmbeddedSurface.from_radial_function(
        lambda theta: np.full_like(np.asarray(theta, float), r), label=f"sphere:r={r:g}"
    )


def ellipsoid(a: float, c: float) -> EmbeddedSurface:
    return EmbeddedSurface.from_radial_function(
        ellipsoid_radius(a, c), label=f"ellipsoid:a={a:g},c={c:g}"
    )


def hyperbolic_geodesic_sphere(r: float, kappa: float = 1.0) -> EmbeddedSurface:
    return EmbeddedSurface.from_radial_function(
        lambda theta: np.full_like(np.asarray(theta, float), r),
        kappa=kappa,
        label=f"hyp-geodesic-sphere:r={r:g},kappa={kappa:g}",
    )


def hyperbolic_ellipsoid(a: float, c: float, kappa: float = 1.0) -> EmbeddedSurface:
    """Spheroidal radial graph in geodesic polar coordinates about the origin."""
    return EmbeddedSurface.from_radial_function(
        ellipsoid_radius(a, c),
        kappa=kappa,
        label=f"hyp-ellipsoid:a={a:g},c={c:g},kappa={kappa:g}",
    )


def surface_from_profile(z: np.ndarray, rho: np.ndarray, label: str = "profile") -> EmbeddedSurface:
    """
    Build a Euclidean surface from samples of its generating curve.

    The curve must start and end on the axis and be star-shaped about the
    midpoint of its axial extent; it is resampled as a radial graph.

    Args:
        z: Axial coordinates
        rho: Distances from the axis (nonnegative)
        label: Name carried into reports
    """
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if z.shape != rho.shape or z.size < 8:
        raise GeometryError(f"{label}: need matching z/rho columns with at least 8 samples")
    if np.any(rho < 0):
        raise GeometryError(f"{label}: negative distance from the axis")

    scale = np.ptp(z)
    if rho[0] > POLE_TOLERANCE * scale or rho[-1] > POLE_TOLERANCE * scale:
        raise GeometryError(f"{label}: profile is not closed (endpoints off the axis)")

    center = 0.5 * (z.max() + z.min())
    if z[0] < z[-1]:
        z, rho = z[::-1], rho[::-1]
    theta = np.arctan2(rho, z - center)
    radius = np.hypot(rho, z - center)
    if np.any(np.diff(theta) <= 0):
        raise GeometryError(f"{label}: profile self-intersects or is not star-shaped about its center")

    spline = CubicSpline(theta, radius, bc_type='clamped')
    surface = EmbeddedSurface.from_radial_function(spline, label=label)
    logger.info(f"Resampled profile {label} from {z.size} points")
    return surface


def load_profile(path) -> EmbeddedSurface:
    """Two-column (z, rho) text file, '#' comments allowed."""
    path = Path(path)
    try:
        data = np.loadtxt(path, dtype=float, ndmin=2)
    except OSError as e:
        raise ArtifactError(f"Cannot read profile {path}: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"Malformed profile file {path}: {e}") from e
    if data.shape[1] != 2:
        raise ConfigurationError(f"Profile {path} must have exactly two columns (z, rho)")
    return surface_from_profile(data[:, 0], data[:, 1], label=path.stem)


def make_surface(descriptor: str) -> EmbeddedSurface:
    """
    Build a surface from a shape descriptor.

    Args:
        descriptor: ``sphere:r=1``, ``ellipsoid:a=1,c=1.2``,
            ``hyp-geodesic-sphere:r=0.8,kappa=1``,
            ``hyp-ellipsoid:a=1,c=1.2,kappa=1`` or ``profile:file=path``

    Returns:
        Fully populated EmbeddedSurface
    """
    errors = validate_shape_descriptor(descriptor)
    if errors:
        raise ConfigurationError(f"Invalid shape descriptor '{descriptor}'", errors)

    kind, params = parse_descriptor(descriptor)
    if kind == 'profile':
        return load_profile(params['file'])

    values = {key: float(value) for key, value in params.items()}
    if kind == 'sphere':
        return sphere(values['r'])
    if kind == 'ellipsoid':
        return ellipsoid(values['a'], values['c'])
    if kind == 'hyp-geodesic-sphere':
        return hyperbolic_geodesic_sphere(values['r'], values.get('kappa', 1.0))
    return hyperbolic_ellipsoid(values['a'], values['c'], values.get('kappa', 1.0))
