"""Axisymmetric surfaces in Euclidean and hyperbolic space."""
from .shapes import make_surface
from .surface import EmbeddedSurface, total_mean_curvature, weighted_mean_curvature_integrals
from .uniformize import UniformizationResult, uniformize_axisymmetric

__all__ = [
    'make_surface',
    'EmbeddedSurface',
    'total_mean_curvature',
    'weighted_mean_curvature_integrals',
    'UniformizationResult',
    'uniformize_axisymmetric',
]
