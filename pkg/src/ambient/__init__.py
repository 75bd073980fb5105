"""
Ambient 3-manifold charts, curvature invariants and sampled spheres.
"""
from .charts import AmbientChart, make_chart
from .curvature import CurvatureInvariants, curvature_at
from .spheres import GeodesicSphereSample, coordinate_sphere, geodesic_sphere

__all__ = [
    'AmbientChart',
    'make_chart',
    'CurvatureInvariants',
    'curvature_at',
    'GeodesicSphereSample',
    'coordinate_sphere',
    'geodesic_sphere',
]
