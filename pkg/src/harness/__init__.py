"""Quantitative checks of the eigenvalue inequalities and expansions."""
from .checks import (
    check_bar_and_hijazi,
    check_dual_solver,
    check_eigenvalue_chain,
    check_main_upper_bound,
    check_minkowski,
)
from .expansions import (
    check_hmz_integral_improvement,
    check_hmz_pointwise,
    large_sphere_mass_recovery,
    small_sphere_area_fit,
    small_sphere_expansion,
)
from .hyperbolic import hyperbolic_checks, kappa_continuation
from .records import CheckRecord, ExpansionFit
from .sweeps import property_sweep

__all__ = [
    'check_bar_and_hijazi',
    'check_dual_solver',
    'check_eigenvalue_chain',
    'check_main_upper_bound',
    'check_minkowski',
    'check_hmz_integral_improvement',
    'check_hmz_pointwise',
    'large_sphere_mass_recovery',
    'small_sphere_area_fit',
    'small_sphere_expansion',
    'hyperbolic_checks',
    'kappa_continuation',
    'CheckRecord',
    'ExpansionFit',
    'property_sweep',
]
