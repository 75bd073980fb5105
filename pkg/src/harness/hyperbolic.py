"""
Eigenvalue inequalities for surfaces in hyperbolic space H^3(-kappa^2).

The modified operators D +- (kappa/2) i c(nu) anticommute blockwise with
the intrinsic Dirac operator, so their first nonnegative eigenvalue is
lambda1_pm = sqrt(lambda1^2 + kappa^2). With w = cosh(kappa r), r the
distance from the origin o:

    lambda1_pm int w dSigma <= 1/2 int H0 w dSigma
    int H0 w dSigma >= 4 sqrt(pi/|Sigma| + kappa^2/4) int w dSigma
    lambda1^2 <= 1/4 ((sup H0)^2 - 4 kappa^2)
"""
import logging
from typing import List, Optional

import numpy as np

from config.settings import config
from src.geometry.shapes import ellipsoid, hyperbolic_ellipsoid
from src.geometry.surface import EmbeddedSurface, weighted_mean_curvature_integrals
from src.harness.checks import check_main_upper_bound, check_minkowski, surface_spectrum
from src.harness.records import AGREEMENT, CheckRecord
from src.spectral.solver import DiracSpectrumResult
from src.utils.errors import NumericalError, PreconditionError

logger = logging.getLogger(__name__)

CONTINUATION_FACTOR = 10.0

THEOREMS = ('thm1.7', 'cor1.8', 'ginoux')


def modified_eigenvalue(lambda1: float, kappa: float) -> float:
    """First nonnegative eigenvalue of D +- (kappa/2) i c(nu) on a surface in H^3(-kappa^2)."""
    return float(np.sqrt(lambda1 ** 2 + kappa ** 2))


def hyperbolic_checks(
    surface: EmbeddedSurface,
    kappa: Optional[float] = None,
    spectrum: Optional[DiracSpectrumResult] = None,
    tol: Optional[float] = None,
) -> List[CheckRecord]:
    """
    Records for the weighted upper bound, the Minkowski-type inequality
    and the Ginoux bound.

    Args:
        surface: Surface embedded in hyperbolic space
        kappa: Must match the surface's ambient curvature when given
        spectrum: Precomputed spectrum of the uniformized induced metric
        tol: Relative equality tolerance

    Returns:
        Records named thm1.7, cor1.8 and ginoux

    Raises:
        PreconditionError: Euclidean surface or mismatched kappa
    """
    if not surface.is_hyperbolic:
        raise PreconditionError(f"{surface.label}: hyperbolic checks need a surface in H^3")
    if kappa is not None and not np.isclose(kappa, surface.kappa, rtol=1e-12, atol=0.0):
        raise PreconditionError(f"{surface.label}: kappa={kappa} does not match the ambient {surface.kappa}")
    kappa = surface.kappa
    tol = config.EQUALITY_TOL if tol is None else tol
    label = surface.label

    if spectrum is None:
        try:
            spectrum = surface_spectrum(surface)
        except NumericalError as e:
            logger.error(f"Spectrum of {label} failed: {e}", exc_info=True)
            return [CheckRecord.inconclusive(name, label, str(e)) for name in THEOREMS]

    lambda1 = spectrum.lambda1
    lambda_pm = modified_eigenvalue(lambda1, kappa)
    weight_integral, weighted_mean = weighted_mean_curvature_integrals(surface)
    area = surface.area
    spectral = 'spectral.conformal_dirac_spectrum'
    weighted = 'geometry.weighted_mean_curvature_integrals'

    records = [
        CheckRecord.compare(
            'thm1.7', label, lambda_pm * weight_integral, 0.5 * weighted_mean, tol,
            provenance={'lhs': f'{spectral} x {weighted}', 'rhs': weighted},
            lambda_pm=lambda_pm,
        ),
    ]

    g = surface.geometry(np.linspace(0.0, np.pi, 2001)[1:-1])
    if np.all(g.kappa_meridian * g.kappa_parallel > 0):
        records.append(CheckRecord.compare(
            'cor1.8', label,
            4.0 * np.sqrt(np.pi / area + 0.25 * kappa ** 2) * weight_integral,
            weighted_mean,
            tol,
            provenance={'lhs': 'EmbeddedSurface.area and weighted integrals', 'rhs': weighted},
        ))
    else:
        records.append(CheckRecord.not_applicable(
            'cor1.8', label, 'sectional curvature not bounded below by -kappa^2'
        ))

    records.append(CheckRecord.compare(
        'ginoux', label, lambda1 ** 2, 0.25 * (surface.max_mean_curvature ** 2 - 4.0 * kappa ** 2), tol,
        provenance={'lhs': spectral, 'rhs': 'EmbeddedSurface.max_mean_curvature'},
    ))
    logger.info(f"Hyperbolic checks on {label}: " + ', '.join(f"{r.theorem}={r.verdict}" for r in records))
    return records


def kappa_continuation(a: float, c: float, kappa: float, tol: Optional[float] = None) -> List[CheckRecord]:
    """
    Compare the hyperbolic records of a spheroid with its Euclidean counterpart.

    Normalized slacks of the weighted upper bound and the Minkowski-type
    inequality must approach those of the Euclidean upper bound and
    Minkowski inequality within CONTINUATION_FACTOR kappa^2.
    """
    tol = config.EQUALITY_TOL if tol is None else tol
    curved = hyperbolic_ellipsoid(a, c, kappa)
    flat = ellipsoid(a, c)
    hyperbolic = {record.theorem: record for record in hyperbolic_checks(curved, tol=tol)}
    euclidean_bound = check_main_upper_bound(flat, tol=tol)
    minkowski = check_minkowski(flat, tol=tol)

    weight_integral, _ = weighted_mean_curvature_integrals(curved)
    threshold = CONTINUATION_FACTOR * kappa ** 2 + tol
    label = f"{curved.label}~{flat.label}"
    pairs = [
        ('thm1.7-limit', hyperbolic['thm1.7'], weight_integral, euclidean_bound, 1.0),
        ('cor1.8-limit', hyperbolic['cor1.8'], weight_integral, minkowski, flat.area),
    ]

    records = []
    for theorem, curved_record, curved_scale, flat_record, flat_scale in pairs:
        if not curved_record.applicable:
            records.append(CheckRecord.not_applicable(theorem, label, curved_record.failure))
            continue
        if curved_record.failure or flat_record.failure:
            records.append(CheckRecord.inconclusive(theorem, label, curved_record.failure or flat_record.failure))
            continue
        records.append(CheckRecord.compare(
            theorem, label,
            curved_record.slack / curved_scale,
            flat_record.slack / flat_scale,
            threshold,
            provenance={'lhs': f'hyperbolic {curved_record.theorem}', 'rhs': f'euclidean {flat_record.theorem}'},
            kind=AGREEMENT,
            relative=False,
        ))
    return records
