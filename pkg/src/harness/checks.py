"""
Eigenvalue inequalities on closed surfaces.

    Bar-Hijazi    2 sqrt(pi/|Sigma|) <= lambda1
    upper bound   lambda1 <= int H0 / (2 |Sigma|)
    Bar           lambda1 <= sqrt(int H0^2 / (4 |Sigma|))
    Minkowski     4 sqrt(pi |Sigma|) <= int H0
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, Union

import numpy as np

from config.settings import config
from src.geometry.surface import EmbeddedSurface
from src.geometry.uniformize import uniformize_axisymmetric
from src.harness.records import AGREEMENT, CheckRecord
from src.spectral.metric import ConformalSphereMetric
from src.spectral.shooting import shoot_block_eigenvalue
from src.spectral.solver import DiracSpectrumResult, axisymmetric_mode_spectrum, conformal_dirac_spectrum
from src.utils.errors import NumericalError, PreconditionError

logger = logging.getLogger(__name__)

SPECTRUM_SOURCE = 'spectral.conformal_dirac_spectrum'
SURFACE_SOURCE = 'geometry.EmbeddedSurface'
DUAL_SOLVER_TOL = 1e-6

Subject = Union[EmbeddedSurface, ConformalSphereMetric]


def surface_spectrum(surface: EmbeddedSurface) -> DiracSpectrumResult:
    """Dirac spectrum of the induced metric of an axisymmetric surface."""
    return conformal_dirac_spectrum(uniformize_axisymmetric(surface).metric)


def _require_euclidean_convex(surface: EmbeddedSurface):
    if surface.is_hyperbolic:
        raise PreconditionError(f"{surface.label}: check needs a Euclidean surface")
    if not surface.is_convex():
        raise PreconditionError(f"{surface.label}: check needs a convex surface")


def _spectrum_or_failure(subject: Subject, spectrum: Optional[DiracSpectrumResult]):
    """(spectrum, None) or (None, reason) when the solver fails."""
    if spectrum is not None:
        return spectrum, None
    try:
        if isinstance(subject, EmbeddedSurface):
            return surface_spectrum(subject), None
        return conformal_dirac_spectrum(subject), None
    except NumericalError as e:
        logger.error(f"Spectrum of {subject.label} failed: {e}", exc_info=True)
        return None, str(e)


def check_main_upper_bound(
    surface: EmbeddedSurface,
    spectrum: Optional[DiracSpectrumResult] = None,
    tol: Optional[float] = None,
) -> CheckRecord:
    """
    lambda1 <= int H0 dSigma / (2 |Sigma|) for a convex Euclidean surface.

    Round spheres come out as equality. A spectral failure gives an
    inconclusive record.
    """
    _require_euclidean_convex(surface)
    tol = config.EQUALITY_TOL if tol is None else tol
    spectrum, failure = _spectrum_or_failure(surface, spectrum)
    if failure:
        return CheckRecord.inconclusive('thm1.1', surface.label, failure)
    return CheckRecord.compare(
        'thm1.1', surface.label,
        spectrum.lambda1,
        surface.total_mean_curvature / (2.0 * surface.area),
        tol,
        provenance={'lhs': SPECTRUM_SOURCE, 'rhs': f'{SURFACE_SOURCE}.total_mean_curvature'},
        truncation_degree=spectrum.truncation_degree,
    )


def check_bar_and_hijazi(
    subject: Subject,
    spectrum: Optional[DiracSpectrumResult] = None,
    tol: Optional[float] = None,
) -> Tuple[CheckRecord, CheckRecord]:
    """
    Bar upper bound and Bar-Hijazi lower bound.

    Args:
        subject: An embedded surface or an abstract conformal metric; the
            upper bound needs a mean curvature and is not applicable to the latter
        spectrum: Precomputed spectrum of ``subject``
        tol: Relative equality tolerance

    Returns:
        (bar, bar_hijazi)
    """
    tol = config.EQUALITY_TOL if tol is None else tol
    label = subject.label
    spectrum, failure = _spectrum_or_failure(subject, spectrum)
    if failure:
        return (CheckRecord.inconclusive('bar', label, failure),
                CheckRecord.inconclusive('bar-hijazi', label, failure))

    lambda1 = spectrum.lambda1
    embedded = isinstance(subject, EmbeddedSurface)
    area = subject.area if embedded else subject.area()

    if embedded:
        bar = CheckRecord.compare(
            'bar', label, lambda1,
            np.sqrt(subject.mean_curvature_squared_integral / (4.0 * area)),
            tol,
            provenance={'lhs': SPECTRUM_SOURCE, 'rhs': f'{SURFACE_SOURCE}.mean_curvature_squared_integral'},
        )
    else:
        bar = CheckRecord.not_applicable('bar', label, 'abstract metric has no mean curvature')

    bar_hijazi = CheckRecord.compare(
        'bar-hijazi', label,
        2.0 * np.sqrt(np.pi / area),
        lambda1,
        tol,
        provenance={'lhs': 'area of the induced metric', 'rhs': SPECTRUM_SOURCE},
    )
    return bar, bar_hijazi


def check_minkowski(surface: EmbeddedSurface, tol: Optional[float] = None) -> CheckRecord:
    """int H0 dSigma >= 4 sqrt(pi |Sigma|) for a convex Euclidean surface."""
    _require_euclidean_convex(surface)
    tol = config.EQUALITY_TOL if tol is None else tol
    return CheckRecord.compare(
        'minkowski', surface.label,
        4.0 * np.sqrt(np.pi * surface.area),
        surface.total_mean_curvature,
        tol,
        provenance={'lhs': f'{SURFACE_SOURCE}.area', 'rhs': f'{SURFACE_SOURCE}.total_mean_curvature'},
    )


def check_dual_solver(
    metric: ConformalSphereMetric,
    spectrum: DiracSpectrumResult,
    tol: float = DUAL_SOLVER_TOL,
) -> CheckRecord:
    """
    First positive eigenvalue of the m = 1/2 block: Galerkin at the accepted
    truncation against the shooting solver.
    """
    label = metric.label
    if not metric.axisymmetric:
        return CheckRecord.not_applicable('dual-solver', label, 'shooting needs an axisymmetric metric')
    try:
        block = axisymmetric_mode_spectrum(metric, 0.5, spectrum.truncation_degree)
        galerkin = float(np.min(block[block > 0]))
        shot = shoot_block_eigenvalue(metric, 0.5, lower=0.5 * galerkin, upper=1.5 * galerkin, n_scan=16)
    except NumericalError as e:
        logger.error(f"Dual-solver comparison on {label} failed: {e}", exc_info=True)
        return CheckRecord.inconclusive('dual-solver', label, str(e))
    return CheckRecord.compare(
        'dual-solver', label, shot, galerkin, tol,
        provenance={'lhs': 'spectral.shoot_block_eigenvalue', 'rhs': 'spectral.axisymmetric_mode_spectrum'},
        kind=AGREEMENT,
        truncation_degree=spectrum.truncation_degree,
    )


def check_eigenvalue_chain(
    surface: EmbeddedSurface,
    tol: Optional[float] = None,
    spectrum: Optional[DiracSpectrumResult] = None,
) -> List[CheckRecord]:
    """
    2 sqrt(pi/|Sigma|) <= lambda1 <= int H0/(2|Sigma|) <= sqrt(int H0^2/(4|Sigma|)),
    plus Bar and Minkowski, all from one spectrum.
    """
    _require_euclidean_convex(surface)
    tol = config.EQUALITY_TOL if tol is None else tol
    spectrum, failure = _spectrum_or_failure(surface, spectrum)
    if failure:
        return [CheckRecord.inconclusive(name, surface.label, failure)
                for name in ('bar-hijazi', 'thm1.1', 'cauchy-schwarz', 'bar', 'minkowski')]

    bar, bar_hijazi = check_bar_and_hijazi(surface, spectrum, tol)
    upper = check_main_upper_bound(surface, spectrum, tol)
    area = surface.area
    cauchy_schwarz = CheckRecord.compare(
        'cauchy-schwarz', surface.label,
        surface.total_mean_curvature / (2.0 * area),
        np.sqrt(surface.mean_curvature_squared_integral / (4.0 * area)),
        tol,
        provenance={'lhs': f'{SURFACE_SOURCE}.total_mean_curvature',
                    'rhs': f'{SURFACE_SOURCE}.mean_curvature_squared_integral'},
    )
    return [bar_hijazi, upper, cauchy_schwarz, bar, check_minkowski(surface, tol)]


def run_concurrently(tasks: Iterable[Callable[[], object]], threads: Optional[int] = None) -> List:
    """
    Run independent check tasks and collect their results in task order.

    A task may return one record or a list of records; results are flattened.
    """
    tasks = list(tasks)
    threads = config.THREADS if threads is None else threads
    if threads <= 1 or len(tasks) <= 1:
        results = [task() for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda task: task(), tasks))

    records = []
    for result in results:
        if isinstance(result, (list, tuple)):
            records.extend(result)
        else:
            records.append(result)
    return records
