"""
Galerkin solver for the Dirac spectrum of conformal sphere metrics.

For g = e^{2u} g_round the eigenvalue problem D_g phi = lambda phi is
equivalent to D_round psi = lambda e^{u} psi with psi = e^{u/2} phi, so in the
round eigenbasis it becomes the pencil diag(round eigenvalues) c = lambda M c
with M the e^{u}-weighted mass matrix.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from config.settings import config
from src.spectral.basis import RoundEigenBasis, build_round_basis
from src.spectral.metric import ConformalSphereMetric
from src.utils.errors import (
    ConvergenceError,
    DefinitenessError,
    NumericalError,
    PreconditionError,
    ResolutionError,
)

logger = logging.getLogger(__name__)

ZERO_EIGENVALUE_TOL = 1e-9

Weight = Union[np.ndarray, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass
class DiracSpectrumResult:
    """Sorted Dirac spectrum and truncation diagnostics."""

    eigenvalues: np.ndarray
    lambda1: float
    truncation_degree: int
    convergence_estimate: float
    history: List[Tuple[int, float]] = field(default_factory=list)
    metric_label: str = ""

    @property
    def symmetry_defect(self) -> float:
        """Largest |lambda_i + lambda_{n-1-i}| over the sorted spectrum."""
        values = np.sort(self.eigenvalues)
        return float(np.max(np.abs(values + values[::-1])))

    def to_dict(self) -> dict:
        return {
            'metric': self.metric_label,
            'lambda1': self.lambda1,
            'truncation_degree': self.truncation_degree,
            'convergence_estimate': self.convergence_estimate,
            'n_eigenvalues': int(self.eigenvalues.size),
            'history': [[L, value] for L, value in self.history],
        }


def _weight_samples(f: Weight, basis: RoundEigenBasis) -> np.ndarray:
    grid = basis.grid
    if callable(f):
        theta, phi = np.meshgrid(grid.theta, grid.phi, indexing='ij')
        samples = np.asarray(f(theta, phi), dtype=float)
    else:
        samples = np.asarray(f, dtype=float)

    if samples.ndim == 0:
        samples = np.full(grid.n_theta, float(samples))
    if samples.shape not in ((grid.n_theta,), (grid.n_theta, grid.n_phi)):
        raise ResolutionError(
            f"Weight samples of shape {samples.shape} do not match the "
            f"{grid.n_theta}x{grid.n_phi} quadrature grid"
        )
    if not np.all(np.isfinite(samples)) or np.min(samples) <= 0:
        raise DefinitenessError("Multiplication weight must be finite and strictly positive")
    return samples


def assemble_multiplication_matrix(f: Weight, basis: RoundEigenBasis) -> np.ndarray:
    """
    Mass matrix M[a, b] = <f psi_a, psi_b> under the basis quadrature.

    Args:
        f: Weight samples on the basis grid, shape (n_theta,) for axisymmetric
            weights or (n_theta, n_phi), or a callable f(theta, phi)
        basis: Round eigenbasis

    Returns:
        Hermitian matrix; real and block-diagonal in m for axisymmetric weights
    """
    samples = _weight_samples(f, basis)
    w = basis.grid.weights
    upper, lower = basis.upper, basis.lower

    if samples.ndim == 1:
        matrix = np.zeros((basis.n_modes, basis.n_modes))
        weighted = 2.0 * np.pi * w * samples
        for block in basis.blocks().values():
            matrix[block, block] = (
                (upper[block] * weighted) @ upper[block].T
                + (lower[block] * weighted) @ lower[block].T
            )
        return matrix

    # F[i, k] = (2 pi / n_phi) sum_l f(theta_i, phi_l) e^{i k phi_l}
    n_phi = basis.grid.n_phi
    fourier = 2.0 * np.pi * np.fft.ifft(samples, axis=1)
    blocks = basis.blocks()
    matrix = np.zeros((basis.n_modes, basis.n_modes), dtype=complex)
    for twice_ma, rows in blocks.items():
        for twice_mb, cols in blocks.items():
            shift = (twice_mb - twice_ma) // 2
            weighted = w * fourier[:, shift % n_phi]
            matrix[rows, cols] = (
                (upper[rows] * weighted) @ upper[cols].T
                + (lower[rows] * weighted) @ lower[cols].T
            )
    return matrix


def _solve_pencil(eigenvalues: np.ndarray, mass: np.ndarray) -> np.ndarray:
    try:
        values = linalg.eigh(np.diag(eigenvalues), mass, eigvals_only=True)
    except linalg.LinAlgError as e:
        raise DefinitenessError(f"Mass matrix is not positive definite: {e}") from e
    if not np.all(np.isfinite(values)):
        raise NumericalError("Generalized eigensolve produced non-finite values")
    return values


def _first_eigenvalue(values: np.ndarray) -> float:
    smallest = float(np.min(np.abs(values)))
    if smallest < ZERO_EIGENVALUE_TOL:
        raise NumericalError(f"Spurious near-zero Dirac eigenvalue {smallest:.3e}")
    return smallest


def axisymmetric_mode_spectrum(
    metric: ConformalSphereMetric,
    m: float,
    L: int,
    padding: Optional[int] = None,
) -> np.ndarray:
    """
    Eigenvalues of the single azimuthal block m.

    Args:
        metric: Axisymmetric conformal metric
        m: Half-integer azimuthal index with |m| <= L + 1/2
        L: Truncation degree
        padding: Quadrature padding override

    Returns:
        Sorted eigenvalues of the block
    """
    if not metric.axisymmetric:
        raise PreconditionError("Mode decomposition requires an axisymmetric metric")
    twice_m = 2.0 * m
    if abs(twice_m - round(twice_m)) > 1e-12 or round(twice_m) % 2 == 0:
        raise PreconditionError(f"Azimuthal index must be a half-integer, got {m}")
    basis = build_round_basis(L, padding)
    block = basis.blocks().get(int(round(twice_m)))
    if block is None:
        raise PreconditionError(f"|m|={abs(m)} exceeds truncation L+1/2={L + 0.5}")

    weight = 2.0 * np.pi * basis.grid.weights * _weight_samples(np.exp(metric.sample(basis.grid)), basis)
    upper, lower = basis.upper[block], basis.lower[block]
    mass = (upper * weight) @ upper.T + (lower * weight) @ lower.T
    return np.sort(_solve_pencil(basis.eigenvalues[block], mass))


def spectrum_at_truncation(
    metric: ConformalSphereMetric,
    L: int,
    padding: Optional[int] = None,
) -> np.ndarray:
    """All eigenvalues of the truncated pencil at a single degree L."""
    basis = build_round_basis(L, padding)
    if metric.axisymmetric:
        parts = [
            axisymmetric_mode_spectrum(metric, twice_m / 2.0, L, padding)
            for twice_m in basis.blocks()
        ]
        return np.sort(np.concatenate(parts))

    mass = assemble_multiplication_matrix(np.exp(metric.sample(basis.grid)), basis)
    return np.sort(_solve_pencil(basis.eigenvalues, mass))


def conformal_dirac_spectrum(
    metric: ConformalSphereMetric,
    L: Optional[int] = None,
    tol: Optional[float] = None,
    max_degree: Optional[int] = None,
    step: Optional[int] = None,
    padding: Optional[int] = None,
) -> DiracSpectrumResult:
    """
    Dirac spectrum of e^{2u} g_round with truncation refinement.

    Starting at degree L, the truncation grows by ``step`` until the relative
    change of lambda1 between consecutive degrees is below ``tol``.

    Args:
        metric: Conformal metric
        L: Starting truncation degree
        tol: Relative convergence tolerance for lambda1
        max_degree: Largest truncation tried
        step: Truncation increment
        padding: Quadrature padding override

    Returns:
        DiracSpectrumResult at the accepted (finer) truncation

    Raises:
        ConvergenceError: if max_degree is reached without meeting tol
    """
    L = config.DEFAULT_TRUNCATION if L is None else int(L)
    tol = config.CONVERGENCE_TOL if tol is None else tol
    max_degree = max(config.MAX_TRUNCATION, L) if max_degree is None else max_degree
    step = config.TRUNCATION_STEP if step is None else step

    history: List[Tuple[int, float]] = []
    previous = None
    degree = L
    while True:
        values = spectrum_at_truncation(metric, degree, padding)
        lambda1 = _first_eigenvalue(values)
        history.append((degree, lambda1))
        logger.debug(f"{metric.label}: L={degree} lambda1={lambda1:.15g}")

        if previous is not None:
            change = abs(lambda1 - previous) / lambda1
            if change < tol:
                logger.info(
                    f"Spectrum of {metric.label} converged at L={degree}: "
                    f"lambda1={lambda1:.12g} (change {change:.2e})"
                )
                return DiracSpectrumResult(
                    eigenvalues=values,
                    lambda1=lambda1,
                    truncation_degree=degree,
                    convergence_estimate=change,
                    history=history,
                    metric_label=metric.label,
                )
        if degree + step > max_degree:
            raise ConvergenceError(
                f"lambda1 of {metric.label} did not converge by L={degree}",
                last_values=[value for _, value in history[-2:]],
            )
        previous = lambda1
        degree += step
