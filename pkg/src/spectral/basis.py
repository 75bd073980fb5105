"""
Round-sphere Dirac eigenbasis and the quadrature grid it is sampled on.

A mode is labelled by its band k >= 0, its azimuthal index m (half-integer,
|m| <= k + 1/2) and a sign s = +/-1; its round eigenvalue is s*(k+1). With
j = k + 1/2 the eigenspinor reads

    psi = N_j * (d^j_{m,1/2}(theta), -i*s*d^j_{m,-1/2}(theta)) * exp(i*m*phi),
    N_j = sqrt((2j+1)/(8*pi)).

The tables stored here are the real theta-parts of both components:
``upper = N_j d^j_{m,1/2}`` and ``lower = s N_j d^j_{m,-1/2}``.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional

import numpy as np

from config.settings import config
from src.spectral.wigner import wigner_d_column
from src.utils.errors import PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre nodes in cos(theta) times uniform azimuth nodes."""

    x: np.ndarray
    weights: np.ndarray
    phi: np.ndarray

    @property
    def theta(self) -> np.ndarray:
        return np.arccos(self.x)

    @property
    def n_theta(self) -> int:
        return self.x.size

    @property
    def n_phi(self) -> int:
        return self.phi.size

    @property
    def phi_weight(self) -> float:
        return 2.0 * np.pi / self.n_phi

    def integrate(self, values: np.ndarray) -> float:
        """Integrate samples of shape (n_theta,) or (n_theta, n_phi) against dA_round."""
        values = np.asarray(values)
        if values.ndim == 1:
            return float(2.0 * np.pi * np.dot(self.weights, values))
        return float(self.phi_weight * np.dot(self.weights, values.sum(axis=1)))


def make_grid(n_theta: int, n_phi: int) -> SphereGrid:
    """Build a quadrature grid with the given node counts."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return SphereGrid(x=x, weights=w, phi=phi)


def grid_for_degree(L: int, padding: Optional[int] = None) -> SphereGrid:
    """Quadrature grid for truncation L: L+2+pad nodes in cos(theta), 2L+3+2*pad in phi."""
    pad = config.QUADRATURE_PADDING if padding is None else padding
    return make_grid(L + 2 + pad, 2 * L + 3 + 2 * pad)


@dataclass(frozen=True)
class RoundEigenBasis:
    """Dirac eigenspinors of the unit round sphere up to band L."""

    truncation_degree: int
    grid: SphereGrid
    bands: np.ndarray
    twice_m: np.ndarray
    signs: np.ndarray
    eigenvalues: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.bands.size

    def blocks(self) -> Dict[int, slice]:
        """Contiguous index range of every azimuthal block, keyed by 2m."""
        result = {}
        values, starts, counts = np.unique(self.twice_m, return_index=True, return_counts=True)
        for value, start, count in zip(values, starts, counts):
            result[int(value)] = slice(int(start), int(start + count))
        return result


def _mode_tables(L: int, x: np.ndarray):
    """Upper/lower theta tables in the canonical mode order (m, band, sign)."""
    j_max = L + 0.5
    uppers, lowers = [], []
    for twice_m in range(-(2 * L + 1), 2 * L + 2, 2):
        m = twice_m / 2.0
        d_plus = wigner_d_column(j_max, m, 0.5, x)
        d_minus = wigner_d_column(j_max, m, -0.5, x)
        j = abs(m) + np.arange(d_plus.shape[0])
        norm = np.sqrt((2 * j + 1) / (8 * np.pi))[:, None]
        for row in range(d_plus.shape[0]):
            for sign in (1, -1):
                uppers.append(norm[row] * d_plus[row])
                lowers.append(sign * norm[row] * d_minus[row])
    return np.array(uppers), np.array(lowers)


def _mode_labels(L: int):
    bands, twice_ms, signs = [], [], []
    for twice_m in range(-(2 * L + 1), 2 * L + 2, 2):
        first_band = (abs(twice_m) - 1) // 2
        for k in range(first_band, L + 1):
            for sign in (1, -1):
                bands.append(k)
                twice_ms.append(twice_m)
                signs.append(sign)
    return np.array(bands), np.array(twice_ms), np.array(signs)


@lru_cache(maxsize=16)
def build_round_basis(L: int, padding: Optional[int] = None) -> RoundEigenBasis:
    """
    Build the round-sphere Dirac eigenbasis with all bands k <= L.

    Args:
        L: Truncation degree (>= 1)
        padding: Extra quadrature nodes beyond the exact-product minimum

    Returns:
        RoundEigenBasis sampled on the matching quadrature grid
    """
    if int(L) != L or L < 1:
        raise PreconditionError(f"Truncation degree must be an integer >= 1, got {L}")
    L = int(L)

    grid = grid_for_degree(L, padding)
    bands, twice_m, signs = _mode_labels(L)
    upper, lower = _mode_tables(L, grid.x)
    eigenvalues = signs * (bands + 1.0)

    for array in (grid.x, grid.weights, grid.phi, bands, twice_m, signs, eigenvalues, upper, lower):
        array.setflags(write=False)

    logger.debug(
        f"Built round basis L={L}: {bands.size} modes on "
        f"{grid.n_theta}x{grid.n_phi} nodes"
    )
    return RoundEigenBasis(
        truncation_degree=L,
        grid=grid,
        bands=bands,
        twice_m=twice_m,
        signs=signs,
        eigenvalues=eigenvalues,
        upper=upper,
        lower=lower,
    )
