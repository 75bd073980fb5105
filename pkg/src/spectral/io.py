"""
File formats for conformal factors and spectrum rows.

Nodal-sample files hold u on a Gauss-Legendre x uniform-azimuth grid, rows
ordered by ascending cos(theta) node and, within a row, by azimuth:

    text:   first line ``# L n_theta n_phi`` then one value per line
    binary: ``.npz`` with arrays ``L`` and ``values`` of shape (n_theta, n_phi)
"""
import logging
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from src.spectral.metric import ConformalSphereMetric
from src.spectral.solver import DiracSpectrumResult
from src.utils.errors import ArtifactError, ConfigurationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_nodal_samples(path: PathLike) -> ConformalSphereMetric:
    """Load a conformal exponent from a text or npz nodal-sample file."""
    path = Path(path)
    try:
        if path.suffix == '.npz':
            with np.load(path) as data:
                values = np.asarray(data['values'], dtype=float)
        else:
            with path.open('r', encoding='utf-8') as handle:
                header = handle.readline().lstrip('#').split()
                if len(header) != 3:
                    raise ConfigurationError(f"{path}: header must be '# L n_theta n_phi'")
                _, n_theta, n_phi = (int(token) for token in header)
                flat = np.loadtxt(handle, dtype=float, ndmin=1)
            if flat.size != n_theta * n_phi:
                raise ConfigurationError(
                    f"{path}: expected {n_theta * n_phi} samples, found {flat.size}"
                )
            values = flat.reshape(n_theta, n_phi)
    except (OSError, KeyError) as e:
        raise ArtifactError(f"Cannot read nodal samples from {path}: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"Malformed nodal-sample file {path}: {e}") from e

    logger.info(f"Loaded {values.size} conformal-factor samples from {path}")
    return ConformalSphereMetric.from_samples(values, label=path.stem)


def write_nodal_samples(path: PathLike, L: int, values: np.ndarray) -> Path:
    """Write samples in the text or npz nodal format (chosen by suffix)."""
    path = Path(path)
    values = np.atleast_2d(np.asarray(values, dtype=float).T).T
    try:
        if path.suffix == '.npz':
            np.savez(path, L=np.array(L), values=values)
        else:
            header = f"{L} {values.shape[0]} {values.shape[1]}"
            np.savetxt(path, values.ravel(), header=header, fmt='%.17g')
    except OSError as e:
        raise ArtifactError(f"Cannot write nodal samples to {path}: {e}") from e
    return path


def spectrum_rows(result: DiracSpectrumResult) -> Iterable[list]:
    for index, value in enumerate(result.eigenvalues):
        yield [index, repr(float(value))]
