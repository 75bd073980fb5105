"""
Wigner small-d functions with one half-integer column index.

The round-sphere Dirac eigenspinors are built from the two columns
d^j_{m,+1/2} and d^j_{m,-1/2}; this module evaluates them for every
j = |m|, |m|+1, ... by the three-term recursion in j.
"""
import numpy as np
from scipy.special import gammaln


def _edge_value(j0: float, m: float, column: float, x: np.ndarray) -> np.ndarray:
    """d^{j0}_{m,column}(theta) with j0 = |m|, evaluated in log space."""
    cos_half = np.sqrt((1.0 + x) / 2.0)
    sin_half = np.sqrt((1.0 - x) / 2.0)
    log_norm = 0.5 * (
        gammaln(2 * j0 + 1) - gammaln(j0 + column + 1) - gammaln(j0 - column + 1)
    )
    if m > 0:
        cos_power, sin_power = j0 + column, j0 - column
        sign = (-1.0) ** round(j0 - column)
    else:
        cos_power, sin_power = j0 - column, j0 + column
        sign = 1.0
    with np.errstate(divide='ignore'):
        log_value = (
            log_norm
            + cos_power * np.log(cos_half)
            + sin_power * np.log(sin_half)
        )
    return sign * np.exp(log_value)


def wigner_d_column(j_max: float, m: float, column: float, x: np.ndarray) -> np.ndarray:
    """
    Evaluate d^j_{m,column}(theta) for j = |m|, |m|+1, ..., j_max.

    Args:
        j_max: Largest degree (half-integer)
        m: First index (half-integer, |m| <= j_max)
        column: Second index, +1/2 or -1/2
        x: Nodes cos(theta), strictly inside (-1, 1)

    Returns:
        Array of shape (n_degrees, len(x)); row k holds degree |m| + k
    """
    x = np.asarray(x, dtype=float)
    j0 = abs(m)
    n_degrees = int(round(j_max - j0)) + 1
    if n_degrees < 1:
        raise ValueError(f"|m|={j0} exceeds j_max={j_max}")

    table = np.empty((n_degrees, x.size))
    table[0] = _edge_value(j0, m, column, x)
    previous = np.zeros_like(x)
    mm = m * column
    for k in range(n_degrees - 1):
        j = j0 + k
        lower = np.sqrt(max((j * j - m * m) * (j * j - column * column), 0.0))
        upper = np.sqrt(((j + 1) ** 2 - m * m) * ((j + 1) ** 2 - column * column))
        current = table[k]
        table[k + 1] = (
            (2 * j + 1) * (j * (j + 1) * x - mm) * current
            - (j + 1) * lower * previous
        ) / (j * upper)
        previous = current
    return table
