"""
Chebyshev-Lobatto collocation on [-1, 1]: nodes, differentiation and quadrature.
"""
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import chebyshev


@lru_cache(maxsize=8)
def lobatto_nodes(n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nodes x_j = cos(pi j / n), j = 0..n, their differentiation matrix and
    Clenshaw-Curtis weights.

    Returns:
        (x, D, w); x runs from +1 (theta = 0) to -1 (theta = pi)
    """
    if n < 2:
        raise ValueError("Need at least three collocation nodes")
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)

    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))

    theta = np.pi * j / n
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    inner = theta[1:-1]
    if n % 2 == 0:
        w[0] = w[-1] = 1.0 / (n ** 2 - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k ** 2 - 1)
        v -= np.cos(n * inner) / (n ** 2 - 1)
    else:
        w[0] = w[-1] = 1.0 / n ** 2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k ** 2 - 1)
    w[1:-1] = 2.0 * v / n

    for array in (x, D, w):
        array.setflags(write=False)
    return x, D, w


def interpolant(values: np.ndarray) -> chebyshev.Chebyshev:
    """Chebyshev series through values sampled at the Lobatto nodes of matching size."""
    values = np.asarray(values, dtype=float)
    x, _, _ = lobatto_nodes(values.size - 1)
    return chebyshev.Chebyshev.fit(x, values, values.size - 1, domain=[-1.0, 1.0])
