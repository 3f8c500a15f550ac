"""Diagnostics of how close weight matrices are to orthogonal."""

import math

import numpy as np

from .. import util
from ..simcore import as_matrix, clip_unit, normalize_columns

__all__ = [
    "DEFAULT_THETAS",
    "offdiag_avg_cos",
    "make_m_theta",
]

#: The perturbation strengths of the default reference matrices.
DEFAULT_THETAS = (0.001, 0.002, 0.003, 0.005)

def offdiag_avg_cos(x, *, tile=512, workers=1):
    """Computes the mean absolute cosine similarity between distinct columns.

    The mean is taken over all ``m (m - 1)`` ordered pairs of
    columns ``i != j``. It is ``0`` for a matrix with orthogonal
    columns and ``1`` when every column is parallel to every other.

    The Gram matrix of the normalized columns is computed one
    ``tile × tile`` block at a time, and only blocks on or above
    its diagonal are computed.

    Parameters
    ----------
    x : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented ``n × m`` matrix, with ``m >= 2``.
    tile : :class:`int`
        The number of columns per tile.
    workers : :class:`int`
        The number of threads to use.

    Returns
    -------
    :class:`float`
        The mean, in ``[0, 1]``.

    Raises
    ------
    :exc:`.ArgError`
        If ``x`` has fewer than two columns.
    :exc:`.ZeroColumnError`
        If a column has zero norm.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.analysis import offdiag_avg_cos
    >>> offdiag_avg_cos(np.eye(3))
    0.0
    >>> offdiag_avg_cos(np.ones((2, 4)))
    1.0
    """

    x = as_matrix(x, "X")
    m = x.shape[1]

    if m < 2:
        raise util.ArgError(f"Need at least 2 columns to compare, got {m}")

    if tile < 1:
        raise util.ArgError(f"Tile size must be positive, got {tile}")

    x_hat = normalize_columns(x, "X")

    def tile_sum(a_start):
        a_tile = x_hat[:, a_start : a_start + tile]

        total = 0.0
        for b_start in range(a_start, m, tile):
            block = clip_unit(np.abs(a_tile.T @ x_hat[:, b_start : b_start + tile]), x_hat.shape[0])

            if b_start == a_start:
                np.fill_diagonal(block, 0.0)

                total += float(np.sum(block))
            else:
                # Each pair appears once here, and once more below the diagonal.
                total += 2 * float(np.sum(block))

        return total

    totals = util.map_ordered(tile_sum, range(0, m, tile), workers=workers)

    return math.fsum(totals) / (m * (m - 1))

def make_m_theta(n, theta, seed):
    """Constructs a perturbed identity matrix ``I + θ v 1ᵀ``.

    The vector ``v`` is drawn from a standard normal distribution
    with :func:`.util.standard_normal`, so the same seed always
    gives the same matrix. Larger ``θ`` takes the matrix further
    from orthogonal.

    Parameters
    ----------
    n : :class:`int`
        The order.
    theta : :class:`float`
        The perturbation strength.
    seed : :class:`int`
        The seed for ``v``.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``n × n`` matrix.

    Raises
    ------
    :exc:`.ArgError`
        If ``n`` is not positive or ``theta`` is not finite.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.analysis import make_m_theta
    >>> bool(np.array_equal(make_m_theta(4, 0.0, seed=1), np.eye(4)))
    True
    """

    if not isinstance(n, (int, np.integer)) or n < 1:
        raise util.ArgError(f"Order must be a positive integer, got {n!r}")

    if not math.isfinite(theta):
        raise util.ArgError(f"Theta must be finite, got {theta}")

    v = util.standard_normal(util.generator(seed), n)

    return np.eye(n) + theta * np.outer(v, np.ones(n))
