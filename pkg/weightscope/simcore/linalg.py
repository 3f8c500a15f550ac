"""Dense linear algebra helpers."""

import numpy as np
import scipy.linalg

from .. import util

__all__ = [
    "orthonormal_basis",
    "singular_values",
    "nuclear_norm",
    "hadamard",
    "random_orthogonal",
]

def _finite(x, what):
    x = np.asarray(x, dtype=np.float64)

    non_finite = x.size - int(np.count_nonzero(np.isfinite(x)))
    if non_finite > 0:
        raise util.NonFiniteError(what, non_finite)

    return x

def orthonormal_basis(x):
    """Computes an orthonormal basis for the column space of a matrix.

    Uses QR with column pivoting. Diagonal entries of ``R`` at
    most ``max(n, m) * eps * |R[0, 0]|`` are treated as zero.

    Parameters
    ----------
    x : array-like
        The ``n × m`` matrix.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``n × r`` basis, where ``r`` is the numerical rank.

    Raises
    ------
    :exc:`.NonFiniteError`
        If ``x`` has NaN or infinite entries.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import orthonormal_basis
    >>> v = np.array([[1.0], [2.0], [2.0]])
    >>> orthonormal_basis(np.hstack([v, 2 * v])).shape
    (3, 1)
    """

    x = _finite(x, "Matrix")
    n, m = x.shape

    if x.size == 0:
        return np.zeros((n, 0))

    q, r, _ = scipy.linalg.qr(x, mode="economic", pivoting=True)

    diagonal = np.abs(np.diag(r))
    if diagonal[0] == 0:
        return np.zeros((n, 0))

    tolerance = max(n, m) * np.finfo(np.float64).eps * diagonal[0]
    rank      = int(np.count_nonzero(diagonal > tolerance))

    return q[:, :rank]

def singular_values(x):
    """Computes the singular values of a matrix.

    Parameters
    ----------
    x : array-like
        The matrix.

    Returns
    -------
    :class:`numpy.ndarray`
        The singular values, descending.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import singular_values
    >>> singular_values(np.diag([3.0, 2.0, 1.0]))
    array([3., 2., 1.])
    """

    return scipy.linalg.svdvals(_finite(x, "Matrix"))

def nuclear_norm(x):
    """Computes the nuclear norm, the sum of the singular values."""

    return float(np.sum(singular_values(x)))

def hadamard(m):
    """Constructs a Hadamard matrix by Sylvester's construction.

    Parameters
    ----------
    m : :class:`int`
        The order, a power of two.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``m × m`` integer matrix of ``±1`` entries,
        with ``HᵀH = mI``.

    Raises
    ------
    :exc:`.ArgError`
        If ``m`` is not a power of two.

    Examples
    --------
    >>> from weightscope.simcore import hadamard
    >>> hadamard(2)
    array([[ 1,  1],
           [ 1, -1]])
    """

    if not util.is_power_of_two(m):
        raise util.ArgError(f"Hadamard order must be a power of two, got {m!r}")

    return scipy.linalg.hadamard(m, dtype=np.int64)

def random_orthogonal(n, gen):
    """Samples a random orthogonal matrix.

    A matrix of Box-Muller Gaussians is factored by QR, and the
    signs of ``R``'s diagonal are folded into ``Q``.

    Parameters
    ----------
    n : :class:`int`
        The order.
    gen : :class:`numpy.random.Generator`
        The generator, e.g. from :func:`.util.generator`.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``n × n`` orthogonal matrix.
    """

    if n < 1:
        raise util.ArgError(f"Order must be positive, got {n}")

    q, r = scipy.linalg.qr(util.standard_normal(gen, (n, n)))

    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1

    return q * signs
