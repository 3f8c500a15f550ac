"""Statistics summarizing similarity matrices."""

import dataclasses

import numpy as np

from .. import util

__all__ = [
    "BLOCK_SIZES",
    "BlockProfile",
    "DistanceProfile",
    "gini",
    "block_profile",
    "distance_profile",
    "row_means",
    "outlier_row",
]

#: The smallest and largest diagonal block sizes.
BLOCK_SIZES = range(3, 8)

def _values(sim):
    values = np.asarray(getattr(sim, "values", sim), dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise util.DimError(f"Similarity matrix must be square, got shape {values.shape}")

    return values

def _mean(x):
    # Exact when every value is equal.
    return float(x[0] + np.mean(x - x[0]))

def _off_diagonal_rows(values):
    count = values.shape[0]

    return values[~np.eye(count, dtype=bool)].reshape(count, count - 1)

def _row_gini(row):
    # The sorted-rank formula, with symmetric coefficients paired up
    # so that equal values cancel exactly.
    x = np.sort(row)
    n = len(x)
    h = n // 2

    coefficients = n + 1 - 2 * np.arange(1, h + 1)
    differences  = x[::-1][:h] - x[:h]

    return float(coefficients @ differences) / (n * float(np.sum(x)))

def gini(sim):
    """Computes the mean row-wise Gini coefficient of a similarity matrix.

    The diagonal is dropped, each row's remaining entries are
    divided by their sum, and the Gini coefficient of each row
    is computed as ``Σᵢ (2i - n - 1) xᵢ / (n Σᵢ xᵢ)`` over the
    ascending-sorted entries. The result is the mean over rows.

    Parameters
    ----------
    sim : :class:`.SimilarityMatrix` or array-like
        The ``L × L`` matrix, with ``L >= 3``.

    Returns
    -------
    :class:`float`
        The mean Gini coefficient, in ``[0, 1)``.

    Raises
    ------
    :exc:`.ArgError`
        If ``L < 3``.
    :exc:`.DomainError`
        If an entry is negative or a row sums to zero.

    Examples
    --------
    >>> from weightscope.analysis import gini
    >>> round(gini([[1.0, 0.2, 0.6], [0.6, 1.0, 0.2], [0.2, 0.6, 1.0]]), 12)
    0.25
    """

    values = _values(sim)
    if values.shape[0] < 3:
        raise util.ArgError(f"Gini coefficient needs at least 3 rows, got {values.shape[0]}")

    rows = _off_diagonal_rows(values)
    if np.any(rows < 0):
        raise util.DomainError("Gini coefficient is undefined for negative similarities")

    sums = rows.sum(axis=1)
    zero = np.flatnonzero(sums == 0)
    if len(zero) > 0:
        raise util.DomainError(f"Row {int(zero[0])} has no off-diagonal similarity, so its Gini coefficient is undefined")

    return float(np.mean([_row_gini(row / total) for row, total in zip(rows, sums)]))

@dataclasses.dataclass(frozen=True)
class BlockProfile:
    """Average similarity within diagonal blocks.

    Parameters
    ----------
    block_size : :class:`int`
        The side length ``k`` of the blocks.
    start_indices : :class:`numpy.ndarray`
        The first row of each block.
    averages : :class:`numpy.ndarray`
        The average off-diagonal value of each block.
    """

    block_size:    int
    start_indices: np.ndarray
    averages:      np.ndarray

def block_profile(sim, block_size):
    """Averages each ``k × k`` diagonal block of a similarity matrix.

    Every start index ``s`` from ``0`` to ``L - k`` gives the block
    of rows and columns ``s`` to ``s + k - 1``. Entries on the main
    diagonal are excluded from the averages.

    Parameters
    ----------
    sim : :class:`.SimilarityMatrix` or array-like
        The ``L × L`` matrix.
    block_size : :class:`int`
        The block size ``k``, from 3 to 7 and at most ``L``.

    Returns
    -------
    :class:`BlockProfile`
        The ``L - k + 1`` averages.

    Raises
    ------
    :exc:`.ArgError`
        If ``block_size`` is out of range.
    """

    values = _values(sim)
    count  = values.shape[0]

    if block_size not in BLOCK_SIZES or block_size > count:
        raise util.ArgError(f"Block size must be from 3 to 7 and at most {count}, got {block_size}")

    mask   = ~np.eye(block_size, dtype=bool)
    starts = np.arange(count - block_size + 1)

    averages = np.array([
        float(np.mean(values[s : s + block_size, s : s + block_size][mask]))

        for s in starts
    ])

    return BlockProfile(block_size, starts, averages)

@dataclasses.dataclass(frozen=True)
class DistanceProfile:
    """Similarity as a function of the distance between layers.

    Parameters
    ----------
    distances : :class:`numpy.ndarray`
        The distances ``1`` to ``L - 1``.
    mean_sim : :class:`numpy.ndarray`
        The mean of the entries ``values[i, i + d]`` for each distance ``d``.
    std_sim : :class:`numpy.ndarray`
        Their population standard deviation.
    """

    distances: np.ndarray
    mean_sim:  np.ndarray
    std_sim:   np.ndarray

def distance_profile(sim):
    """Summarizes each superdiagonal of a similarity matrix.

    Parameters
    ----------
    sim : :class:`.SimilarityMatrix` or array-like
        The ``L × L`` matrix, with ``L >= 2``.

    Returns
    -------
    :class:`DistanceProfile`
        The profile.

    Examples
    --------
    >>> from weightscope.analysis import distance_profile
    >>> profile = distance_profile([[1.0, 0.9, 0.5], [0.9, 1.0, 0.9], [0.5, 0.9, 1.0]])
    >>> profile.mean_sim
    array([0.9, 0.5])
    >>> profile.std_sim
    array([0., 0.])
    """

    values = _values(sim)
    count  = values.shape[0]

    if count < 2:
        raise util.ArgError(f"Distance profile needs at least 2 rows, got {count}")

    distances = np.arange(1, count)
    means     = np.empty(count - 1)
    stds      = np.empty(count - 1)

    for d in distances:
        diagonal = np.diagonal(values, offset=d)
        mean     = _mean(diagonal)

        means[d - 1] = mean
        stds[d - 1]  = np.sqrt(np.mean(np.square(diagonal - mean)))

    return DistanceProfile(distances, means, stds)

def row_means(sim):
    """Computes the mean of each row, excluding the diagonal.

    Parameters
    ----------
    sim : :class:`.SimilarityMatrix` or array-like
        The ``L × L`` matrix, with ``L >= 2``.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``L`` means.
    """

    values = _values(sim)
    if values.shape[0] < 2:
        raise util.ArgError(f"Row means need at least 2 rows, got {values.shape[0]}")

    return _off_diagonal_rows(values).mean(axis=1)

def outlier_row(sim):
    """Finds the row least similar to the others.

    Returns
    -------
    :class:`int`
        The position of the row with the lowest :func:`row_means`.
    """

    return int(np.argmin(row_means(sim)))
