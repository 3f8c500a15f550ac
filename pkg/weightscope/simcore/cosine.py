"""Column-wise absolute cosine similarity between matrices.

Given matrices ``A`` and ``B`` with the same number of rows, the
kernel reduces each row of ``|C|``, where ``C[j, k]`` is the cosine
similarity of column ``j`` of ``A`` and column ``k`` of ``B``, to its
maximum (or mean). ``C`` is only ever materialized one tile at a time.
"""

import dataclasses

import numpy as np

from .. import util
from ..checkpoint import WeightMatrix

__all__ = [
    "CosineMaxVector",
    "as_matrix",
    "normalize_columns",
    "clip_unit",
    "cross_reduce",
    "max_cos_sim",
    "mean_cos_sim",
]

#: Values within this many float64 epsilons of 1 are exactly 1, or within
#: one epsilon per summed product if the dot products are longer.
UNIT_SNAP_ULPS = 64

@dataclasses.dataclass(frozen=True)
class CosineMaxVector:
    """Reduced absolute cosine similarities, one per column.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        The ``float64`` values, each in ``[0, 1]``.
    source_m : :class:`int`
        The number of columns of the opposing matrix.
    aggregate : :class:`str`
        ``"max"`` or ``"mean"``.
    """

    values:    np.ndarray
    source_m:  int
    aggregate: str = "max"

    def __len__(self):
        return len(self.values)

def as_matrix(x, which="matrix"):
    """Gets the floating point data of an oriented matrix.

    Parameters
    ----------
    x : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The matrix. A :class:`.WeightMatrix` must be oriented.
    which : :class:`str`
        What to call the matrix in errors.

    Returns
    -------
    :class:`numpy.ndarray`
        The 2-D ``float32`` or ``float64`` data.

    Raises
    ------
    :exc:`.UsageError`
        If ``x`` is an unoriented :class:`.WeightMatrix`.
    :exc:`.DimError`
        If ``x`` is not 2-D with nonzero dimensions.
    """

    if isinstance(x, WeightMatrix):
        if not x.oriented:
            raise util.UsageError(f"{which} for (layer={x.layer}, role={x.role}) must be oriented first")

        x = x.data

    x = np.asarray(x)
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)

    if x.ndim != 2 or 0 in x.shape:
        raise util.DimError(f"{which} must be a non-empty 2-D matrix, got shape {x.shape}")

    return x

def _same_rows(a, b):
    if a.shape[0] != b.shape[0]:
        raise util.DimError(f"Row dimensions differ: {a.shape[0]} and {b.shape[0]}")

def normalize_columns(x, which="matrix", *, chunk=512):
    """Scales the columns of a matrix to unit norm.

    The columns are widened to ``float64`` before they are scaled,
    so products of normalized columns carry no rounding from the
    storage or compute dtype.

    Parameters
    ----------
    x : :class:`numpy.ndarray`
        The 2-D matrix.
    which : :class:`str`
        What to call the matrix in errors.
    chunk : :class:`int`
        How many columns to scale at a time.

    Returns
    -------
    :class:`numpy.ndarray`
        The normalized ``float64`` matrix.

    Raises
    ------
    :exc:`.ZeroColumnError`
        If a column's norm is zero or too small to divide by.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import normalize_columns
    >>> normalize_columns(np.array([[3.0, 0.0], [4.0, 2.0]]))
    array([[0.6, 0. ],
           [0.8, 1. ]])
    """

    tiny = np.finfo(x.dtype).tiny

    x_hat = np.empty(x.shape, dtype=np.float64)
    for start in range(0, x.shape[1], chunk):
        block = x[:, start : start + chunk].astype(np.float64)
        norms = np.sqrt(np.einsum("ij,ij->j", block, block))

        zero = np.flatnonzero(~(norms > tiny))
        if len(zero) > 0:
            raise util.ZeroColumnError(start + int(zero[0]), which)

        x_hat[:, start : start + chunk] = block / norms

    return x_hat

def clip_unit(values, length=1):
    """Clips values to ``[0, 1]``, setting values within rounding of 1 to exactly 1.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        Absolute cosine similarities computed in ``float64``.
    length : :class:`int`
        The length of the dot products they were computed from.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import clip_unit
    >>> clip_unit(np.array([1.0 + 1e-15, 1.0 - 1e-15, 0.5]))
    array([1. , 1. , 0.5])
    >>> bool(clip_unit(np.array([1.0 - 1e-9]))[0] < 1)
    True
    """

    tolerance = max(UNIT_SNAP_ULPS, length) * np.finfo(np.float64).eps

    values = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    values[values >= 1.0 - tolerance] = 1.0

    return values

def cross_reduce(a_hat, b_hat, aggregate="max", *, tile=512, workers=1):
    """Reduces the rows and columns of ``|a_hatᵀ b_hat|``.

    The product is computed one ``tile × tile`` block at a time.
    Blocks are grouped by column tile of ``a_hat``, and the groups
    are processed concurrently and combined in order, so the result
    depends on ``tile`` but not on ``workers``.

    Parameters
    ----------
    a_hat, b_hat : :class:`numpy.ndarray`
        Column-normalized matrices with the same number of rows.
    aggregate : :class:`str`
        ``"max"`` or ``"mean"``.
    tile : :class:`int`
        The number of columns per tile.
    workers : :class:`int`
        The number of threads to use.

    Returns
    -------
    pair of :class:`numpy.ndarray`
        The reductions over each row, one per column of ``a_hat``,
        and over each column, one per column of ``b_hat``. Both
        are ``float64``, clipped to ``[0, 1]``, with values within
        rounding of 1 set to exactly 1.
    """

    if aggregate not in ("max", "mean"):
        raise util.ArgError(f"Aggregate must be 'max' or 'mean', got {aggregate!r}")

    if tile < 1:
        raise util.ArgError(f"Tile size must be positive, got {tile}")

    a_hat = np.asarray(a_hat, dtype=np.float64)
    b_hat = np.asarray(b_hat, dtype=np.float64)

    m_a = a_hat.shape[1]
    m_b = b_hat.shape[1]

    def reduce_tile(a_start):
        a_tile = a_hat[:, a_start : a_start + tile]

        rows = np.zeros(a_tile.shape[1])
        cols = np.zeros(m_b)

        for b_start in range(0, m_b, tile):
            block = np.abs(a_tile.T @ b_hat[:, b_start : b_start + tile])

            if aggregate == "max":
                np.maximum(rows, block.max(axis=1), out=rows)
                cols[b_start : b_start + tile] = block.max(axis=0)
            else:
                rows += block.sum(axis=1)
                cols[b_start : b_start + tile] = block.sum(axis=0)

        return rows, cols

    results = util.map_ordered(reduce_tile, range(0, m_a, tile), workers=workers)

    rows = np.concatenate([tile_rows for tile_rows, _ in results])
    if aggregate == "max":
        cols = np.maximum.reduce([tile_cols for _, tile_cols in results])
    else:
        cols = np.zeros(m_b)
        for _, tile_cols in results:
            cols += tile_cols

        rows = rows / m_b
        cols = cols / m_a

    length = a_hat.shape[0]

    return clip_unit(rows, length), clip_unit(cols, length)

def _reduce(a, b, aggregate, tile, workers):
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _same_rows(a, b)

    rows, _ = cross_reduce(
        normalize_columns(a, "A"),
        normalize_columns(b, "B"),

        aggregate,

        tile    = tile,
        workers = workers,
    )

    return CosineMaxVector(rows, b.shape[1], aggregate)

def max_cos_sim(a, b, *, tile=512, workers=1):
    """Computes, for each column of ``a``, its maximum absolute cosine similarity with ``b``.

    Parameters
    ----------
    a : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented ``n × m_a`` matrix.
    b : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented ``n × m_b`` matrix.
    tile : :class:`int`
        The number of columns per tile.
    workers : :class:`int`
        The number of threads to use.

    Returns
    -------
    :class:`CosineMaxVector`
        The ``m_a`` maxima.

    Raises
    ------
    :exc:`.DimError`
        If the row dimensions differ.
    :exc:`.ZeroColumnError`
        If a column of either matrix has zero norm.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import max_cos_sim
    >>> max_cos_sim(np.eye(2), np.array([[1.0], [1.0]])).values
    array([0.70710678, 0.70710678])
    """

    return _reduce(a, b, "max", tile, workers)

def mean_cos_sim(a, b, *, tile=512, workers=1):
    """Computes, for each column of ``a``, its mean absolute cosine similarity with ``b``.

    Takes the same parameters as :func:`max_cos_sim`.
    """

    return _reduce(a, b, "mean", tile, workers)
