"""The DOCS similarity index."""

from .. import util
from .cosine import as_matrix, cross_reduce, normalize_columns
from .gumbel import gumbel_fit_location
from .kinds  import IndexKind, SimilarityScore

__all__ = [
    "docs",
]

def docs(x, y, aggregate="max", *, tile=512, workers=1):
    """Computes the DOCS similarity of two oriented matrices.

    For each column of ``x`` the maximum absolute cosine
    similarity with the columns of ``y`` is taken, and vice
    versa. A Gumbel distribution is fitted to each of the two
    vectors of maxima, and the index is the average of the
    two fitted locations.

    Parameters
    ----------
    x, y : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented matrices, with the same number of rows.
    aggregate : :class:`str`
        ``"max"``, or ``"mean"`` to average the absolute cosine
        similarities instead, giving :attr:`.IndexKind.DOCS_MEAN`.
    tile : :class:`int`
        The number of columns per tile of the cosine kernel.
    workers : :class:`int`
        The number of threads to use.

    Returns
    -------
    :class:`.SimilarityScore`
        The score. Its ``meta`` holds both :class:`.GumbelFit`\\s
        as ``"fit_x"`` and ``"fit_y"``, and ``"unequal_m"`` is
        set when the column counts differ.

    Raises
    ------
    :exc:`.DimError`
        If the row dimensions differ.
    :exc:`.ZeroColumnError`
        If a column of either matrix has zero norm.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import docs, hadamard
    >>> docs(np.eye(4), hadamard(4) / 2).value
    0.5
    """

    x = as_matrix(x, "X")
    y = as_matrix(y, "Y")

    if x.shape[0] != y.shape[0]:
        raise util.DimError(f"Row dimensions differ: {x.shape[0]} and {y.shape[0]}")

    s_x, s_y = cross_reduce(
        normalize_columns(x, "X"),
        normalize_columns(y, "Y"),

        aggregate,

        tile    = tile,
        workers = workers,
    )

    fit_x = gumbel_fit_location(s_x)
    fit_y = gumbel_fit_location(s_y)

    return SimilarityScore(
        kind  = IndexKind.DOCS if aggregate == "max" else IndexKind.DOCS_MEAN,
        value = float(fit_x.location_u + fit_y.location_u) / 2,

        meta = dict(
            fit_x     = fit_x,
            fit_y     = fit_y,
            unequal_m = x.shape[1] != y.shape[1],
        ),
    )
