"""Closed-form baseline similarity indices.

None of these indices center their inputs; each is computed
directly from the matrices as given.
"""

import numpy as np
import scipy.linalg

from .. import util
from .cosine  import as_matrix
from .docs    import docs
from .kinds   import IndexKind, SimilarityParams, SimilarityScore
from .linalg  import nuclear_norm, orthonormal_basis

__all__ = [
    "svcca_basis",
    "baseline_index",
    "similarity",
]

#: Slack when comparing cumulative variance with the SVCCA threshold.
THRESHOLD_SLACK = 1e-12

def svcca_basis(x, threshold):
    """Gets the leading left singular vectors of a matrix.

    Parameters
    ----------
    x : array-like
        The matrix.
    threshold : :class:`float`
        The fraction of the total squared singular values to keep,
        in ``(0, 1]``. ``1`` keeps every vector of the numerical rank.

    Returns
    -------
    :class:`numpy.ndarray`
        The fewest leading left singular vectors whose squared
        singular values reach ``threshold`` of the total.
    """

    x = np.asarray(x, dtype=np.float64)

    u, s, _ = scipy.linalg.svd(x, full_matrices=False)

    if len(s) == 0 or s[0] == 0:
        return u[:, :0]

    rank = int(np.count_nonzero(s > max(x.shape) * np.finfo(np.float64).eps * s[0]))

    variance = np.cumsum(np.square(s[:rank]))
    variance = variance / variance[-1]

    keep = int(np.searchsorted(variance, threshold - THRESHOLD_SLACK)) + 1

    return u[:, :min(keep, rank)]

def _canonical(q_x, q_y, nuclear):
    rank = min(q_x.shape[1], q_y.shape[1])
    if rank == 0:
        raise util.DomainError("A matrix has rank zero, so canonical correlations are undefined")

    cross = q_y.T @ q_x
    if nuclear:
        return nuclear_norm(cross) / rank

    return float(np.sum(np.square(cross))) / rank

def _squared_cross(x, y):
    # ‖XᵀY‖² equals the sum of (XXᵀ)∘(YYᵀ), cheaper when columns outnumber rows.
    n, m = x.shape[0], max(x.shape[1], y.shape[1])
    if m > n:
        return float(np.sum((x @ x.T) * (y @ y.T)))

    return float(np.sum(np.square(x.T @ y)))

def _squared_gram(x):
    # ‖XᵀX‖ equals ‖XXᵀ‖.
    if x.shape[1] > x.shape[0]:
        return float(np.sum(np.square(x @ x.T)))

    return float(np.sum(np.square(x.T @ x)))

def baseline_index(kind, x, y, svcca_threshold=0.99):
    """Computes a baseline similarity index.

    Parameters
    ----------
    kind : :class:`.IndexKind`
        The index, anything but :attr:`.IndexKind.DOCS`
        and :attr:`.IndexKind.DOCS_MEAN`.
    x, y : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented matrices, with the same number of rows.
    svcca_threshold : :class:`float`
        The fraction of variance kept by SVCCA, in ``(0, 1]``.

    Returns
    -------
    :class:`.SimilarityScore`
        The score, computed in ``float64``.

    Raises
    ------
    :exc:`.UsageError`
        If ``kind`` is a DOCS kind.
    :exc:`.DimError`
        If the row dimensions differ.
    :exc:`.DomainError`
        If a matrix is zero, or too small for the index.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.simcore import IndexKind, baseline_index
    >>> baseline_index(IndexKind.LINEAR_CKA, np.eye(3), np.eye(3)).value
    1.0
    """

    if kind.is_docs:
        raise util.UsageError(f"{kind.value} is not a baseline index")

    if not 0 < svcca_threshold <= 1:
        raise util.ArgError(f"SVCCA threshold must be in (0, 1], got {svcca_threshold}")

    x = as_matrix(x, "X").astype(np.float64, copy=False)
    y = as_matrix(y, "Y").astype(np.float64, copy=False)

    n = x.shape[0]
    if y.shape[0] != n:
        raise util.DimError(f"Row dimensions differ: {n} and {y.shape[0]}")

    meta = {}

    if kind is IndexKind.LINREG:
        total = float(np.sum(np.square(x)))
        if total == 0:
            raise util.DomainError("X is zero, so linear regression similarity is undefined")

        value = float(np.sum(np.square(orthonormal_basis(y).T @ x))) / total

    elif kind in (IndexKind.CCA_R2, IndexKind.CCA_NUCLEAR):
        q_x = orthonormal_basis(x)
        q_y = orthonormal_basis(y)

        meta  = dict(rank_x=q_x.shape[1], rank_y=q_y.shape[1])
        value = _canonical(q_x, q_y, nuclear=kind is IndexKind.CCA_NUCLEAR)

    elif kind in (IndexKind.SVCCA_R2, IndexKind.SVCCA_NUCLEAR):
        u_x = svcca_basis(x, svcca_threshold)
        u_y = svcca_basis(y, svcca_threshold)

        meta  = dict(kept_x=u_x.shape[1], kept_y=u_y.shape[1], threshold=svcca_threshold)
        value = _canonical(u_x, u_y, nuclear=kind is IndexKind.SVCCA_NUCLEAR)

    elif kind is IndexKind.LINEAR_HSIC:
        if n < 2:
            raise util.DomainError("Linear HSIC needs at least 2 rows")

        value = _squared_cross(x, y) / (n - 1)**2

    else:
        denominator = np.sqrt(_squared_gram(x) * _squared_gram(y))
        if denominator == 0:
            raise util.DomainError("A matrix is zero, so linear CKA is undefined")

        value = _squared_cross(x, y) / denominator

    return SimilarityScore(kind, float(value), meta)

def similarity(kind, x, y, params=None):
    """Computes any similarity index.

    Parameters
    ----------
    kind : :class:`.IndexKind`
        The index.
    x, y : :class:`numpy.ndarray` or :class:`.WeightMatrix`
        The oriented matrices.
    params : :class:`.SimilarityParams` or ``None``
        The parameters. If ``None``, the defaults are used.

    Returns
    -------
    :class:`.SimilarityScore`
        The score.
    """

    if params is None:
        params = SimilarityParams()

    if kind.is_docs:
        return docs(
            x, y,

            "max" if kind is IndexKind.DOCS else "mean",

            tile    = params.tile,
            workers = params.resolved_workers(),
        )

    return baseline_index(kind, x, y, params.svcca_threshold)
