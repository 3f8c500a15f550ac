"""Pairwise similarity matrices over layers and experts."""

import dataclasses
import logging

import numpy as np

from .. import util
from ..checkpoint import Role, RoleTag, load_oriented
from ..simcore    import SimilarityParams, similarity

__all__ = [
    "SimilarityMatrix",
    "as_role_tag",
    "layer_heatmap",
    "expert_heatmap",
]

logger = logging.getLogger(__name__)

#: Tolerance for the symmetry and unit-diagonal checks.
INVARIANT_TOLERANCE = 1e-9

@dataclasses.dataclass(frozen=True)
class SimilarityMatrix:
    """A square matrix of pairwise similarities.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        The ``L × L`` values. ``values[i, j]`` compares item
        ``i`` (as ``X``) with item ``j`` (as ``Y``).
    kind : :class:`.IndexKind`
        The index used.
    role : :class:`.RoleTag` or :class:`.Role`
        The role of the compared matrices.
    model_id : :class:`str`
        The checkpoint the matrices came from.
    labels : :class:`tuple` of :class:`int`
        The layer or expert index of each row.
    """

    values:   np.ndarray
    kind:     object
    role:     object
    model_id: str   = ""
    labels:   tuple = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise util.DimError(f"Similarity matrix must be square, got shape {values.shape}")

        object.__setattr__(self, "values", values)

        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(values.shape[0])))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def layer_count(self):
        """The number of rows, ``L``."""

        return self.values.shape[0]

    def is_symmetric(self, tolerance=INVARIANT_TOLERANCE):
        """Checks whether the values are symmetric within a tolerance."""

        return bool(np.all(np.abs(self.values - self.values.T) <= tolerance))

    def has_unit_diagonal(self, tolerance=INVARIANT_TOLERANCE):
        """Checks whether the diagonal is 1 within a tolerance."""

        return bool(np.all(np.abs(np.diag(self.values) - 1) <= tolerance))

    def off_diagonal(self):
        """Gets the values off the diagonal, row by row."""

        return self.values[~np.eye(self.layer_count, dtype=bool)]

def as_role_tag(role):
    """Converts a :class:`.Role` of a non-expert matrix to a :class:`.RoleTag`."""

    if isinstance(role, RoleTag):
        return role

    if isinstance(role, str):
        role = Role.parse(role)

    return RoleTag(role)

def _pairs(count, symmetric):
    # Row-major, upper triangle only for symmetric kinds.
    return [(i, j) for i in range(count) for j in range(i if symmetric else 0, count)]

def _pairwise(load, labels, kind, params, *, what):
    params  = SimilarityParams() if params is None else params
    workers = params.resolved_workers()

    # Pairs are spread over the workers, so each pair runs single-threaded.
    pair_params = dataclasses.replace(params, workers=1)

    count = len(labels)
    pairs = _pairs(count, kind.symmetric)

    def compute(pair):
        i, j = pair

        return similarity(kind, load(labels[i]), load(labels[j]), pair_params).value

    logger.info("Computing %d %s pairs of %s with %d workers", len(pairs), kind.value, what, workers)

    scores = util.map_ordered(compute, pairs, workers=workers)

    values = np.empty((count, count))
    for (i, j), score in zip(pairs, scores):
        values[i, j] = score

        if kind.symmetric:
            values[j, i] = score

    return values

def layer_heatmap(index, role, kind, params=None):
    """Computes the similarity between every pair of layers.

    Parameters
    ----------
    index : :class:`.CheckpointIndex`
        The checkpoint.
    role : :class:`.RoleTag` or :class:`.Role`
        The role to compare across layers.
    kind : :class:`.IndexKind`
        The index.
    params : :class:`.SimilarityParams` or ``None``
        The parameters. If ``None``, the defaults are used.

    Returns
    -------
    :class:`SimilarityMatrix`
        The ``num_layers × num_layers`` matrix. For symmetric kinds
        only pairs ``i <= j`` are computed and then mirrored.

    Raises
    ------
    :exc:`.SlotNotFoundError`
        If some layer lacks the role.
    """

    params = SimilarityParams() if params is None else params
    role   = as_role_tag(role)

    layers = list(range(index.num_layers))
    for layer in layers:
        index.slot(layer, role)

    def load(layer):
        return load_oriented(index, layer, role, params.compute_dtype)

    values = _pairwise(load, layers, kind, params, what=f"{role} layers of '{index.model_id}'")

    return SimilarityMatrix(values, kind, role, index.model_id, layers)

def expert_heatmap(index, layer, expert_role, kind, params=None):
    """Computes the similarity between every pair of experts in a layer.

    Parameters
    ----------
    index : :class:`.CheckpointIndex`
        The checkpoint.
    layer : :class:`int`
        The layer.
    expert_role : :class:`.Role`
        One of :attr:`.Role.ExpertW1`, :attr:`.Role.ExpertW2`
        and :attr:`.Role.ExpertW3`.
    kind : :class:`.IndexKind`
        The index.
    params : :class:`.SimilarityParams` or ``None``
        The parameters. If ``None``, the defaults are used.

    Returns
    -------
    :class:`SimilarityMatrix`
        The ``E × E`` matrix, labeled by expert index.

    Raises
    ------
    :exc:`.ArgError`
        If the role is not an expert role, or the layer
        has fewer than 2 experts for it.
    """

    params = SimilarityParams() if params is None else params

    if isinstance(expert_role, str):
        expert_role = Role.parse(expert_role)

    if not expert_role.is_expert:
        raise util.ArgError(f"{expert_role.value} is not an expert role")

    experts = index.experts(layer, expert_role)
    if len(experts) < 2:
        raise util.ArgError(f"Layer {layer} has {len(experts)} {expert_role.value} expert(s); at least 2 are needed")

    def load(expert):
        return load_oriented(index, layer, RoleTag(expert_role, expert), params.compute_dtype)

    values = _pairwise(load, experts, kind, params, what=f"{expert_role.value} experts of layer {layer}")

    return SimilarityMatrix(values, kind, expert_role, index.model_id, experts)
