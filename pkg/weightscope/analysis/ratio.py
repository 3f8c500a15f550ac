"""Comparing corresponding layers across checkpoints."""

import dataclasses
import logging

from .. import util
from ..checkpoint import load_oriented
from ..simcore    import IndexKind, SimilarityParams, similarity
from .heatmap     import as_role_tag

__all__ = [
    "LayerSeries",
    "RatioEntry",
    "RatioReport",
    "cross_model_series",
    "similarity_ratio",
]

logger = logging.getLogger(__name__)

@dataclasses.dataclass(frozen=True)
class LayerSeries:
    """The similarity of corresponding layers of two checkpoints.

    Parameters
    ----------
    role : :class:`.RoleTag`
        The compared role.
    kind : :class:`.IndexKind`
        The index used.
    model_a, model_b : :class:`str`
        The two checkpoints. ``model_a`` supplies ``X``.
    values : :class:`tuple` of :class:`float`
        The similarity of each layer, in layer order.
    """

    role:    object
    kind:    IndexKind
    model_a: str
    model_b: str
    values:  tuple

    @property
    def layers(self):
        return range(len(self.values))

@dataclasses.dataclass(frozen=True)
class RatioEntry:
    """The similarity ratio of one layer.

    Parameters
    ----------
    layer : :class:`int`
        The layer.
    sim_ab : :class:`float`
        The similarity of checkpoints ``A`` and ``B``.
    sim_ac : :class:`float`
        The similarity of checkpoints ``A`` and ``C``.
    ratio : :class:`float` or ``None``
        ``sim_ab / sim_ac``, or ``None`` when ``sim_ac <= 0``.
    """

    layer:  int
    sim_ab: float
    sim_ac: float
    ratio:  float = None

    @property
    def defined(self):
        return self.ratio is not None

@dataclasses.dataclass(frozen=True)
class RatioReport:
    """Per-layer similarity ratios between three checkpoints.

    Parameters
    ----------
    role : :class:`.RoleTag`
        The compared role.
    kind : :class:`.IndexKind`
        The index used.
    model_a, model_b, model_c : :class:`str`
        The three checkpoints.
    entries : :class:`tuple` of :class:`RatioEntry`
        One entry per layer.
    """

    role:    object
    kind:    IndexKind
    model_a: str
    model_b: str
    model_c: str
    entries: tuple

    @property
    def unnormalized(self):
        """Whether the index is unbounded, so ratios are not comparable across layers."""

        return not self.kind.bounded

    @property
    def ratios(self):
        return [entry.ratio for entry in self.entries]

def _check_compatible(index_a, index_b, role):
    if index_a.num_layers != index_b.num_layers:
        raise util.DimError(
            f"Checkpoints '{index_a.model_id}' and '{index_b.model_id}' have "
            f"{index_a.num_layers} and {index_b.num_layers} layers"
        )

    for layer in range(index_a.num_layers):
        shape_a = index_a.slot(layer, role).shape
        shape_b = index_b.slot(layer, role).shape

        if shape_a != shape_b:
            raise util.DimError(
                f"Slot (layer={layer}, role={role}) has shape {list(shape_a)} in "
                f"'{index_a.model_id}' but {list(shape_b)} in '{index_b.model_id}'"
            )

def _layer_values(index_a, index_b, role, kind, params):
    workers     = params.resolved_workers()
    pair_params = dataclasses.replace(params, workers=1)

    def compute(layer):
        x = load_oriented(index_a, layer, role, params.compute_dtype)
        y = load_oriented(index_b, layer, role, params.compute_dtype)

        return similarity(kind, x, y, pair_params).value

    return tuple(util.map_ordered(compute, range(index_a.num_layers), workers=workers))

def cross_model_series(index_a, index_b, role, kind, params=None):
    """Computes the similarity of each layer of one checkpoint with the same layer of another.

    Parameters
    ----------
    index_a, index_b : :class:`.CheckpointIndex`
        The checkpoints, e.g. a base model and its fine-tuned variant.
    role : :class:`.RoleTag` or :class:`.Role`
        The role to compare.
    kind : :class:`.IndexKind`
        The index.
    params : :class:`.SimilarityParams` or ``None``
        The parameters. If ``None``, the defaults are used.

    Returns
    -------
    :class:`LayerSeries`
        The per-layer similarities.

    Raises
    ------
    :exc:`.DimError`
        If the layer counts or the shapes of corresponding matrices differ.
    """

    params = SimilarityParams() if params is None else params
    role   = as_role_tag(role)

    _check_compatible(index_a, index_b, role)

    logger.info("Comparing %s layers of '%s' and '%s' with %s", role, index_a.model_id, index_b.model_id, kind.value)

    values = _layer_values(index_a, index_b, role, kind, params)

    return LayerSeries(role, kind, index_a.model_id, index_b.model_id, values)

def similarity_ratio(index_a, index_b, index_c, role, kind, params=None):
    """Computes per-layer similarity ratios between three checkpoints.

    For each layer the ratio is ``S(A, B) / S(A, C)``, where ``B``
    is typically derived from ``A`` and ``C`` is unrelated to it.
    A high ratio means the index tells related matrices from
    unrelated ones.

    Parameters
    ----------
    index_a, index_b, index_c : :class:`.CheckpointIndex`
        The checkpoints.
    role : :class:`.RoleTag` or :class:`.Role`
        The role to compare.
    kind : :class:`.IndexKind`
        The index.
    params : :class:`.SimilarityParams` or ``None``
        The parameters. If ``None``, the defaults are used.

    Returns
    -------
    :class:`RatioReport`
        The report. Ratios are ``None`` where ``S(A, C) <= 0``.

    Raises
    ------
    :exc:`.DimError`
        If the layer counts or the shapes of corresponding matrices differ.
    """

    params = SimilarityParams() if params is None else params
    role   = as_role_tag(role)

    _check_compatible(index_a, index_b, role)
    _check_compatible(index_a, index_c, role)

    if not kind.bounded:
        logger.warning("%s is unnormalized, so its similarity ratios are not comparable to those of other indices", kind.value)

    sim_ab = _layer_values(index_a, index_b, role, kind, params)
    sim_ac = _layer_values(index_a, index_c, role, kind, params)

    entries = []
    for layer, (ab, ac) in enumerate(zip(sim_ab, sim_ac)):
        if ac > 0:
            entries.append(RatioEntry(layer, ab, ac, ab / ac))
        else:
            logger.warning("Similarity ratio of layer %d is undefined since S(A, C) = %r", layer, ac)

            entries.append(RatioEntry(layer, ab, ac))

    return RatioReport(role, kind, index_a.model_id, index_b.model_id, index_c.model_id, tuple(entries))
