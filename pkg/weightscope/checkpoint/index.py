"""Indexing the weight matrices of a checkpoint."""

import logging
import pathlib

from .. import io
from .. import util
from .naming import NamingConfig

__all__ = [
    "CheckpointIndex",
    "build_index",
    "open_checkpoint",
]

logger = logging.getLogger(__name__)

class CheckpointIndex:
    """The tensors of a checkpoint and the slots they fill.

    A :class:`CheckpointIndex` is immutable once built and may be
    shared between threads.

    Parameters
    ----------
    records : iterable of :class:`.TensorRecord`
        Every tensor of the checkpoint.
    layer_map : :class:`dict`
        A mapping of ``(layer, role)`` slots to tensor names.
        No tensor may fill two slots.
    model_id : :class:`str`
        A name for the checkpoint, used in outputs.

    Attributes
    ----------
    records : :class:`tuple` of :class:`.TensorRecord`
        Every tensor of the checkpoint.
    layer_map : :class:`dict`
        The mapping of ``(layer, role)`` slots to tensor names,
        sorted by layer and then role.
    num_layers : :class:`int`
        One more than the highest mapped layer, or ``0``
        if nothing is mapped.
    model_id : :class:`str`
        The name of the checkpoint.
    """

    def __init__(self, records, layer_map, model_id=""):
        self.records  = tuple(records)
        self.model_id = model_id

        self._by_name = {record.name: record for record in self.records}

        self.layer_map = dict(sorted(
            layer_map.items(),

            key = lambda item: (item[0][0], item[0][1].sort_key()),
        ))

        if len(set(self.layer_map.values())) != len(self.layer_map):
            raise ValueError("A tensor fills more than one slot")

        for name in self.layer_map.values():
            if name not in self._by_name:
                raise ValueError(f"Slot refers to unknown tensor '{name}'")

        self.num_layers = 1 + max((layer for layer, _ in self.layer_map), default=-1)

    def __contains__(self, slot):
        return slot in self.layer_map

    def __len__(self):
        return len(self.layer_map)

    def __repr__(self):
        return f"{type(self).__qualname__}(model_id={self.model_id!r}, num_layers={self.num_layers}, slots={len(self.layer_map)})"

    def record(self, name):
        """Gets the record of a tensor by name.

        Parameters
        ----------
        name : :class:`str`
            The tensor name.

        Returns
        -------
        :class:`.TensorRecord`
            The record.

        Raises
        ------
        :exc:`KeyError`
            If there is no such tensor.
        """

        return self._by_name[name]

    def slot(self, layer, role):
        """Gets the record filling a slot.

        Parameters
        ----------
        layer : :class:`int`
            The layer.
        role : :class:`.RoleTag`
            The role.

        Returns
        -------
        :class:`.TensorRecord`
            The record.

        Raises
        ------
        :exc:`.SlotNotFoundError`
            If the slot is empty.
        """

        name = self.layer_map.get((layer, role))
        if name is None:
            raise util.SlotNotFoundError(layer, role)

        return self._by_name[name]

    def roles(self):
        """Gets the roles with at least one filled slot.

        Returns
        -------
        :class:`list` of :class:`.RoleTag`
            The roles, sorted.
        """

        return sorted({role for _, role in self.layer_map}, key=lambda role: role.sort_key())

    def layers(self, role):
        """Gets the layers in which a role is filled.

        Parameters
        ----------
        role : :class:`.RoleTag`
            The role.

        Returns
        -------
        :class:`list` of :class:`int`
            The layers, ascending.
        """

        return sorted(layer for layer, slot_role in self.layer_map if slot_role == role)

    def experts(self, layer, role):
        """Gets the experts filled for an expert role in a layer.

        Parameters
        ----------
        layer : :class:`int`
            The layer.
        role : :class:`.Role`
            The expert role, e.g. :attr:`.Role.ExpertW1`.

        Returns
        -------
        :class:`list` of :class:`int`
            The expert indices, ascending.
        """

        return sorted(
            slot_role.expert

            for slot_layer, slot_role in self.layer_map

            if slot_layer == layer and slot_role.role is role
        )

def build_index(records, naming_config, *, model_id=""):
    """Builds a :class:`CheckpointIndex` from tensor records.

    Parameters
    ----------
    records : iterable of :class:`.TensorRecord`
        The tensors, possibly from several shards.
    naming_config : :class:`.NamingConfig` or :class:`str`
        The naming configuration, or a preset name or path to load one from.
    model_id : :class:`str`
        A name for the checkpoint.

    Returns
    -------
    :class:`CheckpointIndex`
        The index.

    Raises
    ------
    :exc:`.DuplicateTensorError`
        If two tensors share a name, or two tensors map to the same slot.
    :exc:`.ShapeError`
        If a tensor mapped to a slot is not 2-D with nonzero dimensions.
    """

    naming_config = NamingConfig.load(naming_config)

    records   = list(records)
    seen      = set()
    layer_map = {}

    for record in records:
        if record.name in seen:
            raise util.DuplicateTensorError(record.name)

        seen.add(record.name)

        slot = naming_config.match(record.name)
        if slot is None:
            continue

        if record.ndim != 2 or 0 in record.shape:
            raise util.ShapeError(record.name, record.shape)

        if slot in layer_map:
            raise util.DuplicateTensorError(record.name, slot)

        layer_map[slot] = record.name

    return CheckpointIndex(records, layer_map, model_id)

def _container_records(path):
    if path.is_dir():
        shards = sorted(path.glob("*.safetensors"))
        if len(shards) > 0:
            return [record for shard in shards for record in io.read_safetensors(shard)]

        return io.read_npy_dir(path)

    if not path.exists():
        raise util.ParseError(path, "no such file or directory")

    if path.suffix == ".npy":
        return [io.read_npy(path)]

    return io.read_safetensors(path)

def open_checkpoint(path, naming_config, *, model_id=None):
    """Opens a checkpoint and indexes its weight matrices.

    Only container headers are read; tensor data is mapped
    from disk when matrices are loaded.

    Parameters
    ----------
    path : path-like or :class:`list` of path-like
        A safetensors file, an NPY file, a directory of
        safetensors shards or of NPY files, or a list of
        any of these to merge as shards of one checkpoint.
    naming_config : :class:`.NamingConfig` or :class:`str`
        The naming configuration, or a preset name or path to load one from.
    model_id : :class:`str` or ``None``
        A name for the checkpoint. If ``None``, the
        name of the (first) path is used.

    Returns
    -------
    :class:`CheckpointIndex`
        The index.

    Raises
    ------
    :exc:`.ParseError`
        If a container is malformed or missing.
    :exc:`.DuplicateTensorError`
        If a tensor name appears twice across all shards,
        or two tensors map to the same slot.
    :exc:`.ShapeError`
        If a tensor mapped to a slot is not 2-D.
    """

    if isinstance(path, (list, tuple)):
        paths = [pathlib.Path(p) for p in path]
    else:
        paths = [pathlib.Path(path)]

    if model_id is None:
        model_id = paths[0].stem if len(paths) > 0 else ""

    records = [record for p in paths for record in _container_records(p)]
    index   = build_index(records, naming_config, model_id=model_id)

    logger.info(
        "Opened checkpoint '%s': %d tensors, %d slots over %d layers",

        model_id, len(index.records), len(index.layer_map), index.num_layers,
    )

    return index
