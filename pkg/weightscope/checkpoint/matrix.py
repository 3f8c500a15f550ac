"""Loading and orienting weight matrices."""

import dataclasses
import logging

import numpy as np

from .. import io
from .. import util
from .roles import RoleTag

__all__ = [
    "COMPUTE_DTYPES",
    "resolve_compute_dtype",
    "WeightMatrix",
    "load_matrix",
    "load_raw",
    "orient_matrix",
    "load_oriented",
]

logger = logging.getLogger(__name__)

#: The dtypes computations may be carried out in.
COMPUTE_DTYPES = {
    "f32":     np.dtype(np.float32),
    "float32": np.dtype(np.float32),
    "f64":     np.dtype(np.float64),
    "float64": np.dtype(np.float64),
}

def resolve_compute_dtype(value):
    """Resolves a compute dtype.

    Parameters
    ----------
    value : :class:`str` or :class:`numpy.dtype` or type
        ``"f32"``, ``"float32"``, ``"f64"``, ``"float64"``
        or the corresponding NumPy dtype.

    Returns
    -------
    :class:`numpy.dtype`
        Either ``float32`` or ``float64``.

    Raises
    ------
    :exc:`.ArgError`
        If ``value`` is not one of those.

    Examples
    --------
    >>> from weightscope.checkpoint import resolve_compute_dtype
    >>> resolve_compute_dtype("f64")
    dtype('float64')
    """

    if isinstance(value, str):
        dtype = COMPUTE_DTYPES.get(value.lower())
    else:
        try:
            dtype = np.dtype(value)
        except TypeError:
            dtype = None

    if dtype is None or dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise util.ArgError(f"Compute dtype must be f32 or f64, got {value!r}")

    return dtype

@dataclasses.dataclass(frozen=True)
class WeightMatrix:
    """A dense weight matrix and where it came from.

    The data is read-only.

    Parameters
    ----------
    data : :class:`numpy.ndarray`
        The 2-D matrix.
    layer : :class:`int`
        The layer it belongs to.
    role : :class:`.RoleTag`
        The role it plays.
    oriented : :class:`bool`
        Whether :func:`orient_matrix` has been applied, making
        the columns the neuron vectors to be compared.
    """

    data:     np.ndarray
    layer:    int
    role:     RoleTag
    oriented: bool = False

    @property
    def n_rows(self):
        """The number of rows."""

        return self.data.shape[0]

    @property
    def n_cols(self):
        """The number of columns."""

        return self.data.shape[1]

    @property
    def shape(self):
        """The shape of the data."""

        return self.data.shape

def _decode(record, raw, dtype):
    if record.dtype is io.DType.BF16:
        raw = io.widen_bf16(raw)

    return raw.astype(dtype, copy=False)

def load_raw(index, name):
    """Loads a tensor's raw data without decoding.

    Parameters
    ----------
    index : :class:`.CheckpointIndex`
        The checkpoint.
    name : :class:`str`
        The tensor name.

    Returns
    -------
    :class:`numpy.ndarray`
        The read-only data in its storage dtype, with
        ``bfloat16`` as ``uint16`` bit patterns.

    Raises
    ------
    :exc:`KeyError`
        If there is no such tensor.
    """

    return index.record(name).memmap()

def load_matrix(index, layer, role, compute_dtype="f32"):
    """Loads the weight matrix filling a slot.

    The matrix is decoded to the compute dtype but not oriented.
    When no conversion is needed the data stays mapped from disk.

    Parameters
    ----------
    index : :class:`.CheckpointIndex`
        The checkpoint.
    layer : :class:`int`
        The layer.
    role : :class:`.RoleTag`
        The role.
    compute_dtype
        Anything accepted by :func:`resolve_compute_dtype`.

    Returns
    -------
    :class:`WeightMatrix`
        The matrix, with its stored shape.

    Raises
    ------
    :exc:`.SlotNotFoundError`
        If the slot is empty.
    :exc:`.NonFiniteError`
        If any entry decodes to NaN or infinity.
    """

    dtype  = resolve_compute_dtype(compute_dtype)
    record = index.slot(layer, role)

    if record.ndim != 2 or 0 in record.shape:
        raise util.ShapeError(record.name, record.shape)

    data = _decode(record, record.memmap(), dtype)

    non_finite = data.size - int(np.count_nonzero(np.isfinite(data)))
    if non_finite > 0:
        raise util.NonFiniteError(f"Tensor '{record.name}' (layer={layer}, role={role})", non_finite)

    if data.flags.writeable:
        data.flags.writeable = False

    logger.debug("Loaded '%s' as %s %s", record.name, data.dtype, data.shape)

    return WeightMatrix(data, layer, role)

def orient_matrix(w):
    """Orients a weight matrix so its columns are neuron vectors.

    Matrices of roles whose :attr:`.Role.transposed` is set
    are transposed; all others are returned as they are.

    Parameters
    ----------
    w : :class:`WeightMatrix`
        The unoriented matrix.

    Returns
    -------
    :class:`WeightMatrix`
        The oriented matrix.

    Raises
    ------
    :exc:`.StateError`
        If ``w`` is already oriented.
    """

    if w.oriented:
        raise util.StateError(f"Matrix for (layer={w.layer}, role={w.role}) is already oriented")

    data = w.data.T if w.role.role.transposed else w.data

    return dataclasses.replace(w, data=data, oriented=True)

def load_oriented(index, layer, role, compute_dtype="f32"):
    """Loads and orients the weight matrix filling a slot.

    Equivalent to ``orient_matrix(load_matrix(...))``.
    """

    return orient_matrix(load_matrix(index, layer, role, compute_dtype))
