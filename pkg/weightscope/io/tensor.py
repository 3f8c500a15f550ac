"""Descriptions of tensors stored in checkpoint containers."""

import dataclasses
import enum
import pathlib

import numpy as np

from .. import util

__all__ = [
    "DType",
    "TensorRecord",
    "widen_bf16",
    "narrow_bf16",
]

class DType(enum.Enum):
    """The storage dtype of a tensor.

    Examples
    --------
    >>> from weightscope.io import DType
    >>> DType.from_tag("BF16")
    <DType.BF16: 'bf16'>
    >>> DType.F16.itemsize
    2
    """

    F64  = "f64"
    F32  = "f32"
    F16  = "f16"
    BF16 = "bf16"

    @property
    def tag(self):
        """The dtype string used in safetensors headers."""

        return self.name

    @property
    def storage(self):
        """The :class:`numpy.dtype` the raw data is stored as.

        ``bfloat16`` has no NumPy counterpart, so its raw bit
        patterns are stored as little-endian ``uint16``.
        """

        return np.dtype(_STORAGE_DTYPES[self])

    @property
    def itemsize(self):
        """The size in bytes of one element."""

        return self.storage.itemsize

    @classmethod
    def from_tag(cls, tag):
        """Gets the :class:`DType` for a safetensors dtype string.

        Parameters
        ----------
        tag : :class:`str`
            The dtype string, e.g. ``"F32"``.

        Returns
        -------
        :class:`DType` or ``None``
            The corresponding :class:`DType`, or ``None`` if unsupported.
        """

        return cls.__members__.get(tag)

    @classmethod
    def from_numpy(cls, dtype):
        """Gets the :class:`DType` for a floating point :class:`numpy.dtype`.

        Parameters
        ----------
        dtype : :class:`numpy.dtype`
            The dtype, which must be ``float64``, ``float32`` or ``float16``.

        Returns
        -------
        :class:`DType` or ``None``
            The corresponding :class:`DType`, or ``None`` if unsupported.
        """

        dtype = np.dtype(dtype)
        if dtype.byteorder == ">":
            return None

        return _NUMPY_DTYPES.get(dtype.newbyteorder("<").str)

_STORAGE_DTYPES = {
    DType.F64:  "<f8",
    DType.F32:  "<f4",
    DType.F16:  "<f2",
    DType.BF16: "<u2",
}

_NUMPY_DTYPES = {
    "<f8": DType.F64,
    "<f4": DType.F32,
    "<f2": DType.F16,
}

def widen_bf16(bits):
    """Decodes ``bfloat16`` bit patterns into ``float32`` values.

    The 16 bits become the high half of a ``float32``, with the
    low 16 mantissa bits zero, which is exact.

    Parameters
    ----------
    bits : :class:`numpy.ndarray`
        The ``uint16`` bit patterns.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``float32`` values.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.io import widen_bf16
    >>> widen_bf16(np.array([0x3F80, 0xC000], dtype=np.uint16))
    array([ 1., -2.], dtype=float32)
    """

    return (np.asarray(bits, dtype=np.uint16).astype(np.uint32) << 16).view(np.float32)

def narrow_bf16(values):
    """Encodes values as ``bfloat16`` bit patterns.

    Values are first converted to ``float32`` and then rounded
    to the nearest ``bfloat16``, ties to even.

    Parameters
    ----------
    values : array-like
        The values to encode.

    Returns
    -------
    :class:`numpy.ndarray`
        The ``uint16`` bit patterns.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.io import narrow_bf16
    >>> [hex(x) for x in narrow_bf16(np.array([1.0, -2.0]))]
    ['0x3f80', '0xc000']
    """

    bits     = np.ascontiguousarray(values, dtype=np.float32).view(np.uint32).astype(np.uint64)
    rounding = ((bits >> 16) & 1) + (util.bit(15) - 1)

    return ((bits + rounding) >> 16).astype(np.uint16)

@dataclasses.dataclass(frozen=True)
class TensorRecord:
    """The location and layout of one tensor in a container file.

    Parameters
    ----------
    name : :class:`str`
        The tensor's name.
    dtype : :class:`DType`
        The storage dtype.
    shape : :class:`tuple` of :class:`int`
        The tensor's shape.
    byte_offset : :class:`int`
        The absolute offset of the tensor's data in :attr:`path`.
    byte_length : :class:`int`
        The length of the tensor's data, always
        ``product(shape) * dtype.itemsize``.
    path : :class:`pathlib.Path`
        The file containing the data.
    fortran_order : :class:`bool`
        Whether the data is laid out column-major.
    """

    name:          str
    dtype:         DType
    shape:         tuple
    byte_offset:   int
    byte_length:   int
    path:          pathlib.Path
    fortran_order: bool = False

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(x) for x in self.shape))
        object.__setattr__(self, "path",  pathlib.Path(self.path))

        if self.byte_offset < 0:
            raise util.ParseError(self.path, f"tensor '{self.name}' has negative offset {self.byte_offset}")

        if any(x < 0 for x in self.shape):
            raise util.ParseError(self.path, f"tensor '{self.name}' has negative dimension in {list(self.shape)}")

        expected = self.element_count * self.dtype.itemsize
        if self.byte_length != expected:
            raise util.ParseError(
                self.path,

                f"tensor '{self.name}' of shape {list(self.shape)} and dtype {self.dtype.tag} "
                f"needs {expected} bytes but spans {self.byte_length}"
            )

    @property
    def ndim(self):
        """The number of dimensions."""

        return len(self.shape)

    @property
    def element_count(self):
        """The number of elements."""

        return int(np.prod(self.shape, dtype=np.int64))

    def memmap(self):
        """Maps the tensor's raw data into memory, read-only.

        Pages are read from disk on demand.

        Returns
        -------
        :class:`numpy.ndarray`
            The raw data in the storage dtype. ``bfloat16``
            tensors are returned as ``uint16`` bit patterns.
        """

        order = "F" if self.fortran_order else "C"

        if self.byte_length == 0:
            return np.empty(self.shape, dtype=self.dtype.storage, order=order)

        return np.memmap(
            self.path,

            dtype  = self.dtype.storage,
            mode   = "r",
            offset = self.byte_offset,
            shape  = self.shape,
            order  = order,
        )
