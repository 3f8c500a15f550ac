"""Reading and writing safetensors containers.

A safetensors file is an 8-byte little-endian header length,
a JSON header of that length mapping tensor names to their
dtype, shape and data offsets, and then the tensor data. Data
offsets are relative to the first byte after the header.
"""

import logging
import pathlib

import numpy as np

from .. import util
from . import types
from .record import Record
from .tensor import DType, TensorRecord, narrow_bf16

__all__ = [
    "SafetensorsPreamble",
    "read_safetensors",
    "save_safetensors",
]

logger = logging.getLogger(__name__)

#: The header key reserved for free-form string metadata.
METADATA_KEY = "__metadata__"

class SafetensorsPreamble(Record):
    """Everything in a safetensors file before the tensor data.

    The header is padded with spaces to a multiple of 8 bytes
    when packed, so tensor data starts aligned.
    """

    header: types.PrefixedJSON(types.UInt64, pad_to=8)

def _parse_entry(path, name, entry, data_start, data_length):
    if not isinstance(entry, dict):
        raise util.ParseError(path, f"entry for tensor '{name}' is not an object")

    try:
        tag        = entry["dtype"]
        shape      = entry["shape"]
        begin, end = entry["data_offsets"]
    except (KeyError, TypeError, ValueError):
        raise util.ParseError(path, f"entry for tensor '{name}' lacks 'dtype', 'shape' or 'data_offsets'") from None

    if not isinstance(shape, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in shape):
        raise util.ParseError(path, f"tensor '{name}' has malformed shape {shape!r}")

    if not all(isinstance(x, int) and not isinstance(x, bool) for x in (begin, end)):
        raise util.ParseError(path, f"tensor '{name}' has malformed data offsets {entry['data_offsets']!r}")

    if not 0 <= begin <= end <= data_length:
        raise util.ParseError(path, f"tensor '{name}' data offsets [{begin}, {end}] exceed the {data_length} data bytes")

    if not isinstance(tag, str):
        raise util.ParseError(path, f"tensor '{name}' has malformed dtype {tag!r}")

    dtype = DType.from_tag(tag)
    if dtype is None:
        return begin, end, None

    return begin, end, TensorRecord(
        name        = name,
        dtype       = dtype,
        shape       = shape,
        byte_offset = data_start + begin,
        byte_length = end - begin,
        path        = path,
    )

def _check_overlaps(path, spans):
    spans = sorted(spans)

    for (_, previous_end, previous), (begin, _, name) in zip(spans, spans[1:]):
        if begin < previous_end:
            raise util.ParseError(path, f"data of tensors '{previous}' and '{name}' overlap")

def read_safetensors(path):
    """Reads the tensor records of a safetensors file.

    Only the header is read; tensor data stays on disk.

    Parameters
    ----------
    path : path-like
        The file to read.

    Returns
    -------
    :class:`list` of :class:`.TensorRecord`
        The records, in header order. Tensors with dtypes
        other than ``F64``, ``F32``, ``F16`` and ``BF16``
        are skipped with a warning.

    Raises
    ------
    :exc:`.ParseError`
        If the file is not a well-formed safetensors file.
    :exc:`.DuplicateTensorError`
        If the header names a tensor twice.
    """

    path      = pathlib.Path(path)
    file_size = path.stat().st_size

    with path.open("rb") as f:
        try:
            header_length = types.UInt64.unpack(f)
        except util.BufferOutOfDataError:
            raise util.ParseError(path, f"file of {file_size} bytes is too short for a header length") from None

        if header_length > file_size - types.UInt64.size():
            raise util.ParseError(path, f"header length {header_length} exceeds the file size {file_size}")

        f.seek(0)

        try:
            preamble = SafetensorsPreamble.unpack(f)
        except util.ParseError as e:
            raise util.ParseError(path, e.reason) from None

    data_start  = types.UInt64.size() + header_length
    data_length = file_size - data_start

    records = []
    spans   = []
    for name, entry in preamble.header.items():
        if name == METADATA_KEY:
            continue

        begin, end, record = _parse_entry(path, name, entry, data_start, data_length)
        if end > begin:
            spans.append((begin, end, name))

        if record is None:
            logger.warning("Skipping tensor '%s' in '%s' with unsupported dtype %r", name, path, entry["dtype"])

            continue

        records.append(record)

    _check_overlaps(path, spans)

    logger.debug("Read %d tensor records from '%s'", len(records), path)

    return records

def _storage_array(name, array, dtype):
    array = np.asarray(array)

    if dtype is None:
        dtype = DType.from_numpy(array.dtype)
        if dtype is None:
            raise ValueError(f"Cannot infer a storage dtype for tensor '{name}' of dtype {array.dtype}")

    elif isinstance(dtype, str):
        dtype = DType(dtype.lower())

    if dtype is DType.BF16:
        if array.dtype == np.uint16:
            return dtype, np.ascontiguousarray(array, dtype="<u2")

        return dtype, narrow_bf16(array)

    return dtype, np.ascontiguousarray(array, dtype=dtype.storage)

def save_safetensors(path, tensors, dtypes=None, *, metadata=None):
    """Writes tensors to a safetensors file.

    Parameters
    ----------
    path : path-like
        The file to write.
    tensors : :class:`dict`
        A mapping of tensor names to arrays, written in order.
    dtypes : :class:`dict` or ``None``
        A mapping of tensor names to the :class:`.DType` (or its
        value, e.g. ``"bf16"``) to store them as. Tensors not
        named are stored in their own dtype.

        ``bfloat16`` tensors may be given as ``uint16`` bit
        patterns, which are written unchanged, or as floating
        point values, which are rounded to nearest even.
    metadata : :class:`dict` or ``None``
        Free-form string metadata for the header.

    Returns
    -------
    :class:`list` of :class:`.TensorRecord`
        The records of the written tensors.
    """

    path   = pathlib.Path(path)
    dtypes = {} if dtypes is None else dtypes

    header = {}
    if metadata is not None:
        header[METADATA_KEY] = {str(key): str(value) for key, value in metadata.items()}

    arrays = []
    offset = 0
    for name, array in tensors.items():
        dtype, data = _storage_array(name, array, dtypes.get(name))

        header[name] = dict(
            dtype        = dtype.tag,
            shape        = list(data.shape),
            data_offsets = [offset, offset + data.nbytes],
        )

        arrays.append(data)
        offset += data.nbytes

    with path.open("wb") as f:
        f.write(SafetensorsPreamble(header=header).pack())

        for data in arrays:
            f.write(data.tobytes(order="C"))

    logger.debug("Wrote %d tensors to '%s'", len(arrays), path)

    return read_safetensors(path)
