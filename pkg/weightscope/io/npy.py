"""Reading and writing directories of NPY files.

Each ``<name>.npy`` file in a directory holds one tensor called
``<name>``. Versions 1.0, 2.0 and 3.0 of the NPY format are read;
version 1.0 is written unless the header does not fit, in which
case version 2.0 is.
"""

import ast
import logging
import pathlib

import numpy as np

from .. import util
from . import types
from .record import Record
from .tensor import DType, TensorRecord

__all__ = [
    "NpyPreamble",
    "read_npy",
    "read_npy_dir",
    "save_npy_dir",
]

logger = logging.getLogger(__name__)

#: Headers are padded so data starts at a multiple of this.
NPY_ALIGNMENT = 64

class NpyPreamble(Record):
    """The fixed part of an NPY file, before the header dictionary."""

    magic: types.Magic(b"\x93NUMPY")
    major: types.UInt8
    minor: types.UInt8

_HEADER_TYPES = {
    1: types.PrefixedString(types.UInt16, encoding="latin1"),
    2: types.PrefixedString(types.UInt32, encoding="latin1"),
    3: types.PrefixedString(types.UInt32, encoding="utf-8"),
}

def _parse_header(path, text):
    try:
        header = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise util.ParseError(path, f"header {text.strip()!r} is not a Python literal") from None

    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise util.ParseError(path, f"header {text.strip()!r} lacks 'descr', 'fortran_order' or 'shape'")

    try:
        numpy_dtype = np.dtype(header["descr"])
    except TypeError:
        raise util.ParseError(path, f"unknown dtype descriptor {header['descr']!r}") from None

    dtype = DType.from_numpy(numpy_dtype)
    if dtype is None:
        raise util.ParseError(path, f"unsupported dtype {numpy_dtype.str}; only little-endian f8, f4 and f2 are read")

    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(isinstance(x, int) for x in shape):
        raise util.ParseError(path, f"malformed shape {shape!r}")

    return dtype, shape, bool(header["fortran_order"])

def read_npy(path, name=None):
    """Reads the tensor record of an NPY file.

    Parameters
    ----------
    path : path-like
        The file to read.
    name : :class:`str` or ``None``
        The tensor's name. If ``None``, the file's stem is used.

    Returns
    -------
    :class:`.TensorRecord`
        The record.

    Raises
    ------
    :exc:`.ParseError`
        If the file is not a well-formed NPY file of a supported dtype.
    """

    path = pathlib.Path(path)
    if name is None:
        name = path.stem

    with path.open("rb") as f:
        try:
            preamble = NpyPreamble.unpack(f)

            header_type = _HEADER_TYPES.get(preamble.major)
            if header_type is None:
                raise util.ParseError(path, f"unsupported NPY version {preamble.major}.{preamble.minor}")

            text = header_type.unpack(f)

        except util.BufferOutOfDataError as e:
            raise util.ParseError(path, str(e)) from None

        except util.ParseError as e:
            if e.path is not None:
                raise

            raise util.ParseError(path, e.reason) from None

        data_start = f.tell()

    dtype, shape, fortran_order = _parse_header(path, text)

    record = TensorRecord(
        name          = name,
        dtype         = dtype,
        shape         = shape,
        byte_offset   = data_start,
        byte_length   = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize,
        path          = path,
        fortran_order = fortran_order,
    )

    file_size = path.stat().st_size
    if data_start + record.byte_length > file_size:
        raise util.ParseError(path, f"data needs {record.byte_length} bytes but only {file_size - data_start} remain")

    return record

def read_npy_dir(path):
    """Reads the tensor records of a directory of NPY files.

    Parameters
    ----------
    path : path-like
        The directory to read.

    Returns
    -------
    :class:`list` of :class:`.TensorRecord`
        The records, sorted by name.
    """

    path    = pathlib.Path(path)
    records = [read_npy(file) for file in sorted(path.glob("*.npy"))]

    logger.debug("Read %d tensor records from '%s'", len(records), path)

    return records

def _header_text(dtype, shape):
    text = repr({"descr": dtype.storage.str, "fortran_order": False, "shape": tuple(shape)})

    for major, prefix in ((1, types.UInt16), (2, types.UInt32)):
        # The header ends with a newline and pads to the alignment with spaces.
        unpadded = NpyPreamble().size() + prefix.size() + len(text) + 1
        padding  = -unpadded % NPY_ALIGNMENT
        padded   = text + " " * padding + "\n"

        if len(padded) < 2**(8 * prefix.size()):
            return major, padded

    raise ValueError(f"NPY header for shape {tuple(shape)} is too large")

def save_npy_dir(path, tensors):
    """Writes tensors to a directory of NPY files.

    Parameters
    ----------
    path : path-like
        The directory to write into, created if needed.
    tensors : :class:`dict`
        A mapping of tensor names to ``float64``, ``float32``
        or ``float16`` arrays. ``bfloat16`` cannot be stored.

    Returns
    -------
    :class:`list` of :class:`.TensorRecord`
        The records of the written tensors, sorted by name.
    """

    path = pathlib.Path(path)
    path.mkdir(parents=True, exist_ok=True)

    for name, array in tensors.items():
        array = np.asarray(array)

        dtype = DType.from_numpy(array.dtype)
        if dtype is None:
            raise ValueError(f"Cannot store tensor '{name}' of dtype {array.dtype} as NPY")

        major, text = _header_text(dtype, array.shape)

        with (path / f"{name}.npy").open("wb") as f:
            f.write(NpyPreamble(major=major, minor=0).pack())
            f.write(_HEADER_TYPES[major].pack(text))
            f.write(np.ascontiguousarray(array, dtype=dtype.storage).tobytes(order="C"))

    logger.debug("Wrote %d tensors to '%s'", len(tensors), path)

    return read_npy_dir(path)
