r""":class:`Type`\s for marshaling checkpoint container headers.

A :class:`Type` is a definition of how to marshal raw data to and
from values. :class:`Type`\s are never instantiated; parametrised
:class:`Type`\s are made by *calling* a :class:`Type`, which returns
a new subclass::

    >>> import weightscope
    >>> from weightscope.io import types
    >>> prefixed = types.PrefixedString(types.UInt8)
    >>> prefixed
    <class 'weightscope.io.types.PrefixedString(UInt8)'>
    >>> prefixed.pack("abc")
    b'\x03abc'
    >>> prefixed.unpack(b"\x03abc")
    'abc'
"""

import io
import json
import struct

from .. import util

__all__ = [
    "Type",
    "StructType",
    "UInt8",
    "UInt16",
    "UInt32",
    "UInt64",
    "RawBytes",
    "Magic",
    "PrefixedString",
    "PrefixedJSON",
]

def _file_object(buf):
    if isinstance(buf, (bytes, bytearray, memoryview)):
        return io.BytesIO(buf)

    return buf

def _read_exactly(buf, length, what):
    data = buf.read(length)
    if len(data) < length:
        raise util.BufferOutOfDataError(f"Reading {what} failed: wanted {length} bytes, got {len(data)}")

    return data

class Type:
    r"""A definition of how to marshal raw data to and from values.

    Subclasses implement :meth:`_unpack` and :meth:`_pack`, and
    may set :attr:`_size` and :attr:`_default`.

    When a :class:`Type` is called, its :meth:`_call` classmethod
    is invoked, returning a new :class:`Type`.
    """

    #: The packed size of the :class:`Type` irrespective of value, if any.
    _size = None

    #: The default value of the :class:`Type`.
    _default = None

    @staticmethod
    def _not_implemented_call(cls, *args, **kwargs):
        raise NotImplementedError(f"'{cls.__qualname__}' cannot be called")

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        # Calling a 'Type' goes through '_call' rather than
        # constructing an instance.
        cls.__new__ = cls._call.__func__

        if cls.__new__ is Type._call.__func__:
            cls.__new__ = Type._not_implemented_call

    def __init__(self):
        raise TypeError("Types do not get initialized normally.")

    @classmethod
    def size(cls, value=None):
        """Gets the size of the :class:`Type` when packed.

        Parameters
        ----------
        value
            The value to get the packed size of.

            If ``None``, then the static size is returned.

        Returns
        -------
        :class:`int` or ``None``
            The size in bytes, or ``None`` if ``value`` is ``None``
            and the :class:`Type` has no static size.
        """

        if value is None:
            return cls._size

        if cls._size is not None:
            return cls._size

        return len(cls.pack(value))

    @classmethod
    def default(cls):
        """Gets the default value of the :class:`Type`.

        Returns
        -------
        any
            The default value.
        """

        return cls._default

    @classmethod
    def unpack(cls, buf):
        """Unpacks raw data into its corresponding value.

        Parameters
        ----------
        buf : file object or :class:`bytes` or :class:`bytearray`
            The buffer containing the raw data.

        Returns
        -------
        any
            The corresponding value of the buffer.

        Raises
        ------
        :exc:`.BufferOutOfDataError`
            If the buffer ends before the value does.
        """

        return cls._unpack(_file_object(buf))

    @classmethod
    def pack(cls, value):
        """Packs a value into its corresponding raw data.

        Parameters
        ----------
        value
            The value to pack.

        Returns
        -------
        :class:`bytes`
            The corresponding raw data.
        """

        return cls._pack(value)

    @classmethod
    def _unpack(cls, buf):
        raise NotImplementedError(f"'{cls.__qualname__}' has not implemented '_unpack'")

    @classmethod
    def _pack(cls, value):
        raise NotImplementedError(f"'{cls.__qualname__}' has not implemented '_pack'")

    @classmethod
    def make_type(cls, name, bases=None, /, **namespace):
        r"""Utility for generating new :class:`Type`\s.

        Parameters
        ----------
        name : :class:`str`
            The new :class:`Type`'s name.
        bases : :class:`tuple` or ``None``
            The new :class:`Type`'s bases.

            If ``None``, then ``(cls,)`` is used.
        **namespace
            The attributes and corresponding values of the new :class:`Type`.

        Returns
        -------
        subclass of :class:`Type`
            The new :class:`Type`.
        """

        if bases is None:
            bases = (cls,)

        return type(name, bases, namespace)

    @classmethod
    def _call(cls):
        raise NotImplementedError

class StructType(Type):
    """A wrapper over :func:`struct.pack` and :func:`struct.unpack`.

    Attributes
    ----------
    fmt : :class:`str`
        The format string for the structure,
        not including the endianness prefix.
    endian : :class:`str`
        The endianness prefix used in :mod:`struct`.

        Checkpoint containers are little-endian,
        so that is the default.
    """

    #: :meta private:
    fmt = None

    #: :meta private:
    endian = "<"

    _default = 0

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        if cls.fmt is not None:
            cls._struct = struct.Struct(f"{cls.endian}{cls.fmt}")
            cls._size   = cls._struct.size

    @classmethod
    def _unpack(cls, buf):
        return cls._struct.unpack(_read_exactly(buf, cls._struct.size, cls.__qualname__))[0]

    @classmethod
    def _pack(cls, value):
        return cls._struct.pack(value)

class UInt8(StructType):
    """An unsigned 8-bit integer."""

    fmt = "B"

class UInt16(StructType):
    """An unsigned, little-endian 16-bit integer."""

    fmt = "H"

class UInt32(StructType):
    """An unsigned, little-endian 32-bit integer."""

    fmt = "I"

class UInt64(StructType):
    """An unsigned, little-endian 64-bit integer."""

    fmt = "Q"

class RawBytes(Type):
    r"""A fixed number of raw bytes.

    Parameters
    ----------
    length : :class:`int`
        The number of bytes.

    Examples
    --------
    >>> from weightscope.io import types
    >>> types.RawBytes(2).unpack(b"\x01\x02\x03")
    b'\x01\x02'
    """

    length = None

    @classmethod
    def default(cls):
        return bytes(cls.length)

    @classmethod
    def _unpack(cls, buf):
        return _read_exactly(buf, cls.length, cls.__qualname__)

    @classmethod
    def _pack(cls, value):
        value = bytes(value)
        if len(value) != cls.length:
            raise ValueError(f"'{cls.__qualname__}' requires exactly {cls.length} bytes, got {len(value)}")

        return value

    @classmethod
    def _call(cls, length):
        return cls.make_type(
            f"{cls.__qualname__}({length})",

            length = length,
            _size  = length,
        )

class Magic(Type):
    r"""A fixed byte signature.

    Unpacking checks that the data matches the signature. Packing
    always produces the signature regardless of the value.

    Parameters
    ----------
    signature : :class:`bytes`
        The expected bytes.

    Examples
    --------
    >>> from weightscope.io import types
    >>> types.Magic(b"AB").unpack(b"ABC")
    b'AB'
    >>> types.Magic(b"AB").pack(None)
    b'AB'
    """

    signature = None

    @classmethod
    def default(cls):
        return cls.signature

    @classmethod
    def _unpack(cls, buf):
        data = _read_exactly(buf, len(cls.signature), cls.__qualname__)
        if data != cls.signature:
            raise util.ParseError(None, f"expected signature {cls.signature!r}, found {data!r}")

        return data

    @classmethod
    def _pack(cls, value):
        return cls.signature

    @classmethod
    def _call(cls, signature):
        return cls.make_type(
            f"{cls.__qualname__}({signature!r})",

            signature = bytes(signature),
            _size     = len(signature),
        )

class PrefixedString(Type):
    """A string prefixed by the length of its encoded data.

    Parameters
    ----------
    prefix : subclass of :class:`StructType`
        The :class:`Type` which prefixes the string data
        and represents its length in **bytes**.
    encoding : :class:`str` or ``None``
        The encoding to encode/decode the data.

        If ``None``, then the value of the :attr:`encoding`
        attribute is used.
    pad_to : :class:`int` or ``None``
        If not ``None``, packed string data is padded with
        trailing spaces until the *total* packed length,
        prefix included, is a multiple of ``pad_to``.
    """

    _default = ""

    prefix   = None
    encoding = "utf-8"
    pad_to   = None

    @classmethod
    def _decode(cls, data):
        try:
            return data.decode(cls.encoding)
        except UnicodeDecodeError as e:
            raise util.ParseError(None, f"header is not valid {cls.encoding}: {e}") from None

    @classmethod
    def _unpack(cls, buf):
        length = cls.prefix.unpack(buf)
        data   = _read_exactly(buf, length, f"{cls.__qualname__} data")

        return cls._decode(data)

    @classmethod
    def _pack(cls, value):
        data = value.encode(cls.encoding)

        if cls.pad_to is not None:
            remainder = (cls.prefix.size() + len(data)) % cls.pad_to
            if remainder != 0:
                data += b" " * (cls.pad_to - remainder)

        return cls.prefix.pack(len(data)) + data

    @classmethod
    def _call(cls, prefix, *, encoding=None, pad_to=None):
        if encoding is None:
            encoding = cls.encoding

        return cls.make_type(
            f"{cls.__qualname__}({prefix.__qualname__})",

            prefix   = prefix,
            encoding = encoding,
            pad_to   = pad_to,
        )

class PrefixedJSON(PrefixedString):
    """A JSON object prefixed by the length of its encoded data.

    Objects with duplicate keys are rejected with a
    :exc:`.DuplicateTensorError`, since JSON decoders would
    otherwise silently keep only the last occurrence.

    Parameters
    ----------
    prefix : subclass of :class:`StructType`
        The :class:`Type` which prefixes the JSON data.
    pad_to : :class:`int` or ``None``
        Forwarded to :class:`PrefixedString`.

    Examples
    --------
    >>> from weightscope.io import types
    >>> header = types.PrefixedJSON(types.UInt8)
    >>> header.pack({"a": 1})
    b'\\x07{"a":1}'
    >>> header.unpack(b'\\x07{"a":1}')
    {'a': 1}
    """

    _default = {}

    @staticmethod
    def _reject_duplicates(pairs):
        obj = {}
        for key, value in pairs:
            if key in obj:
                raise util.DuplicateTensorError(key)

            obj[key] = value

        return obj

    @classmethod
    def default(cls):
        return {}

    @classmethod
    def _unpack(cls, buf):
        text = super()._unpack(buf)

        try:
            value = json.loads(text, object_pairs_hook=cls._reject_duplicates)
        except json.JSONDecodeError as e:
            raise util.ParseError(None, f"header is not valid JSON: {e}") from None

        if not isinstance(value, dict):
            raise util.ParseError(None, "header is not a JSON object")

        return value

    @classmethod
    def _pack(cls, value):
        return super()._pack(json.dumps(value, separators=(",", ":")))

    @classmethod
    def _call(cls, prefix, *, pad_to=None):
        return cls.make_type(
            f"{cls.__qualname__}({prefix.__qualname__})",

            prefix   = prefix,
            encoding = "utf-8",
            pad_to   = pad_to,
        )
