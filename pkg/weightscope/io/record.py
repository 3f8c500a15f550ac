r"""Declarative records of :class:`.Type`\s."""

from .types import Type, _file_object

__all__ = [
    "DuplicateFieldError",
    "Record",
]

class DuplicateFieldError(Exception):
    """An error indicating a field was defined twice.

    Raised when declaring a field already declared in a parent :class:`Record`.

    Parameters
    ----------
    record_cls : subclass of :class:`Record`
        The :class:`Record` which duplicated a field.
    field : :class:`str`
        The name of the field which was duplicated.
    """

    def __init__(self, record_cls, field):
        super().__init__(f"Duplicate definition of '{field}' in record '{record_cls.__qualname__}'")

class Record:
    r"""A collection of values marshaled in sequence by :class:`.Type`\s.

    Fields are declared with annotations whose values are
    :class:`.Type`\s, and are marshaled in declaration order.
    Fields of parent :class:`Record`\s come first.

    To unpack a :class:`Record` from raw data, you should use
    the :meth:`unpack` method instead of the constructor.

    Parameters
    ----------
    **fields
        The names and corresponding values of the fields of
        the :class:`Record`. Unspecified fields take the default
        value of their :class:`.Type`.

    Raises
    ------
    :exc:`TypeError`
        If there are any superfluous keyword arguments.

    Examples
    --------
    >>> from weightscope.io import types, Record
    >>> class Preamble(Record):
    ...     version: types.UInt8
    ...     length:  types.UInt16
    ...
    >>> Preamble(version=1, length=2).pack()
    b'\x01\x02\x00'
    >>> Preamble.unpack(b"\x02\x10\x00")
    Preamble(version=2, length=16)
    """

    _fields = {}

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        fields = dict(cls._fields)

        # Read our own annotations only, not inherited ones.
        for name, field_type in cls.__dict__.get("__annotations__", {}).items():
            if name in fields:
                raise DuplicateFieldError(cls, name)

            if not (isinstance(field_type, type) and issubclass(field_type, Type)):
                raise TypeError(f"Field '{name}' of record '{cls.__qualname__}' is not annotated with a Type")

            fields[name] = field_type

        cls._fields = fields

    def __init__(self, **fields):
        for name, field_type in self._fields.items():
            if name in fields:
                setattr(self, name, fields.pop(name))
            else:
                setattr(self, name, field_type.default())

        if len(fields) != 0:
            raise TypeError(f"Unexpected keyword arguments for '{type(self).__qualname__}': {fields}")

    @classmethod
    def field_types(cls):
        r"""Gets the field names and their :class:`.Type`\s.

        Returns
        -------
        :class:`dict`
            The mapping of field name to :class:`.Type`, in order.
        """

        return dict(cls._fields)

    @classmethod
    def unpack(cls, buf):
        """Unpacks a :class:`Record` from raw data.

        Parameters
        ----------
        buf : file object or :class:`bytes` or :class:`bytearray`
            The buffer containing the raw data.

        Returns
        -------
        :class:`Record`
            The unpacked :class:`Record`.
        """

        buf = _file_object(buf)

        return cls(**{
            name: field_type.unpack(buf)

            for name, field_type in cls._fields.items()
        })

    def pack(self):
        """Packs the :class:`Record` into raw data.

        Returns
        -------
        :class:`bytes`
            The packed data.
        """

        return b"".join(
            field_type.pack(getattr(self, name))

            for name, field_type in self._fields.items()
        )

    def size(self):
        """Gets the packed size of the :class:`Record`.

        Returns
        -------
        :class:`int`
            The size in bytes.
        """

        return sum(
            field_type.size(getattr(self, name))

            for name, field_type in self._fields.items()
        )

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented

        return all(getattr(self, name) == getattr(other, name) for name in self._fields)

    def __repr__(self):
        fields = ", ".join(f"{name}={getattr(self, name)!r}" for name in self._fields)

        return f"{type(self).__qualname__}({fields})"
