"""Custom exceptions.

Every error raised by :mod:`weightscope` derives from one of three
categories, which the command-line interface maps to exit codes:

- :exc:`ConfigError` for invalid run configuration.
- :exc:`IngestionError` for problems reading checkpoints.
- :exc:`NumericalError` for problems with the numbers themselves.
"""

__all__ = [
    "BufferOutOfDataError",
    "ConfigError",
    "IngestionError",
    "NumericalError",
    "ParseError",
    "DuplicateTensorError",
    "ShapeError",
    "SlotNotFoundError",
    "StateError",
    "NonFiniteError",
    "DimError",
    "ZeroColumnError",
    "DomainError",
    "ArgError",
    "UsageError",
]

class BufferOutOfDataError(EOFError):
    """Raised when a buffer runs out of data while unmarshaling a header."""

class ConfigError(ValueError):
    """An error in the configuration of a run.

    Parameters
    ----------
    message : :class:`str`
        A description of what is wrong.
    """

class IngestionError(Exception):
    """Base class for errors reading checkpoints."""

class NumericalError(Exception):
    """Base class for errors in numerical operations."""

class ParseError(IngestionError, ValueError):
    """An error indicating a checkpoint container could not be parsed.

    Parameters
    ----------
    path : path-like or ``None``
        The offending file, if known.
    reason : :class:`str`
        What was wrong with it.
    """

    def __init__(self, path, reason):
        self.path   = path
        self.reason = reason

        if path is None:
            super().__init__(f"Malformed checkpoint container: {reason}")
        else:
            super().__init__(f"Malformed checkpoint container '{path}': {reason}")

class DuplicateTensorError(IngestionError, ValueError):
    """An error indicating a tensor name or slot was defined twice.

    Parameters
    ----------
    name : :class:`str`
        The duplicated tensor name.
    slot : pair of :class:`int` and :class:`~.RoleTag` or ``None``
        The ``(layer, role)`` slot claimed twice, if the
        duplication is of a slot rather than of a name.
    """

    def __init__(self, name, slot=None):
        self.name = name
        self.slot = slot

        if slot is None:
            super().__init__(f"Duplicate tensor name '{name}'")
        else:
            layer, role = slot

            super().__init__(f"Tensor '{name}' maps to slot (layer={layer}, role={role}) which is already taken")

class ShapeError(IngestionError, ValueError):
    """An error indicating a tensor has an unusable shape.

    Parameters
    ----------
    name : :class:`str`
        The name of the tensor.
    shape : :class:`tuple` of :class:`int`
        Its shape.
    """

    def __init__(self, name, shape):
        self.name  = name
        self.shape = tuple(shape)

        super().__init__(f"Tensor '{name}' of shape {list(self.shape)} is not a 2-D weight matrix")

class SlotNotFoundError(IngestionError, LookupError):
    """An error indicating a ``(layer, role)`` slot is missing from a checkpoint.

    Parameters
    ----------
    layer : :class:`int`
        The requested layer.
    role : :class:`~.RoleTag`
        The requested role.
    """

    def __init__(self, layer, role):
        self.layer = layer
        self.role  = role

        super().__init__(f"No tensor for slot (layer={layer}, role={role})")

    def __str__(self):
        # 'LookupError' would otherwise quote the message.
        return self.args[0]

class StateError(IngestionError, RuntimeError):
    """An error indicating an operation was applied in the wrong state.

    Parameters
    ----------
    message : :class:`str`
        A description of the offending state.
    """

class NonFiniteError(IngestionError, ValueError):
    """An error indicating data contains NaN or infinite values.

    Parameters
    ----------
    what : :class:`str`
        A description of the data, e.g. a tensor name.
    count : :class:`int`
        How many entries are not finite.
    """

    def __init__(self, what, count):
        self.what  = what
        self.count = count

        super().__init__(f"{what} contains {count} non-finite value(s)")

class DimError(NumericalError, ValueError):
    """An error indicating mismatched dimensions.

    Parameters
    ----------
    message : :class:`str`
        A description of the mismatch.
    """

class ZeroColumnError(NumericalError, ValueError):
    """An error indicating a column has (numerically) zero norm.

    Parameters
    ----------
    column : :class:`int`
        The index of the offending column.
    which : :class:`str`
        Which operand the column belongs to.
    """

    def __init__(self, column, which="matrix"):
        self.column = column
        self.which  = which

        super().__init__(f"Column {column} of {which} has zero norm; its cosine similarity is undefined")

class DomainError(NumericalError, ValueError):
    """An error indicating input outside of an operation's domain.

    Parameters
    ----------
    message : :class:`str`
        A description of the problem.
    """

class ArgError(NumericalError, ValueError):
    """An error indicating an invalid argument value.

    Parameters
    ----------
    message : :class:`str`
        A description of the problem.
    """

class UsageError(NumericalError, ValueError):
    """An error indicating an operation was called for the wrong kind of input.

    Parameters
    ----------
    message : :class:`str`
        A description of the problem.
    """
