"""The roles weight matrices play in a transformer layer."""

import dataclasses
import enum

from .. import util

__all__ = [
    "Role",
    "RoleTag",
]

class Role(enum.Enum):
    """The role of a weight matrix within a layer.

    Expert roles name one of the matrices of a
    Mixture-of-Experts feed-forward block.

    Examples
    --------
    >>> from weightscope.checkpoint import Role
    >>> Role.parse("mlp_up")
    <Role.MlpUp: 'MlpUp'>
    >>> Role.MlpUp.transposed
    True
    >>> Role.Wo.transposed
    False
    """

    Wq       = "Wq"
    Wk       = "Wk"
    Wv       = "Wv"
    Wo       = "Wo"
    MlpUp    = "MlpUp"
    MlpDown  = "MlpDown"
    MlpGate  = "MlpGate"
    ExpertW1 = "ExpertW1"
    ExpertW2 = "ExpertW2"
    ExpertW3 = "ExpertW3"

    @property
    def is_expert(self):
        """Whether the role belongs to a Mixture-of-Experts block."""

        return self in _EXPERT_ROLES

    @property
    def transposed(self):
        """Whether matrices of this role are transposed when oriented.

        Rows of a stored weight matrix are output dimensions, so
        matrices which project *out of* the hidden dimension store
        one neuron per row and are transposed to put neurons in
        columns. Matrices which project back *into* the hidden
        dimension already store one neuron per column.
        """

        return self in _TRANSPOSED_ROLES

    @classmethod
    def parse(cls, text):
        """Parses a :class:`Role` from its name.

        Matching ignores case and underscores.

        Parameters
        ----------
        text : :class:`str`
            The name, e.g. ``"MlpUp"`` or ``"mlp_up"``.

        Returns
        -------
        :class:`Role`
            The parsed role.

        Raises
        ------
        :exc:`.ConfigError`
            If no role has that name.
        """

        key = text.replace("_", "").lower()
        for role in cls:
            if role.value.lower() == key:
                return role

        raise util.ConfigError(f"Unknown role '{text}'; expected one of {', '.join(role.value for role in cls)}")

_EXPERT_ROLES = frozenset({Role.ExpertW1, Role.ExpertW2, Role.ExpertW3})

_TRANSPOSED_ROLES = frozenset({
    Role.Wq,
    Role.Wk,
    Role.Wv,
    Role.MlpUp,
    Role.MlpGate,
    Role.ExpertW1,
    Role.ExpertW3,
})

@dataclasses.dataclass(frozen=True)
class RoleTag:
    """A :class:`Role` together with its expert index, if any.

    Parameters
    ----------
    role : :class:`Role`
        The role.
    expert : :class:`int` or ``None``
        The non-negative expert index for expert roles,
        and ``None`` for every other role.

    Raises
    ------
    :exc:`ValueError`
        If ``expert`` does not agree with ``role``.

    Examples
    --------
    >>> from weightscope.checkpoint import Role, RoleTag
    >>> str(RoleTag(Role.Wq))
    'Wq'
    >>> str(RoleTag(Role.ExpertW1, 3))
    'ExpertW1[3]'
    """

    role:   Role
    expert: int = None

    def __post_init__(self):
        if self.role.is_expert:
            if self.expert is None or self.expert < 0:
                raise ValueError(f"{self.role.value} requires a non-negative expert index, got {self.expert}")

        elif self.expert is not None:
            raise ValueError(f"{self.role.value} does not take an expert index")

    def sort_key(self):
        """Gets a key ordering tags by role, then expert."""

        return (list(Role).index(self.role), -1 if self.expert is None else self.expert)

    def __str__(self):
        if self.expert is None:
            return self.role.value

        return f"{self.role.value}[{self.expert}]"
