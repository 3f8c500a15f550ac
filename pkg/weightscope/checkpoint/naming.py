"""Mapping tensor names to weight-matrix slots.

A naming configuration is a JSON document of the form::

    {"patterns": [{"regex": "...", "role": "MlpUp"}, ...]}

Every regex must contain a named group ``layer``, and regexes
for expert roles must also contain a named group ``expert``.
A tensor name maps to the slot of the first pattern which
matches the *whole* name.
"""

import dataclasses
import importlib.resources
import json
import pathlib
import re

from .. import util
from .roles import Role, RoleTag

__all__ = [
    "PRESETS",
    "NamingPattern",
    "NamingConfig",
]

#: The names of the built-in naming configurations.
PRESETS = ("llama", "gemma", "mixtral")

@dataclasses.dataclass(frozen=True)
class NamingPattern:
    """A regex mapping tensor names to a :class:`.Role`.

    Parameters
    ----------
    regex : :class:`re.Pattern`
        The compiled regex.
    role : :class:`.Role`
        The role of matching tensors.
    """

    regex: re.Pattern
    role:  Role

    @classmethod
    def from_json(cls, entry):
        """Makes a :class:`NamingPattern` from its JSON form.

        Parameters
        ----------
        entry : :class:`dict`
            The object with ``"regex"`` and ``"role"`` keys.

        Returns
        -------
        :class:`NamingPattern`
            The validated pattern.

        Raises
        ------
        :exc:`.ConfigError`
            If the entry is malformed.
        """

        if not isinstance(entry, dict) or not isinstance(entry.get("regex"), str) or not isinstance(entry.get("role"), str):
            raise util.ConfigError(f"Naming pattern {entry!r} must be an object with string 'regex' and 'role'")

        try:
            regex = re.compile(entry["regex"])
        except re.error as e:
            raise util.ConfigError(f"Invalid naming regex {entry['regex']!r}: {e}") from None

        role = Role.parse(entry["role"])

        groups = regex.groupindex
        if "layer" not in groups:
            raise util.ConfigError(f"Naming regex {regex.pattern!r} lacks a named group 'layer'")

        if role.is_expert and "expert" not in groups:
            raise util.ConfigError(f"Naming regex {regex.pattern!r} for {role.value} lacks a named group 'expert'")

        if not role.is_expert and "expert" in groups:
            raise util.ConfigError(f"Naming regex {regex.pattern!r} for {role.value} must not have a group 'expert'")

        return cls(regex, role)

    def match(self, name):
        """Matches a tensor name.

        Parameters
        ----------
        name : :class:`str`
            The tensor name.

        Returns
        -------
        pair of :class:`int` and :class:`.RoleTag` or ``None``
            The ``(layer, role)`` slot, or ``None`` if the name does not match.
        """

        match = self.regex.fullmatch(name)
        if match is None:
            return None

        expert = None
        if self.role.is_expert:
            expert = int(match.group("expert"))

        return int(match.group("layer")), RoleTag(self.role, expert)

@dataclasses.dataclass(frozen=True)
class NamingConfig:
    """An ordered collection of :class:`NamingPattern`\\s.

    Parameters
    ----------
    patterns : :class:`tuple` of :class:`NamingPattern`
        The patterns, tried in order.
    name : :class:`str` or ``None``
        Where the configuration came from, for messages.

    Examples
    --------
    >>> from weightscope.checkpoint import NamingConfig
    >>> llama = NamingConfig.load("llama")
    >>> layer, role = llama.match("model.layers.7.mlp.up_proj.weight")
    >>> layer, str(role)
    (7, 'MlpUp')
    >>> llama.match("model.embed_tokens.weight") is None
    True
    """

    patterns: tuple
    name:     str = None

    @classmethod
    def from_json(cls, document, *, name=None):
        """Makes a :class:`NamingConfig` from its JSON form.

        Parameters
        ----------
        document : :class:`dict`
            The decoded JSON document.
        name : :class:`str` or ``None``
            Where the document came from.

        Returns
        -------
        :class:`NamingConfig`
            The validated configuration.

        Raises
        ------
        :exc:`.ConfigError`
            If the document is malformed.
        """

        if not isinstance(document, dict) or not isinstance(document.get("patterns"), list):
            raise util.ConfigError(f"Naming config '{name}' must be an object with a 'patterns' list")

        return cls(tuple(NamingPattern.from_json(entry) for entry in document["patterns"]), name)

    @classmethod
    def preset(cls, name):
        """Loads a built-in naming configuration.

        Parameters
        ----------
        name : :class:`str`
            One of :data:`PRESETS`.

        Returns
        -------
        :class:`NamingConfig`
            The configuration.
        """

        if name not in PRESETS:
            raise util.ConfigError(f"Unknown naming preset '{name}'; expected one of {', '.join(PRESETS)}")

        text = importlib.resources.files("weightscope.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")

        return cls.from_json(json.loads(text), name=name)

    @classmethod
    def load(cls, preset_or_path):
        """Loads a naming configuration by preset name or from a file.

        Parameters
        ----------
        preset_or_path : :class:`str` or path-like
            A name in :data:`PRESETS`, or the path of a JSON document.

        Returns
        -------
        :class:`NamingConfig`
            The configuration.

        Raises
        ------
        :exc:`.ConfigError`
            If the preset is unknown, or the file cannot be read or is malformed.
        """

        if isinstance(preset_or_path, NamingConfig):
            return preset_or_path

        if isinstance(preset_or_path, str) and preset_or_path in PRESETS:
            return cls.preset(preset_or_path)

        path = pathlib.Path(preset_or_path)

        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise util.ConfigError(f"Naming config '{path}' is neither a preset ({', '.join(PRESETS)}) nor a file") from None
        except (OSError, ValueError) as e:
            raise util.ConfigError(f"Cannot read naming config '{path}': {e}") from None

        return cls.from_json(document, name=str(path))

    def match(self, name):
        """Maps a tensor name to its slot.

        Parameters
        ----------
        name : :class:`str`
            The tensor name.

        Returns
        -------
        pair of :class:`int` and :class:`.RoleTag` or ``None``
            The ``(layer, role)`` slot of the first matching
            pattern, or ``None`` if no pattern matches.
        """

        for pattern in self.patterns:
            slot = pattern.match(name)
            if slot is not None:
                return slot

        return None
