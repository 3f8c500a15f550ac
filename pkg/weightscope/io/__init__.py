r"""Marshaling of checkpoint containers.

Container headers are described with :class:`.Type`\s and
:class:`.Record`\s, and tensor data is mapped lazily from disk.
"""

from . import types

from .types       import *
from .record      import *
from .tensor      import *
from .safetensors import *
from .npy         import *
