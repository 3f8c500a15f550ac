"""Opening checkpoints and loading their weight matrices."""

from .roles  import *
from .naming import *
from .index  import *
from .matrix import *
