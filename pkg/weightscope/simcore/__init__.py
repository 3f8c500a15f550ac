"""Similarity indices between weight matrices."""

from .kinds     import *
from .cosine    import *
from .gumbel    import *
from .docs      import *
from .linalg    import *
from .baselines import *
