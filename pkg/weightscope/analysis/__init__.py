"""Similarity matrices over layers and experts, and statistics derived from them."""

from .heatmap import *
from .stats   import *
from .ortho   import *
from .ratio   import *
