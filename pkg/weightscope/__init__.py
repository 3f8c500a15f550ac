import importlib.metadata

# Dynamically get version.
__version__ = importlib.metadata.version(__name__)

# Remove import from our exported variables
del importlib

from .checkpoint import *
from .simcore    import *
from .analysis   import *

from . import io
from . import util
from . import verify
from . import report
from . import test
