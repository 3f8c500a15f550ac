from .bits       import *
from .exceptions import *
from .parallel   import *
from .random     import *
