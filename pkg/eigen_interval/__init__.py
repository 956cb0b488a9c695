__version__ = "0.1.0"

from .exceptions import *
from .hp_math import *
from .options import *
from .ensembles import *
from .kernels import *
from .exact_psi import *
from .sampling import *
from .asymptotics import *
from .report import *
from .tables import *
from .utils import *
