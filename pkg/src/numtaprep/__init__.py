"""
Cleaning pipeline for scanned handwritten digit images and a
classical-classifier bench comparing raw and preprocessed inputs.
"""

from .constants import *
from .errors import *
from .utils import *
from .raster import *
from .binarize import *
from .contours import *
from .pipeline import *
from .pnm import *
from .dataset import *
from .learners import *
