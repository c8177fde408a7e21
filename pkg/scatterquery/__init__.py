from __future__ import absolute_import

from . import autodiff
from . import config
from . import datasets
from . import evaluation_metrics
from . import labels
from . import loss
from . import model
from . import polsar
from . import processor
from . import queries
from . import solver
from . import utils

__version__ = '0.1.0'
