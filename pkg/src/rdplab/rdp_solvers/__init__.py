# flake8: noqa
# isort: skip_file

from .channel import *
from .tradeoff import *
from .blahut_arimoto import *
from .polytope import *
from .entropy_min import *
from .fixed_length import *
