# flake8: noqa
# isort: skip_file

from .verify import *
from .grid import *
from .exact import *
from .deterministic import *
