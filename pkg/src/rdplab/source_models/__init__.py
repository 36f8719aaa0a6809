# flake8: noqa
# isort: skip_file

from .pmf import *
from .source import *
from .parsing import *
