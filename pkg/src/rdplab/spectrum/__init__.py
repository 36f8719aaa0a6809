# flake8: noqa
# isort: skip_file

from .spectrum import *
from .information_rate import *
