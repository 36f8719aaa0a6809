# flake8: noqa
# isort: skip_file

from .measures import *
from .estimators import *
