# flake8: noqa

from .errors import *
from .helpers import *
