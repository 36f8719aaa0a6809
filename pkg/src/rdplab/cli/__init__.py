# flake8: noqa
# isort: skip_file

from .config import *
from .specs import *
from .output import *
from .commands import *
