# flake8: noqa
# isort: skip_file

from .huffman import *
from .codec import *
from .quantizer import *
from .report import *
from .simulation import *
