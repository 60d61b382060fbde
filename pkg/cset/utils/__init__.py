from . import fsUtils as fs
from . import msgUtils as msg
from . import pyUtils as py
from . import rngUtils as rng
from . import errors as errors

from .errors import DataError, ConfigError
