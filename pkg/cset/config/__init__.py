from . import config as config
from .config import settings
