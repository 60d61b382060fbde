from . import platt as platt

from .common import *
from .platt import TemperatureFit, nll, fit_temperature, apply_temperature
