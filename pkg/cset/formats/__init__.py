from . import scoreUtils as scoreUtils
from . import modelUtils as modelUtils
from . import tableUtils as tableUtils

from .scoreUtils import load_scores, save_scores, CSV, BINARY, FORMATS
from .modelUtils import save_model, load_model
