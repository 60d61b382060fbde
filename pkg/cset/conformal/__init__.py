from . import methods as methods
from . import scores as scores

from .methods import MethodSpec, ConformalModel, METHODS, NAIVE, APS, RAPS, LAC, FIXED_K
from .predictionSet import PredictionSet, PredictionBatch, as_sizes_and_covered
from .scores import conformity_score, score_matrix, label_scores
from .calibration import uniform_variates, calibrate, predict, predict_batch, set_size_given_u
