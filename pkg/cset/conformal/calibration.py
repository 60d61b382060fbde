from .. import utils
from .. import ops
from .. import structures

from . import methods
from . import scores as scoring
from .predictionSet import PredictionSet, PredictionBatch

np = utils.py.loadExternalModule('numpy')

###############################################################################

def uniform_variates(seed, split_id, n):
  """
  u_i ~ Unif[0,1) for rows 0..n-1 of one split.
  Row i always receives element i of the stream (seed, u, split_id), whatever n is.
  """
  return utils.rng.generator(seed, utils.rng.STREAM_U, split_id).random(n)
#edef

def _variates(spec, seed, split_id, n):
  if spec.randomized:
    return uniform_variates(seed, split_id, n)
  #fi
  return np.ones(n)
#edef

def _as_sorted(ss):
  """Promote a single SortedRow to a one-row SortedScores"""
  if isinstance(ss, structures.SortedRow):
    return structures.SortedScores(ss.scores[None, :], ss.perm[None, :],
                                   labels=None if ss.label is None else [ ss.label ],
                                   cumsum=ss.cumsum[None, :])
  #fi
  return ss
#edef

###############################################################################

def calibrate(cal, spec, seed=0, split_id=utils.rng.SPLIT_CAL):
  """
  Split-conformal calibration of the threshold tau_hat.

  Inputs:
    cal:      SortedScores with labels (the calibration split)
    spec:     MethodSpec, method aps | raps | lac (naive gives the fixed threshold 1 - alpha)
    seed:     seed of the u stream
    split_id: split key of the u stream
  Outputs:
    ConformalModel whose tau_hat is the ceil((n+1)(1-alpha))-th smallest calibration score
    (+inf when that index exceeds n)
  """
  if cal is None or cal.n == 0:
    raise utils.DataError("empty calibration set")
  #fi
  if cal.labels is None:
    raise utils.DataError("calibration scores need labels")
  #fi
  if spec.method == methods.FIXED_K:
    raise utils.ConfigError("fixed_k models are built by cset.tuning.make_fixed_k_model")
  #fi
  if spec.method == methods.NAIVE:
    utils.msg.dbm("naive sets use the fixed threshold 1-alpha, nothing to calibrate")
    return methods.ConformalModel(spec, 1 - spec.alpha, cal.n, seed=seed, K=cal.K)
  #fi

  u = _variates(spec, seed, split_id, cal.n)
  E = scoring.label_scores(cal, u, spec)
  tau_hat = ops.array.conformal_quantile(E, spec.alpha)
  utils.msg.dbm("Calibrated %s: tau_hat=%r on %d examples (index %d)" % (spec.method, tau_hat, cal.n, ops.array.conformal_rank(cal.n, spec.alpha)))

  return methods.ConformalModel(spec, tau_hat, cal.n, seed=seed, K=cal.K)
#edef

###############################################################################

def _naive_sizes(model, ss, u):
  """Shortest prefix reaching 1-alpha, then the randomized removal of its last class"""
  level = 1 - model.spec.alpha
  L = np.minimum((ss.cumsum < level).sum(axis=1) + 1, ss.K)
  if not model.spec.randomized:
    return L
  #fi
  rows = np.arange(ss.n)
  s_L = ss.sorted[rows, L - 1]
  V = np.divide(ss.cumsum[rows, L - 1] - level, s_L, out=np.zeros(ss.n), where=s_L > 0)
  return L - ((1 - u) <= V)
#edef

def _threshold_sizes(model, ss, u):
  if np.isinf(model.tau_hat):
    return np.full(ss.n, ss.K, dtype=np.int64)
  #fi
  sizes = ops.array.first_exceeding(scoring.score_matrix(ss, u, model.spec), model.tau_hat)
  if model.spec.boundary_inclusive:
    sizes = np.minimum(sizes + 1, ss.K)
  #fi
  return sizes
#edef

def _fixed_k_sizes(model, ss, u):
  k = min(model.k_star, ss.K)
  return np.where(u < model.mix_prob, k - 1, k)
#edef

def _sizes(model, ss, u):
  method = model.spec.method
  if method == methods.NAIVE:
    return _naive_sizes(model, ss, u)
  elif method == methods.FIXED_K:
    return _fixed_k_sizes(model, ss, u)
  else:
    return _threshold_sizes(model, ss, u)
  #fi
#edef

###############################################################################

def predict_batch(model, ss, u=None, split_id=utils.rng.SPLIT_EVAL):
  """
  Prediction sets for all rows of a SortedScores.
  Inputs:
    model:    ConformalModel
    ss:       SortedScores
    u:        per-row variates. Default: the model's u stream for split_id (all ones when deterministic)
    split_id: split key of the u stream
  Outputs:
    PredictionBatch
  """
  ss = _as_sorted(ss)
  if model.K is not None and model.K != ss.K:
    raise utils.DataError("K mismatch: model was calibrated on %d classes, scores have %d" % (model.K, ss.K))
  #fi
  if u is None:
    u = _variates(model.spec, model.seed, split_id, ss.n)
  elif not model.spec.randomized:
    u = np.ones(ss.n)
  else:
    u = np.broadcast_to(np.asarray(u, dtype=np.float64), (ss.n,))
  #fi
  sizes = _sizes(model, ss, u).astype(np.int64)
  return PredictionBatch(sizes, ss.perm, u=u if model.spec.randomized else None,
                         ranks=None if ss.labels is None else ss.ranks)
#edef

def predict(model, row, u=None):
  """
  Prediction set of a single sorted row (SortedRow). u is ignored in deterministic mode.
  """
  if model.spec.randomized and u is None:
    raise ValueError("A randomized model needs a variate u")
  #fi
  batch = predict_batch(model, _as_sorted(row), u=np.array([ 1.0 if u is None else u ]))
  return batch[0]
#edef

###############################################################################

def set_size_given_u(model, ss):
  """
  Closed form of the randomization.
  Outputs (per row, arrays when ss is a SortedScores, scalars for a SortedRow):
    size_at_u0: set size at u = 0
    size_at_u1: set size at u = 1 (size_at_u0 - size_at_u1 is 0 or 1)
    v:          probability over u ~ Unif(0,1) that the boundary class (rank size_at_u0) is included;
                0 when the two sizes agree
  Deterministic models report their fixed size twice.
  """
  if model.spec.method == methods.FIXED_K:
    raise ValueError("set_size_given_u is defined for naive, aps, raps and lac, not '%s'" % model.spec.method)
  #fi
  single = isinstance(ss, structures.SortedRow)
  ss = _as_sorted(ss)

  if not model.spec.randomized or model.spec.method == methods.LAC:
    size = _sizes(model, ss, np.ones(ss.n)).astype(np.int64)
    size_u0, size_u1, v = size, size, np.zeros(ss.n)
  elif model.spec.method == methods.NAIVE:
    size_u0 = _naive_sizes(model, ss, np.zeros(ss.n)).astype(np.int64)
    size_u1 = _naive_sizes(model, ss, np.ones(ss.n)).astype(np.int64)
    # the last class survives iff 1-u > V
    rows = np.arange(ss.n)
    L = size_u0
    s_L = ss.sorted[rows, L - 1]
    V = np.divide(ss.cumsum[rows, L - 1] - (1 - model.spec.alpha), s_L, out=np.zeros(ss.n), where=s_L > 0)
    v = np.where(size_u0 > size_u1, 1 - V, 0.0)
  else:
    size_u0 = _threshold_sizes(model, ss, np.zeros(ss.n)).astype(np.int64)
    size_u1 = _threshold_sizes(model, ss, np.ones(ss.n)).astype(np.int64)
    b = np.maximum(size_u0, 1)
    rows = np.arange(ss.n)
    s_b = ss.sorted[rows, b - 1]
    at_u0 = scoring.score_matrix(ss, 0.0, model.spec)[rows, b - 1]
    v = np.divide(model.tau_hat - at_u0, s_b, out=np.zeros(ss.n), where=s_b > 0)
    v = np.where(size_u0 > size_u1, np.clip(v, 0, 1), 0.0)
  #fi

  if single:
    return int(size_u0[0]), int(size_u1[0]), float(v[0])
  #fi
  return size_u0, size_u1, v
#edef

###############################################################################
