"""
Fixed-size top-k sets, with k chosen on held-out data.
"""

from .. import utils
from .. import ops
from .. import conformal

np = utils.py.loadExternalModule('numpy')

###############################################################################

def fixed_k_star(ss, alpha):
  """
  Smallest k whose top-k sets cover at least ceil((n+1)(1-alpha)) of the n rows.
  Inputs:
    ss: SortedScores with labels
    alpha: miscoverage level
  Outputs:
    integer k* in [1, K]; K when ceil((n+1)(1-alpha)) > n
  """
  if ss is None or ss.n == 0:
    raise utils.DataError("empty split: cannot choose k*")
  #fi
  kstar = ops.array.conformal_quantile(ss.ranks, alpha, default=ss.K)
  return int(kstar)
#edef

###############################################################################

def mix_probability(c_small, c_large, alpha):
  """
  Probability of predicting the smaller of two nested fixed-size sets so that the mixture covers exactly 1-alpha.
    c_small: coverage of top-(k*-1)
    c_large: coverage of top-k*
  Clamped to [0,1], 0 when the two coverages agree.
  """
  alpha = utils.errors.check_alpha(alpha)
  if c_large == c_small:
    return 0.0
  #fi
  return float(np.clip((c_large - (1 - alpha)) / (c_large - c_small), 0, 1))
#edef

def make_fixed_k_model(cal, alpha, randomized=True, seed=0):
  """
  Conformalized fixed-k predictor: top-k* sets, where k* comes from fixed_k_star on the calibration split.
  When randomized, top-(k*-1) is predicted with probability mix_prob, so calibration coverage is exactly 1-alpha.
  """
  if cal is None or cal.n == 0:
    raise utils.DataError("empty calibration set")
  #fi
  kstar = fixed_k_star(cal, alpha)
  ranks = cal.ranks
  c_large = float(np.mean(ranks <= kstar))
  c_small = float(np.mean(ranks <= kstar - 1))
  mix = mix_probability(c_small, c_large, alpha) if randomized else 0.0

  utils.msg.dbm("fixed_k: k*=%d, coverage top-%d=%.4f top-%d=%.4f, mix_prob=%.4f" % (kstar, kstar - 1, c_small, kstar, c_large, mix))
  spec = conformal.MethodSpec(conformal.FIXED_K, alpha, randomized=randomized)
  return conformal.ConformalModel(spec, kstar, cal.n, seed=seed, K=cal.K, k_star=kstar, mix_prob=mix)
#edef

###############################################################################

def fit_model(cal, spec, seed=0, split_id=utils.rng.SPLIT_CAL):
  """
  Calibrate any method on a calibration split: fixed_k through make_fixed_k_model, the rest through conformal.calibrate
  """
  if spec.method == conformal.FIXED_K:
    return make_fixed_k_model(cal, spec.alpha, randomized=spec.randomized, seed=seed)
  #fi
  return conformal.calibrate(cal, spec, seed=seed, split_id=split_id)
#edef

###############################################################################
