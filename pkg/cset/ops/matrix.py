from .. import utils
from .. import structures

np = utils.py.loadExternalModule('numpy')
sspecial = utils.py.loadExternalModule('scipy.special')

from ..config import settings as settings

####################################################################

def check_temperature(temperature):
  if not (temperature > 0) or not np.isfinite(temperature):
    raise utils.ConfigError("temperature must be positive, got '%s'" % str(temperature))
  #fi
  return float(temperature)
#edef

####################################################################

def softmax(m, temperature=1.0):
  """
  Softmax of a logits ScoreMatrix at a temperature.
  Inputs:
    m: ScoreMatrix with kind logits
    temperature: positive real. Logits are divided by it before the (row-max stabilized) softmax
  Outputs:
    ScoreMatrix with kind probabilities and the same labels
  """
  temperature = check_temperature(temperature)
  if m.kind != structures.LOGITS:
    raise ValueError("softmax needs logits, got '%s'" % m.kind)
  #fi
  probs = sspecial.softmax(m.scores / temperature, axis=1)
  return m.withScores(probs, structures.PROBABILITIES)
#edef

####################################################################

def sort_scores(m, seed=None, key=0):
  """
  Sort each row of a probability matrix in descending order.

  Exact ties are broken by a seeded random order within the tied block: every entry gets a
  uniform key from the stream (seed, ties, key) at its (row, column) position, and entries
  with equal scores are ordered by that key.

  Inputs:
    m: ScoreMatrix (probabilities)
    seed: master seed (default: settings seed)
    key: extra stream key, so that different splits of one trial get different tie orders
  Outputs:
    SortedScores
  """
  if m.kind != structures.PROBABILITIES:
    raise ValueError("sort_scores needs probabilities, got '%s'. Apply softmax first." % m.kind)
  #fi
  seed = settings.getSeed() if seed is None else seed

  scores = m.scores
  tiekeys = utils.rng.generator(seed, utils.rng.STREAM_TIES, key).random(scores.shape)
  # lexsort: last key is primary
  perm = np.lexsort((tiekeys, -scores), axis=1)
  srt  = np.take_along_axis(scores, perm, axis=1)

  return structures.SortedScores(srt, perm, labels=m.labels, kind=m.kind)
#edef

####################################################################

def split_indices(n, spec):
  """
  Row indices of the (tuning, calibration, evaluation) partitions of an n-row matrix.
  One seeded Fisher-Yates shuffle of range(n), cut into consecutive chunks.
  """
  sizes = spec.resolve(n)
  order = utils.rng.generator(spec.seed, utils.rng.STREAM_SPLIT).permutation(n)
  bounds = np.cumsum([0] + list(sizes))
  return tuple(np.sort(order[bounds[i]:bounds[i+1]]) for i in range(3))
#edef

def split(m, spec):
  """
  Split a ScoreMatrix into disjoint (tuning, calibration, evaluation) matrices.
  A zero-sized tuning partition is returned as None.
  """
  tune_idx, cal_idx, eval_idx = split_indices(m.n, spec)
  if len(cal_idx) == 0 or len(eval_idx) == 0:
    raise utils.ConfigError("infeasible split: calibration and evaluation partitions must be nonempty, got sizes %s" % str(spec.resolve(m.n)))
  #fi
  tune = m.subset(tune_idx) if len(tune_idx) > 0 else None
  return tune, m.subset(cal_idx), m.subset(eval_idx)
#edef

####################################################################

def true_label_ranks(ss):
  """
  1-based rank o_x(y) of the label in each row of a SortedScores
  """
  return ss.ranks
#edef

####################################################################
