"""
Conformity scores.

aps / raps / naive: rho + s_o * u + lam * (o - k_reg)^+
  where s_o is the o-th largest probability and rho the mass of the o-1 classes above it.
lac:                1 - s_o (u ignored)

For fixed u the score is nondecreasing in the rank o, so thresholding it selects a prefix of the
sorted classes. All three entry points below share one formula, so a score computed for a single
(row, rank) is bit-identical to the matching entry of score_matrix.
"""

from .. import utils
from .. import ops
from .. import structures

from . import methods

np = utils.py.loadExternalModule('numpy')

###############################################################################

def _penalty(ranks, spec):
  return spec.lam * ops.array.positive_part(ranks - spec.k_reg)
#edef

def _rho(cumsum):
  """Mass strictly above each rank: cumsum shifted right by one, 0 at rank 1"""
  rho = np.zeros_like(cumsum)
  rho[..., 1:] = cumsum[..., :-1]
  return rho
#edef

def _combine(rho, s, u, penalty, spec):
  if spec.method == methods.LAC:
    return 1.0 - s
  #fi
  return rho + s * u + penalty
#edef

###############################################################################

def conformity_score(row, rank, u, spec):
  """
  Conformity score of the class at a 1-based rank of one sorted row.
  Inputs:
    row:  SortedRow (or a descending 1-D array of probabilities)
    rank: 1-based rank o, 1 <= o <= K
    u:    uniform variate in [0,1] (1 in deterministic mode)
    spec: MethodSpec
  Outputs:
    float
  """
  if isinstance(row, structures.SortedRow):
    srt, cumsum = row.scores, row.cumsum
  else:
    srt = np.asarray(row, dtype=np.float64)
    cumsum = np.cumsum(srt)
  #fi
  K = len(srt)
  if int(rank) != rank or not (1 <= rank <= K):
    raise ValueError("rank out of range: '%s' not in [1, %d]" % (str(rank), K))
  #fi
  rank = int(rank)
  rho = cumsum[rank - 2] if rank > 1 else 0.0
  return float(_combine(rho, srt[rank - 1], u, _penalty(rank, spec), spec))
#edef

###############################################################################

def score_matrix(ss, u, spec):
  """
  n x K matrix of conformity scores at every rank.
  u: scalar or one variate per row
  """
  u = np.asarray(u, dtype=np.float64)
  if u.ndim == 1:
    u = u[:, None]
  #fi
  ranks = np.arange(1, ss.K + 1)
  return _combine(_rho(ss.cumsum), ss.sorted, u, _penalty(ranks, spec)[None, :], spec)
#edef

def label_scores(ss, u, spec):
  """
  Conformity score of each row's true label (at its rank o_x(y))
  """
  u = np.broadcast_to(np.asarray(u, dtype=np.float64), (ss.n,))
  ranks = ss.ranks
  rows = np.arange(ss.n)
  s = ss.sorted[rows, ranks - 1]
  rho = np.where(ranks > 1, ss.cumsum[rows, np.maximum(ranks - 2, 0)], 0.0)
  return _combine(rho, s, u, _penalty(ranks, spec), spec)
#edef

###############################################################################
