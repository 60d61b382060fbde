from .. import utils
from .. import conformal

from . import strata as strataUtils

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

###############################################################################

StratumRow    = namedtuple('StratumRow', [ 'stratum', 'count', 'coverage' ])
DifficultyRow = namedtuple('DifficultyRow', [ 'bin', 'count', 'coverage', 'avg_size' ])

EvalReport = namedtuple('EvalReport', [ 'method', 'n', 'coverage', 'avg_size', 'sscv', 'size_hist', 'per_stratum', 'per_difficulty' ])
EvalReport.__doc__ = """
All metrics of one method on one evaluation split.
  coverage, avg_size, sscv: floats
  size_hist:      dict size -> count (sizes present only, ascending)
  per_stratum:    list of StratumRow (coverage None for empty strata)
  per_difficulty: list of DifficultyRow (coverage/avg_size None for empty bins)
"""

###############################################################################

def coverage_and_size(sets, labels=None):
  """
  Fraction of examples whose label is in its set, and the mean set size.
  sets: PredictionBatch or list of PredictionSet
  """
  sizes, covered = conformal.as_sizes_and_covered(sets, labels)
  if len(sizes) == 0:
    raise ValueError("No prediction sets to evaluate")
  #fi
  return float(np.mean(covered)), float(np.mean(sizes))
#edef

###############################################################################

def stratified_coverage(sets, labels, strata):
  """
  Coverage within each set-size stratum.
  Outputs: list of StratumRow(stratum, count, coverage), coverage None where count is 0
  """
  strata = strataUtils.parse_strata(strata)
  sizes, covered = conformal.as_sizes_and_covered(sets, labels)
  idx = strataUtils.assign(sizes, strata)
  rows = []
  for (j, stratum) in enumerate(strata):
    mask = idx == j
    count = int(mask.sum())
    rows.append(StratumRow(stratum, count, float(np.mean(covered[mask])) if count > 0 else None))
  #efor
  return rows
#edef

def sscv(sets, labels, strata, alpha):
  """
  Size-stratified coverage violation: the largest |coverage within stratum - (1-alpha)| over nonempty strata.
  """
  alpha = utils.errors.check_alpha(alpha)
  rows = [ r for r in stratified_coverage(sets, labels, strata) if r.count > 0 ]
  if len(rows) == 0:
    raise ValueError("No prediction sets to evaluate")
  #fi
  return float(max(abs(r.coverage - (1 - alpha)) for r in rows))
#edef

###############################################################################

def difficulty_table(sets, labels, ss, bins):
  """
  Coverage and mean set size grouped by the rank of the true label among the sorted scores.
  Outputs: list of DifficultyRow(bin, count, coverage, avg_size)
  """
  bins = strataUtils.parse_strata(bins)
  sizes, covered = conformal.as_sizes_and_covered(sets, labels)
  labels = np.asarray(labels if labels is not None else ss.labels, dtype=np.int64)
  ranks = np.argmax(ss.perm == labels[:, None], axis=1) + 1
  idx = strataUtils.assign(ranks, bins)
  rows = []
  for (j, b) in enumerate(bins):
    mask = idx == j
    count = int(mask.sum())
    if count == 0:
      rows.append(DifficultyRow(b, 0, None, None))
    else:
      rows.append(DifficultyRow(b, count, float(np.mean(covered[mask])), float(np.mean(sizes[mask]))))
    #fi
  #efor
  return rows
#edef

###############################################################################

def size_histogram(sets):
  """dict set size -> number of sets of that size"""
  sizes = sets.sizes if isinstance(sets, conformal.PredictionBatch) else [ len(s.classes) for s in sets ]
  values, counts = np.unique(np.asarray(sizes, dtype=np.int64), return_counts=True)
  return { int(v): int(c) for (v, c) in zip(values, counts) }
#edef

###############################################################################

def expected_size(model, ss):
  """
  Per-row set size averaged over u ~ Unif(0,1), in closed form.
  """
  if model.spec.method == conformal.FIXED_K:
    k = min(model.k_star, ss.K)
    mix = model.mix_prob if model.spec.randomized else 0.0
    return np.full(ss.n, k - mix)
  #fi
  size_u0, size_u1, v = conformal.set_size_given_u(model, ss)
  return size_u1 + (size_u0 - size_u1) * v
#edef

###############################################################################

def evaluate(model, ss, strata, bins, alpha=None, sets=None, split_id=utils.rng.SPLIT_EVAL):
  """
  Predict on a labelled SortedScores and compute every metric.
  Inputs:
    model:  ConformalModel
    ss:     SortedScores with labels (evaluation split)
    strata: set-size strata for sscv and the stratified table
    bins:   true-label rank bins for the difficulty table
    alpha:  target level for sscv (default: the model's)
    sets:   precomputed PredictionBatch (default: predict_batch with the model's u stream)
  Outputs:
    EvalReport
  """
  alpha = model.spec.alpha if alpha is None else alpha
  sets = conformal.predict_batch(model, ss, split_id=split_id) if sets is None else sets
  coverage, avg_size = coverage_and_size(sets, ss.labels)
  per_stratum = stratified_coverage(sets, ss.labels, strata)
  nonempty = [ r for r in per_stratum if r.count > 0 ]
  return EvalReport(method=model.spec.method,
                    n=ss.n,
                    coverage=coverage,
                    avg_size=avg_size,
                    sscv=float(max(abs(r.coverage - (1 - alpha)) for r in nonempty)),
                    size_hist=size_histogram(sets),
                    per_stratum=per_stratum,
                    per_difficulty=difficulty_table(sets, ss.labels, ss, bins))
#edef

###############################################################################
