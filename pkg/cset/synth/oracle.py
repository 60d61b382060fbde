from .. import utils
from .. import ops
from .. import conformal
from .. import tuning
from .. import stats

from .generator import generate

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

###############################################################################

OracleCoverage = namedtuple('OracleCoverage', [ 'mean', 'se', 'per_trial' ])

###############################################################################

def set_mass(true_probs, sets):
  """
  True probability P(Y in C(x) | x) of every predicted set, from the known conditional probabilities.
  true_probs: n x K array, sets: PredictionBatch over the same rows
  """
  in_set = np.arange(sets.K)[None, :] < sets.sizes[:, None]
  return (np.take_along_axis(true_probs, sets.perm, axis=1) * in_set).sum(axis=1)
#edef

def oracle_coverage(spec, method_spec, n_trials=100, n_cal=1000, n_eval=10000):
  """
  Monte-Carlo estimate of P(Y in C(X)) for a method on a synthetic problem.

  Each trial draws a fresh problem (n_cal + n_eval rows, seed derived from the SynthSpec seed and the trial),
  calibrates on the first n_cal rows of the observed scores and predicts the rest. The trial's coverage
  is the mean true probability mass of the predicted sets, so no label noise enters the estimate.

  Inputs:
    spec:        SynthSpec (its n is ignored)
    method_spec: MethodSpec
  Outputs:
    OracleCoverage(mean, se, per_trial)
  """
  per_trial = []
  for t in range(n_trials):
    seed_t = utils.rng.derive_seed(spec.seed, utils.rng.STREAM_ORACLE, t)
    true, observed = generate(spec.with_(n=n_cal + n_eval, seed=seed_t))

    cal = ops.sort_scores(observed.subset(np.arange(n_cal)), seed_t, key=utils.rng.SPLIT_CAL)
    ev  = ops.sort_scores(observed.subset(np.arange(n_cal, n_cal + n_eval)), seed_t, key=utils.rng.SPLIT_EVAL)

    model = tuning.fit_model(cal, method_spec, seed=seed_t)
    sets  = conformal.predict_batch(model, ev, split_id=utils.rng.SPLIT_EVAL)
    per_trial.append(float(np.mean(set_mass(true.scores[n_cal:], sets))))
    utils.msg.progress(t + 1, n_trials)
  #efor

  mean, se = stats.mean_se(per_trial)
  return OracleCoverage(mean, se, per_trial)
#edef

###############################################################################
