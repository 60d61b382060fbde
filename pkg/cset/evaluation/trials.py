"""
Repeated random-split experiments.

Trial t uses the seed derive_seed(master, trial, t): it splits the score matrix, optionally temperature
scales it, sorts each split, tunes the RAPS penalty, calibrates every method on the calibration split and
evaluates it on the evaluation split. Metrics are aggregated as the median over trials of per-trial means.
Trials depend only on their own seed, so any execution order gives the same aggregate.
"""

from .. import utils
from .. import ops
from .. import structures
from .. import conformal
from .. import stats
from .. import tuning

from . import metrics
from . import strata as strataUtils

from collections import namedtuple, OrderedDict

np = utils.py.loadExternalModule('numpy')
pd = utils.py.loadExternalModule('pandas')

from ..config import settings as settings

###############################################################################

TrialProtocol = namedtuple('TrialProtocol', [ 'n_trials', 'tune_size', 'cal_size', 'eval_size', 'seed',
                                              'platt', 'platt_split', 'temperature', 't_bounds', 't_tol' ])

TuningPolicy = namedtuple('TuningPolicy', [ 'alpha', 'objective', 'grid', 'lam', 'k_reg', 'strata', 'bins',
                                            'randomized', 'boundary_inclusive' ])

PreparedTrial = namedtuple('PreparedTrial', [ 'index', 'seed', 'tune', 'cal', 'eval', 'top1', 'top5', 'temperature' ])

PLATT_CALIBRATION = 'calibration'
PLATT_TUNING      = 'tuning'

METRICS = [ 'coverage', 'size', 'sscv', 'top1', 'top5' ]

###############################################################################

def protocol_from_settings(**overrides):
  """A TrialProtocol from the current settings, with keyword overrides"""
  values = dict(n_trials=settings.getSetting('trials'),
                tune_size=settings.getSetting('tune_size'),
                cal_size=settings.getSetting('cal_size'),
                eval_size=settings.getSetting('eval_size'),
                seed=settings.getSeed(),
                platt=settings.getSetting('platt'),
                platt_split=settings.getSetting('platt_split'),
                temperature=settings.getSetting('temperature'),
                t_bounds=(settings.getSetting('t_lo'), settings.getSetting('t_hi')),
                t_tol=settings.getSetting('t_tol'))
  values.update(overrides)
  return TrialProtocol(**values)
#edef

def policy_from_settings(**overrides):
  """A TuningPolicy from the current settings. lam/k_reg None means: tune them on the tuning split"""
  objective = settings.getSetting('tune_objective')
  values = dict(alpha=settings.getAlpha(),
                objective=objective,
                grid=settings.getSetting('lambda_grid_%s' % objective),
                lam=None,
                k_reg=None,
                strata=settings.getSetting('strata'),
                bins=settings.getSetting('difficulty_bins'),
                randomized=settings.getSetting('randomized'),
                boundary_inclusive=settings.getSetting('boundary_inclusive'))
  values.update(overrides)
  return TuningPolicy(**values)
#edef

###############################################################################

def trial_seed(master_seed, t):
  return utils.rng.derive_seed(master_seed, utils.rng.STREAM_TRIAL, t)
#edef

def _temperature(protocol, tune, cal):
  if protocol.temperature is not None:
    return float(protocol.temperature)
  #fi
  if not protocol.platt:
    return 1.0
  #fi
  if protocol.platt_split == PLATT_TUNING:
    if tune is None:
      raise utils.ConfigError("platt_split 'tuning' needs a tuning split (tune_size > 0)")
    #fi
    source = tune
  elif protocol.platt_split == PLATT_CALIBRATION:
    source = cal
  else:
    raise utils.ConfigError("Unknown platt split '%s'. Choose from %s, %s" % (protocol.platt_split, PLATT_CALIBRATION, PLATT_TUNING))
  #fi
  return stats.fit_temperature(source, bounds=protocol.t_bounds, tol=protocol.t_tol).temperature
#edef

def prepare_trial(m, protocol, t):
  """
  Split, temperature scale (logits only) and sort the data of trial t.
  """
  seed = trial_seed(protocol.seed, t)
  spec = structures.SplitSpec(seed, sizes=(protocol.tune_size, protocol.cal_size, protocol.eval_size))
  tune, cal, ev = ops.split(m, spec)

  temperature = None
  if m.kind == structures.LOGITS:
    temperature = _temperature(protocol, tune, cal)
    tune = None if tune is None else ops.softmax(tune, temperature)
    cal  = ops.softmax(cal, temperature)
    ev   = ops.softmax(ev, temperature)
  #fi

  return PreparedTrial(index=t, seed=seed,
                       tune=None if tune is None else ops.sort_scores(tune, seed, key=utils.rng.SPLIT_TUNE),
                       cal=ops.sort_scores(cal, seed, key=utils.rng.SPLIT_CAL),
                       eval=ops.sort_scores(ev, seed, key=utils.rng.SPLIT_EVAL),
                       top1=ev.top_k_accuracy(1), top5=ev.top_k_accuracy(5),
                       temperature=temperature)
#edef

###############################################################################

def method_spec(method, policy, trial):
  """
  The MethodSpec of one method in one trial. raps is tuned on the trial's tuning split
  unless the policy fixes lambda. Returns (spec, TuneResult or None).
  """
  common = dict(randomized=policy.randomized, boundary_inclusive=policy.boundary_inclusive)
  if method != conformal.RAPS:
    return conformal.MethodSpec(method, policy.alpha, **common), None
  #fi
  if policy.lam is not None:
    k_reg = policy.k_reg if policy.k_reg is not None else settings.getSetting('k_reg')
    return conformal.MethodSpec(method, policy.alpha, lam=policy.lam, k_reg=k_reg, **common), None
  #fi
  if trial.tune is None:
    raise utils.ConfigError("raps tuning needs a tuning split (tune_size > 0) or a fixed lambda")
  #fi
  result = tuning.tune(trial.tune, policy.alpha, objective=policy.objective, grid=policy.grid,
                       strata=policy.strata, seed=trial.seed, randomized=policy.randomized, k_reg=policy.k_reg)
  return conformal.MethodSpec(method, policy.alpha, lam=result.lam, k_reg=result.k_reg, **common), result
#edef

###############################################################################

class TrialAggregate(object):
  """
  Per-trial metrics of one method, and their median-of-means.
    trials:     pandas DataFrame, one row per trial (sorted by trial index)
    histogram:  dict set size -> count, summed over trials
    per_stratum / per_difficulty: pooled over trials (mean count per trial, pooled coverage)
  """

  def __init__(self, method, reports, rows, strata, bins):
    self.method = method
    self.strata = strata
    self.bins   = bins
    self.trials = pd.DataFrame(rows).sort_values('trial').reset_index(drop=True)

    n_trials = len(reports)
    hist = {}
    for report in reports:
      for (size, count) in report.size_hist.items():
        hist[size] = hist.get(size, 0) + count
      #efor
    #efor
    self.histogram = dict(sorted(hist.items()))

    self.per_stratum = []
    for (j, stratum) in enumerate(strata):
      count   = sum(r.per_stratum[j].count for r in reports)
      covered = sum(r.per_stratum[j].count * r.per_stratum[j].coverage for r in reports if r.per_stratum[j].count > 0)
      self.per_stratum.append(metrics.StratumRow(stratum, count / n_trials, (covered / count) if count > 0 else None))
    #efor

    self.per_difficulty = []
    for (j, b) in enumerate(bins):
      count   = sum(r.per_difficulty[j].count for r in reports)
      covered = sum(r.per_difficulty[j].count * r.per_difficulty[j].coverage for r in reports if r.per_difficulty[j].count > 0)
      sizes   = sum(r.per_difficulty[j].count * r.per_difficulty[j].avg_size for r in reports if r.per_difficulty[j].count > 0)
      self.per_difficulty.append(metrics.DifficultyRow(b, count / n_trials,
                                                       (covered / count) if count > 0 else None,
                                                       (sizes / count) if count > 0 else None))
    #efor
  #edef

  @property
  def n_trials(self):
    return len(self.trials)
  #edef

  def values(self, metric):
    return self.trials[metric].values
  #edef

  @property
  def median_of_means(self):
    return OrderedDict((metric, stats.median_of_means(self.trials[metric])) for metric in METRICS)
  #edef

  def mean_se(self, metric):
    return stats.mean_se(self.trials[metric])
  #edef

  def __str__(self):
    mom = self.median_of_means
    dstr  = "TrialAggregate object\n"
    dstr += " Method: %s\n" % self.method
    dstr += " Trials: %d\n" % self.n_trials
    dstr += " Median-of-means: %s\n" % ', '.join('%s=%.4f' % (k, v) for (k, v) in mom.items())
    return dstr
  #edef

#eclass

###############################################################################

def run_trials(m, protocol, policy, methods=None, order=None):
  """
  Run the trial protocol for several methods on one score matrix.
  Inputs:
    m:        ScoreMatrix (logits are temperature scaled per trial, probabilities are used as they are)
    protocol: TrialProtocol
    policy:   TuningPolicy
    methods:  list of method names (default: settings methods)
    order:    trial indices in execution order (default 0..n_trials-1); any permutation gives the same result
  Outputs:
    OrderedDict method -> TrialAggregate
  """
  methods = settings.getSetting('methods') if methods is None else methods
  for method in methods:
    if method not in conformal.METHODS:
      raise utils.ConfigError("Unknown method '%s'. Choose from %s" % (method, ', '.join(conformal.METHODS)))
    #fi
  #efor
  order = list(range(protocol.n_trials)) if order is None else list(order)
  strata = strataUtils.parse_strata(policy.strata)
  bins   = strataUtils.parse_strata(policy.bins)

  reports = { method: [] for method in methods }
  rows    = { method: [] for method in methods }
  for (i, t) in enumerate(order):
    trial = prepare_trial(m, protocol, t)
    for method in methods:
      spec, tuned = method_spec(method, policy, trial)
      model  = tuning.fit_model(trial.cal, spec, seed=trial.seed)
      report = metrics.evaluate(model, trial.eval, strata, bins)
      reports[method].append(report)
      rows[method].append(OrderedDict([ ('trial', t), ('seed', trial.seed),
                                        ('coverage', report.coverage), ('size', report.avg_size), ('sscv', report.sscv),
                                        ('top1', trial.top1), ('top5', trial.top5),
                                        ('lambda', spec.lam), ('k_reg', spec.k_reg), ('tau_hat', model.tau_hat),
                                        ('temperature', np.nan if trial.temperature is None else trial.temperature) ]))
    #efor
    utils.msg.progress(i + 1, len(order))
  #efor

  # reports are kept in trial-index order so pooled tables do not depend on the execution order
  result = OrderedDict()
  for method in methods:
    pairs = sorted(zip([ r['trial'] for r in rows[method] ], reports[method]), key=lambda p: p[0])
    result[method] = TrialAggregate(method, [ p[1] for p in pairs ], rows[method], strata, bins)
  #efor
  return result
#edef

###############################################################################

def run_sweep(m, protocol, policy, lambdas=None, kregs=None):
  """
  Median-of-means RAPS set size for every (k_reg, lambda) pair, with lambda and k_reg fixed (no tuning).
  Outputs: pandas DataFrame, index k_reg, columns lambda
  """
  lambdas = settings.getSetting('sweep_lambdas') if lambdas is None else lambdas
  kregs   = settings.getSetting('sweep_kregs') if kregs is None else kregs

  sizes = { (k, l): [] for k in kregs for l in lambdas }
  for t in range(protocol.n_trials):
    trial = prepare_trial(m, protocol, t)
    for k_reg in kregs:
      for lam in lambdas:
        spec  = conformal.MethodSpec(conformal.RAPS, policy.alpha, lam=lam, k_reg=k_reg,
                                     randomized=policy.randomized, boundary_inclusive=policy.boundary_inclusive)
        model = conformal.calibrate(trial.cal, spec, seed=trial.seed)
        sizes[(k_reg, lam)].append(float(np.mean(conformal.predict_batch(model, trial.eval).sizes)))
      #efor
    #efor
    utils.msg.progress(t + 1, protocol.n_trials, what="sweep trial")
  #efor

  table = pd.DataFrame([ [ stats.median_of_means(sizes[(k, l)]) for l in lambdas ] for k in kregs ],
                       index=pd.Index(kregs, name='k_reg'), columns=pd.Index(lambdas, name='lambda'))
  return table
#edef

###############################################################################
