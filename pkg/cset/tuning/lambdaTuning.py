"""
Choice of the RAPS penalty (k_reg, lambda) on a held-out tuning split.

k_reg is k* of the tuning split. Each lambda in the grid is scored on one nested 50/50 split of the
tuning rows (the same split and the same u variates for every lambda): calibrate on one half,
predict on the other.
"""

from .. import utils
from .. import conformal
from ..evaluation import metrics
from ..evaluation import strata as strataUtils

from .fixedK import fixed_k_star

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

from ..config import settings as settings

###############################################################################

SIZE         = 'size'
ADAPTIVENESS = 'adaptiveness'
OBJECTIVES   = [ SIZE, ADAPTIVENESS ]

TuneResult = namedtuple('TuneResult', [ 'k_star', 'k_reg', 'lam', 'objective', 'grid' ])

###############################################################################

def _checkGrid(grid):
  grid = [ float(l) for l in grid ]
  if len(grid) == 0:
    raise utils.ConfigError("Empty lambda grid")
  #fi
  if any(not (l >= 0) for l in grid):
    raise utils.ConfigError("lambda grid values must be nonnegative, got %s" % str(grid))
  #fi
  return grid
#edef

def nested_split(ss, seed):
  """(calibration half, evaluation half) of a tuning split, shuffled by the (seed, tune) stream"""
  minimum = settings.getSetting('min_tune_size') or 20
  if ss is None or ss.n < minimum:
    raise utils.ConfigError("tuning split too small to split again: %d rows, need at least %d" % (0 if ss is None else ss.n, minimum))
  #fi
  order = utils.rng.generator(seed, utils.rng.STREAM_TUNE).permutation(ss.n)
  half = ss.n // 2
  return ss.subset(np.sort(order[:half])), ss.subset(np.sort(order[half:]))
#edef

def _scoreGrid(tune, alpha, grid, seed, objective, randomized, k_reg, strata):
  alpha = utils.errors.check_alpha(alpha)
  grid = _checkGrid(grid)
  k_star = fixed_k_star(tune, alpha)
  k_reg = k_star if k_reg is None else int(k_reg)
  inner_seed = utils.rng.derive_seed(seed, utils.rng.STREAM_TUNE)
  cal, ev = nested_split(tune, seed)

  values = []
  for lam in grid:
    spec  = conformal.MethodSpec(conformal.RAPS, alpha, lam=lam, k_reg=k_reg, randomized=randomized)
    model = conformal.calibrate(cal, spec, seed=inner_seed, split_id=utils.rng.SPLIT_CAL)
    if objective == SIZE:
      value = float(np.mean(metrics.expected_size(model, ev)))
    else:
      sets  = conformal.predict_batch(model, ev, split_id=utils.rng.SPLIT_EVAL)
      value = metrics.sscv(sets, ev.labels, strata, alpha)
    #fi
    utils.msg.dbm("lambda=%g k_reg=%d -> %s %.6f" % (lam, k_reg, objective, value))
    values.append(value)
  #efor
  return k_star, k_reg, grid, values
#edef

###############################################################################

def tune_for_size(tune, alpha, grid=None, seed=0, randomized=True, k_reg=None):
  """
  The lambda with the smallest mean set size on the nested split. Ties go to the larger lambda.
  Inputs:
    tune: SortedScores with labels (tuning split)
    alpha: miscoverage level
    grid: lambda values (default: settings lambda_grid_size)
    seed: trial seed
    k_reg: manual override of k_reg (default k* of the tuning split)
  Outputs:
    TuneResult
  """
  grid = settings.getSetting('lambda_grid_size') if grid is None else grid
  k_star, k_reg, grid, values = _scoreGrid(tune, alpha, grid, seed, SIZE, randomized, k_reg, None)
  best = min(range(len(grid)), key=lambda i: (values[i], -grid[i]))
  return TuneResult(k_star, k_reg, grid[best], SIZE, list(zip(grid, values)))
#edef

def tune_for_adaptiveness(tune, alpha, grid=None, strata=None, seed=0, randomized=True, k_reg=None):
  """
  The lambda with the smallest size-stratified coverage violation on the nested split. Ties go to the smaller lambda.
  """
  grid = settings.getSetting('lambda_grid_adaptiveness') if grid is None else grid
  strata = strataUtils.parse_strata(settings.getSetting('strata') if strata is None else strata)
  k_star, k_reg, grid, values = _scoreGrid(tune, alpha, grid, seed, ADAPTIVENESS, randomized, k_reg, strata)
  best = min(range(len(grid)), key=lambda i: (values[i], grid[i]))
  return TuneResult(k_star, k_reg, grid[best], ADAPTIVENESS, list(zip(grid, values)))
#edef

def tune(tune_ss, alpha, objective=SIZE, **kwargs):
  if objective == SIZE:
    kwargs.pop('strata', None)
    return tune_for_size(tune_ss, alpha, **kwargs)
  elif objective == ADAPTIVENESS:
    return tune_for_adaptiveness(tune_ss, alpha, **kwargs)
  #fi
  raise utils.ConfigError("Unknown tuning objective '%s'. Choose from %s" % (objective, ', '.join(OBJECTIVES)))
#edef

###############################################################################
