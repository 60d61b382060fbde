"""
Temperature (Platt) scaling.

A single scalar T divides every logit before the softmax. T is chosen to minimize the
mean negative log-likelihood of the labels on a calibration split, by a bounded 1-D search.
"""

from .. import utils
from .. import ops
from .. import structures

from collections import namedtuple

np        = utils.py.loadExternalModule('numpy')
sspecial  = utils.py.loadExternalModule('scipy.special')
soptimize = utils.py.loadExternalModule('scipy.optimize')

from ..config import settings as settings

###############################################################################

TemperatureFit = namedtuple('TemperatureFit', [ 'temperature', 'nll_before', 'nll_after', 'iterations', 'bracket' ])

###############################################################################

def _requireLogits(m):
  if m.kind != structures.LOGITS:
    raise ValueError("Temperature scaling needs logits, got '%s'" % m.kind)
  #fi
#edef

def nll(m, temperature=1.0):
  """
  Mean negative log-likelihood of the labels under softmax(logits / temperature).
  Inputs:
    m: ScoreMatrix (logits)
    temperature: positive real
  Outputs:
    float
  """
  temperature = ops.matrix.check_temperature(temperature)
  _requireLogits(m)
  z = m.scores / temperature
  picked = z[np.arange(m.n), m.labels]
  # np.sum uses pairwise summation in row order, independent of any threading
  return float(np.sum(sspecial.logsumexp(z, axis=1) - picked) / m.n)
#edef

###############################################################################

def fit_temperature(m, bounds=None, tol=None):
  """
  Fit the temperature minimizing nll on [t_lo, t_hi].
  Inputs:
    m:      ScoreMatrix (logits), usually the calibration split
    bounds: (t_lo, t_hi), default from settings (0.05, 20)
    tol:    absolute tolerance on T, default from settings (1e-4)
  Outputs:
    TemperatureFit(temperature, nll_before (at T=1), nll_after, iterations, bracket)
  """
  _requireLogits(m)
  t_lo, t_hi = bounds if bounds is not None else (settings.getSetting('t_lo'), settings.getSetting('t_hi'))
  tol = settings.getSetting('t_tol') if tol is None else tol
  if not (0 < t_lo < t_hi) or not np.isfinite(t_hi):
    raise utils.ConfigError("invalid temperature bracket: need 0 < t_lo < t_hi, got (%s, %s)" % (str(t_lo), str(t_hi)))
  #fi
  if not (tol > 0):
    raise utils.ConfigError("temperature tolerance must be positive, got '%s'" % str(tol))
  #fi

  res = soptimize.minimize_scalar(lambda T: nll(m, T), bounds=(t_lo, t_hi), method='bounded', options={ 'xatol': tol })
  temperature = float(res.x)
  nll_after   = float(res.fun)
  nll_before  = nll(m, 1.0)
  iterations  = int(getattr(res, 'nit', res.nfev))

  if nll_after > nll_before and t_lo <= 1.0 <= t_hi:
    utils.msg.dbm("Bracketed search ended above nll(T=1), keeping T=1")
    temperature, nll_after = 1.0, nll_before
  #fi

  utils.msg.dbm("Fitted temperature T=%.6f (nll %.6f -> %.6f, %d iterations)" % (temperature, nll_before, nll_after, iterations))
  return TemperatureFit(temperature, nll_before, nll_after, iterations, (float(t_lo), float(t_hi)))
#edef

###############################################################################

def apply_temperature(m, fit):
  """
  Logits -> probabilities at a fitted (TemperatureFit) or given (float) temperature
  """
  temperature = fit.temperature if isinstance(fit, TemperatureFit) else fit
  return ops.softmax(m, temperature)
#edef

###############################################################################
