from .. import utils

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

###############################################################################

NAIVE   = 'naive'
APS     = 'aps'
RAPS    = 'raps'
LAC     = 'lac'
FIXED_K = 'fixed_k'

METHODS = [ NAIVE, APS, RAPS, LAC, FIXED_K ]

###############################################################################

class MethodSpec(namedtuple('MethodSpec', [ 'method', 'alpha', 'lam', 'k_reg', 'randomized', 'boundary_inclusive' ])):
  """
  A prediction-set method and its hyperparameters.

    method:             naive | aps | raps | lac | fixed_k
    alpha:              miscoverage level in (0,1)
    lam:                rank penalty weight lambda >= 0 (raps only, forced to 0 for every other method)
    k_reg:              penalty-free ranks, >= 1 (raps only)
    randomized:         draw u ~ Unif(0,1) per example, or fix u = 1
    boundary_inclusive: deterministic sets also take the first class above the threshold

  aps is raps with lam = 0: both go through the same score computation.
  """
  __slots__ = ()

  def __new__(cls, method, alpha, lam=0.0, k_reg=1, randomized=True, boundary_inclusive=False):
    if method not in METHODS:
      raise utils.ConfigError("Unknown method '%s'. Choose from %s" % (method, ', '.join(METHODS)))
    #fi
    alpha = utils.errors.check_alpha(alpha)
    lam = float(lam) if method == RAPS else 0.0
    if not (lam >= 0) or not np.isfinite(lam):
      raise utils.ConfigError("lambda must be nonnegative, got '%s'" % str(lam))
    #fi
    if int(k_reg) != k_reg or k_reg < 1:
      raise utils.ConfigError("k_reg must be a positive integer, got '%s'" % str(k_reg))
    #fi
    if boundary_inclusive and randomized:
      raise utils.ConfigError("boundary_inclusive sets are only defined in deterministic mode")
    #fi
    return super(MethodSpec, cls).__new__(cls, method, alpha, lam, int(k_reg), bool(randomized), bool(boundary_inclusive))
  #edef

  def with_(self, **kwargs):
    """A copy with some fields replaced (and re-validated)"""
    return MethodSpec(**dict(self._asdict(), **kwargs))
  #edef

#eclass

###############################################################################

class ConformalModel(namedtuple('ConformalModel', [ 'spec', 'tau_hat', 'n_cal', 'seed', 'K', 'k_star', 'mix_prob', 'temperature' ])):
  """
  A calibrated prediction-set method.

    spec:     MethodSpec
    tau_hat:  calibrated threshold, may be +inf (predict all K classes)
    n_cal:    number of calibration examples
    seed:     seed of the per-example u stream
    K:        number of classes of the calibration data (None if unknown)
    k_star:   fixed_k only, the fixed set size
    mix_prob: fixed_k only, probability of predicting k_star - 1 classes instead
    temperature: temperature applied to logits before calibration (None for probability inputs)
  """
  __slots__ = ()

  def __new__(cls, spec, tau_hat, n_cal, seed=0, K=None, k_star=None, mix_prob=None, temperature=None):
    return super(ConformalModel, cls).__new__(cls, spec, float(tau_hat), int(n_cal), int(seed),
                                              None if K is None else int(K),
                                              None if k_star is None else int(k_star),
                                              None if mix_prob is None else float(mix_prob),
                                              None if temperature is None else float(temperature))
  #edef

  @property
  def method(self):
    return self.spec.method
  #edef

  @property
  def alpha(self):
    return self.spec.alpha
  #edef

  @property
  def randomized(self):
    return self.spec.randomized
  #edef

  def __str__(self):
    dstr  = "ConformalModel object\n"
    dstr += " Method: %s (alpha=%g, lambda=%g, k_reg=%d, %s)\n" % (self.spec.method, self.spec.alpha, self.spec.lam, self.spec.k_reg,
                                                                 'randomized' if self.spec.randomized else 'deterministic')
    dstr += " tau_hat: %r\n" % self.tau_hat
    dstr += " n_cal: %d\n" % self.n_cal
    if self.k_star is not None:
      dstr += " k_star: %d, mix_prob: %r\n" % (self.k_star, self.mix_prob)
    #fi
    return dstr
  #edef

#eclass

###############################################################################
