"""
Synthetic classification problems with known conditional class probabilities.

Each row's probability vector is a symmetric Dirichlet draw (parameter concentration / K, sampled as
normalized Gamma variates), its label is drawn from that vector, and the observed scores are a
corrupted copy of it:
  none            observed == true
  temperature(t)  p ** (1/t), renormalized
  tail_permute(m) the values outside each row's top m are shuffled among those classes
"""

from .. import utils
from .. import structures

from collections import namedtuple
import re

np = utils.py.loadExternalModule('numpy')

###############################################################################

NONE         = 'none'
TEMPERATURE  = 'temperature'
TAIL_PERMUTE = 'tail_permute'
CORRUPTIONS  = [ NONE, TEMPERATURE, TAIL_PERMUTE ]

_CORRUPTION_RE = re.compile(r'^(none|temperature|tail_permute)(?:\((?:t=|top_m=)?([0-9.eE+-]+)\))?$')

# sub-streams of (seed, synth)
_PROBS, _LABELS, _CORRUPT, _PLATEAU = 0, 1, 2, 3

###############################################################################

class SynthSpec(namedtuple('SynthSpec', [ 'n', 'K', 'concentration', 'corruption', 'param', 'seed' ])):
  """
  n: rows, K: classes, concentration: total Dirichlet concentration (default 0.05*K),
  corruption: none | temperature | tail_permute, param: t or top_m, seed: master seed
  """
  __slots__ = ()

  def __new__(cls, n, K, concentration=None, corruption=NONE, param=None, seed=0):
    if corruption not in CORRUPTIONS:
      raise utils.ConfigError("Unknown corruption '%s'. Choose from %s" % (corruption, ', '.join(CORRUPTIONS)))
    #fi
    if int(K) < 2:
      raise utils.ConfigError("Need K >= 2, got '%s'" % str(K))
    #fi
    if int(n) < 1:
      raise utils.ConfigError("Need n >= 1, got '%s'" % str(n))
    #fi
    concentration = 0.05 * K if concentration is None else float(concentration)
    if not (concentration > 0):
      raise utils.ConfigError("concentration must be positive, got '%s'" % str(concentration))
    #fi
    if corruption == TEMPERATURE:
      param = 1.0 if param is None else float(param)
      if not (param > 0):
        raise utils.ConfigError("corruption temperature must be positive, got '%s'" % str(param))
      #fi
    elif corruption == TAIL_PERMUTE:
      if param is None or int(param) != param or not (0 <= param <= K):
        raise utils.ConfigError("tail_permute needs 0 <= top_m <= K, got '%s'" % str(param))
      #fi
      param = int(param)
    else:
      param = None
    #fi
    return super(SynthSpec, cls).__new__(cls, int(n), int(K), concentration, corruption, param, int(seed))
  #edef

  @property
  def corruption_string(self):
    return self.corruption if self.param is None else '%s(%s)' % (self.corruption, self.param)
  #edef

  def with_(self, **kwargs):
    return SynthSpec(**dict(self._asdict(), **kwargs))
  #edef

#eclass

def parse_corruption(text):
  """'none' | 'temperature(2.5)' | 'tail_permute(10)' -> (corruption, param)"""
  match = _CORRUPTION_RE.match(text.replace(' ', ''))
  if match is None:
    raise utils.ConfigError("Cannot parse corruption '%s'" % text)
  #fi
  corruption, param = match.group(1), match.group(2)
  if param is None:
    return corruption, None
  #fi
  return corruption, (int(float(param)) if corruption == TAIL_PERMUTE else float(param))
#edef

###############################################################################

def _normalize(p):
  return p / p.sum(axis=1, keepdims=True)
#edef

def _draw_labels(probs, rng):
  """Inverse-CDF draw of one class per row"""
  u = rng.random(probs.shape[0])
  labels = (np.cumsum(probs, axis=1) < u[:, None]).sum(axis=1)
  return np.minimum(labels, probs.shape[1] - 1)
#edef

def _dirichlet(n, K, concentration, rng):
  gam = rng.gamma(concentration / K, size=(n, K))
  # rows of all-underflowed variates would otherwise divide by zero
  return _normalize(np.maximum(gam, np.finfo(np.float64).tiny))
#edef

def _tail_permute(probs, top_m, rng):
  if top_m >= probs.shape[1]:
    return probs.copy()
  #fi
  order = np.argsort(-probs, axis=1, kind='stable')
  tail  = order[:, top_m:]
  values = rng.permuted(np.take_along_axis(probs, tail, axis=1), axis=1)
  observed = probs.copy()
  # a permutation keeps every row sum, so there is nothing to renormalize
  np.put_along_axis(observed, tail, values, axis=1)
  return observed
#edef

def corrupt(probs, spec, rng):
  if spec.corruption == TEMPERATURE:
    return _normalize(np.power(probs, 1.0 / spec.param))
  elif spec.corruption == TAIL_PERMUTE:
    return _tail_permute(probs, spec.param, rng)
  #fi
  return probs.copy()
#edef

###############################################################################

def generate(spec):
  """
  Inputs:
    spec: SynthSpec
  Outputs:
    (true_probs, observed_scores): two probability ScoreMatrix objects sharing the labels
  """
  probs  = _dirichlet(spec.n, spec.K, spec.concentration, utils.rng.generator(spec.seed, utils.rng.STREAM_SYNTH, _PROBS))
  labels = _draw_labels(probs, utils.rng.generator(spec.seed, utils.rng.STREAM_SYNTH, _LABELS))
  observed = corrupt(probs, spec, utils.rng.generator(spec.seed, utils.rng.STREAM_SYNTH, _CORRUPT))

  utils.msg.dbm("Generated %d x %d synthetic scores (concentration %g, corruption %s)" % (spec.n, spec.K, spec.concentration, spec.corruption_string))
  return (structures.ScoreMatrix(probs, labels, kind=structures.PROBABILITIES, name='synth:true'),
          structures.ScoreMatrix(observed, labels, kind=structures.PROBABILITIES, name='synth:observed'))
#edef

###############################################################################

def generate_mixture(specs):
  """
  Rows of several synthetic problems over the same classes, stacked in the order given.
  Each component is generated (and corrupted) from its own SynthSpec, seed included, so a
  mixture of easy and hard rows keeps known conditional probabilities.
  Inputs:
    specs: list of SynthSpec with a common K
  Outputs:
    (true_probs, observed_scores) as in generate
  """
  specs = list(specs)
  if len(specs) == 0:
    raise utils.ConfigError("A mixture needs at least one component")
  #fi
  if len(set(s.K for s in specs)) != 1:
    raise utils.ConfigError("Mixture components must share K, got %s" % ', '.join(str(s.K) for s in specs))
  #fi
  parts = [ generate(s) for s in specs ]
  labels = np.concatenate([ t.labels for (t, _) in parts ])
  true = np.vstack([ t.scores for (t, _) in parts ])
  observed = np.vstack([ o.scores for (_, o) in parts ])

  utils.msg.dbm("Stacked %d mixture components into %d rows" % (len(specs), true.shape[0]))
  return (structures.ScoreMatrix(true, labels, kind=structures.PROBABILITIES, name='synth:true'),
          structures.ScoreMatrix(observed, labels, kind=structures.PROBABILITIES, name='synth:observed'))
#edef

###############################################################################

def plateau_sizes(K, mass):
  """Largest plateau width L for which mass/L still exceeds (1-mass)/(K-L)"""
  L = min(K - 1, int(np.ceil(mass * K)) - 1)
  if L < 1:
    raise utils.ConfigError("No plateau of mass %g fits in K=%d classes" % (mass, K))
  #fi
  return L
#edef

def generate_plateau(spec, mass):
  """
  Rows whose top-L classes (L uniform on 1..L_max, classes at random) each carry mass/L and
  whose remaining K-L classes share 1-mass equally. The top-L classes then hold exactly `mass`,
  so the deterministic cumulative-mass set at threshold `mass` covers with probability `mass` given x.
  The corruption of spec is ignored.
  Outputs:
    (probs: ScoreMatrix, widths: array of L per row)
  """
  if not (0 < mass < 1):
    raise utils.ConfigError("plateau mass must be in (0,1), got '%s'" % str(mass))
  #fi
  n, K = spec.n, spec.K
  rng = utils.rng.generator(spec.seed, utils.rng.STREAM_SYNTH, _PLATEAU)
  widths = rng.integers(1, plateau_sizes(K, mass) + 1, size=n)

  ranks = np.arange(K)[None, :]
  values = np.where(ranks < widths[:, None], mass / widths[:, None], (1 - mass) / (K - widths[:, None]))
  probs = rng.permuted(values, axis=1)
  labels = _draw_labels(probs, utils.rng.generator(spec.seed, utils.rng.STREAM_SYNTH, _LABELS))
  return structures.ScoreMatrix(probs, labels, kind=structures.PROBABILITIES, name='synth:plateau'), widths
#edef

###############################################################################
