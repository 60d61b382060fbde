from .. import utils

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

###############################################################################

LOGITS        = 'logits'
PROBABILITIES = 'probabilities'
KINDS         = [ LOGITS, PROBABILITIES ]

# Row-sum tolerances for probability matrices
SUM_TOLERANCE   = 1e-6
RENORM_TOLERANCE = 1e-3

###############################################################################

def _readonly(arr):
  arr.flags.writeable = False
  return arr
#edef

def _first_row(mask):
  return int(np.nonzero(mask)[0][0])
#edef

###############################################################################

class ScoreMatrix(object):
  """
  n x K classifier scores with a label vector.

  scores: n x K array of logits or class probabilities (stored as float64, read-only)
  labels: length-n array of class indices in [0, K)
  kind:   'logits' | 'probabilities'

  Probability rows that sum to 1 within 1e-3 (but not within 1e-6) are renormalized,
  anything further off is rejected. Construction raises utils.DataError with the offending row.
  """

  __slots__ = [ '__scores', '__labels', '__kind', '__name' ]

  def __init__(self, scores, labels, kind=PROBABILITIES, name=None, validate=True):
    if kind not in KINDS:
      raise utils.DataError("Unknown score kind '%s'. Choose from %s" % (kind, ', '.join(KINDS)))
    #fi

    scores = np.array(scores, dtype=np.float64)
    labels = np.array(labels)

    if validate:
      scores, labels = self._validate(scores, labels, kind)
    #fi

    self.__scores = _readonly(scores)
    self.__labels = _readonly(labels.astype(np.int64))
    self.__kind   = kind
    self.__name   = name
  #edef

  @staticmethod
  def _validate(scores, labels, kind):
    if scores.ndim != 2:
      raise utils.DataError("Scores must be a 2-dimensional matrix, got %d dimensions" % scores.ndim)
    #fi
    n, K = scores.shape
    if n < 1:
      raise utils.DataError("empty matrix")
    #fi
    if K < 2:
      raise utils.DataError("Need at least 2 classes, got K=%d" % K)
    #fi
    if labels.ndim != 1 or len(labels) != n:
      raise utils.DataError("Expected %d labels, got %d" % (n, labels.size))
    #fi

    finite = np.isfinite(scores).all(axis=1)
    if not finite.all():
      raise utils.DataError("non-finite value at row %d" % _first_row(~finite))
    #fi

    if not np.issubdtype(labels.dtype, np.integer):
      if not np.all(np.isfinite(labels)) or np.any(labels != np.round(labels)):
        raise utils.DataError("non-integer label at row %d" % _first_row(~(labels == np.round(labels))))
      #fi
      labels = labels.astype(np.int64)
    #fi
    outside = (labels < 0) | (labels >= K)
    if outside.any():
      raise utils.DataError("label out of range at row %d" % _first_row(outside))
    #fi

    if kind == PROBABILITIES:
      bad = ((scores < 0) | (scores > 1)).any(axis=1)
      if bad.any():
        raise utils.DataError("probability outside [0,1] at row %d" % _first_row(bad))
      #fi
      deviation = np.abs(scores.sum(axis=1) - 1)
      if (deviation > RENORM_TOLERANCE).any():
        raise utils.DataError("probabilities do not sum to 1 at row %d" % _first_row(deviation > RENORM_TOLERANCE))
      #fi
      renorm = deviation > SUM_TOLERANCE
      if renorm.any():
        utils.msg.dbm("Renormalizing %d probability rows (max deviation %g)" % (renorm.sum(), deviation.max()))
        scores[renorm] = scores[renorm] / scores[renorm].sum(axis=1, keepdims=True)
      #fi
    #fi

    return scores, labels
  #edef

  #############################################################################

  @property
  def scores(self):
    return self.__scores
  #edef

  @property
  def labels(self):
    return self.__labels
  #edef

  @property
  def kind(self):
    return self.__kind
  #edef

  @property
  def name(self):
    return self.__name
  #edef

  @property
  def n(self):
    return self.__scores.shape[0]
  #edef

  @property
  def K(self):
    return self.__scores.shape[1]
  #edef

  def __len__(self):
    return self.n
  #edef

  #############################################################################

  def subset(self, idx):
    """A new ScoreMatrix with the rows in idx (in that order)"""
    idx = np.asarray(idx, dtype=np.int64)
    return ScoreMatrix(self.__scores[idx], self.__labels[idx], kind=self.__kind, name=self.__name, validate=False)
  #edef

  def withScores(self, scores, kind):
    """Same labels, new scores. Used by transformations such as softmax"""
    return ScoreMatrix(scores, self.__labels, kind=kind, name=self.__name)
  #edef

  def top_k_accuracy(self, k):
    """Fraction of rows whose label is among the k highest scores"""
    k = min(int(k), self.K)
    label_scores = self.__scores[np.arange(self.n), self.__labels]
    above = (self.__scores > label_scores[:, None]).sum(axis=1)
    return float(np.mean(above < k))
  #edef

  def __str__(self):
    dstr  = "ScoreMatrix object\n"
    dstr += " Name: %s\n" % (self.__name if self.__name is not None else hex(id(self)))
    dstr += " Kind: %s\n" % self.__kind
    dstr += " Examples (n): %d\n" % self.n
    dstr += " Classes (K): %d\n" % self.K
    return dstr
  #edef

#eclass

###############################################################################

SortedRow = namedtuple('SortedRow', [ 'scores', 'perm', 'cumsum', 'label' ])

class SortedScores(object):
  """
  Per-row descending scores and the permutation of class indices that produced them.
    sorted[i][j] == scores[i][perm[i][j]]
    cumsum[i][j] == sum(sorted[i][:j+1])
  The rank o_x(y) of class y is its 1-based position in perm[i].
  Construct with cset.ops.sort_scores.
  """

  __slots__ = [ '__sorted', '__perm', '__cumsum', '__labels', '__kind', '__ranks' ]

  def __init__(self, sorted, perm, labels=None, kind=PROBABILITIES, cumsum=None):
    self.__sorted = _readonly(np.asarray(sorted, dtype=np.float64))
    self.__perm   = _readonly(np.asarray(perm, dtype=np.int64))
    self.__cumsum = _readonly(np.cumsum(self.__sorted, axis=1) if cumsum is None else np.asarray(cumsum, dtype=np.float64))
    self.__labels = None if labels is None else _readonly(np.asarray(labels, dtype=np.int64))
    self.__kind   = kind
    self.__ranks  = None
  #edef

  @property
  def sorted(self):
    return self.__sorted
  #edef

  @property
  def perm(self):
    return self.__perm
  #edef

  @property
  def cumsum(self):
    return self.__cumsum
  #edef

  @property
  def labels(self):
    return self.__labels
  #edef

  @property
  def kind(self):
    return self.__kind
  #edef

  @property
  def n(self):
    return self.__sorted.shape[0]
  #edef

  @property
  def K(self):
    return self.__sorted.shape[1]
  #edef

  def __len__(self):
    return self.n
  #edef

  @property
  def ranks(self):
    """1-based rank of the label in each row"""
    if self.__labels is None:
      raise ValueError("These sorted scores carry no labels")
    #fi
    if self.__ranks is None:
      self.__ranks = _readonly(np.argmax(self.__perm == self.__labels[:, None], axis=1) + 1)
    #fi
    return self.__ranks
  #edef

  def row(self, i):
    return SortedRow(self.__sorted[i], self.__perm[i], self.__cumsum[i],
                     None if self.__labels is None else int(self.__labels[i]))
  #edef

  def subset(self, idx):
    idx = np.asarray(idx, dtype=np.int64)
    return SortedScores(self.__sorted[idx], self.__perm[idx],
                        labels=None if self.__labels is None else self.__labels[idx],
                        kind=self.__kind, cumsum=self.__cumsum[idx])
  #edef

  def unsorted(self):
    """The original n x K score matrix, recovered through perm"""
    scores = np.empty_like(self.__sorted)
    np.put_along_axis(scores, self.__perm, self.__sorted, axis=1)
    return scores
  #edef

#eclass

###############################################################################

class SplitSpec(object):
  """
  How to partition a score matrix into (tuning, calibration, evaluation) rows.

  seed:      master seed for the row shuffle
  sizes:     (tune, cal, eval) absolute row counts, or
  fractions: (tune, cal, eval) fractions of n (floored)
  """

  __slots__ = [ 'seed', 'sizes', 'fractions' ]

  def __init__(self, seed, sizes=None, fractions=None):
    if (sizes is None) == (fractions is None):
      raise utils.ConfigError("Specify exactly one of sizes or fractions")
    #fi
    for values in [ v for v in [ sizes, fractions ] if v is not None ]:
      if len(values) != 3 or any(v < 0 for v in values):
        raise utils.ConfigError("Split needs three nonnegative (tune, cal, eval) values, got %s" % str(values))
      #fi
    #efor
    self.seed      = int(seed)
    self.sizes     = None if sizes is None else tuple(int(s) for s in sizes)
    self.fractions = None if fractions is None else tuple(float(f) for f in fractions)
  #edef

  def resolve(self, n):
    """Absolute (tune, cal, eval) sizes for an n-row matrix"""
    if self.sizes is not None:
      sizes = self.sizes
    else:
      sizes = tuple(int(np.floor(f * n)) for f in self.fractions)
    #fi
    if sum(sizes) > n:
      raise utils.ConfigError("infeasible split: sizes %s need %d rows, matrix has %d" % (str(sizes), sum(sizes), n))
    #fi
    return sizes
  #edef

  def __repr__(self):
    return 'SplitSpec(seed=%d, %s)' % (self.seed, ('sizes=%s' % str(self.sizes)) if self.sizes is not None else ('fractions=%s' % str(self.fractions)))
  #edef

#eclass
