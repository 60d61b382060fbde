from .. import utils

from collections import namedtuple

np = utils.py.loadExternalModule('numpy')

###############################################################################

PredictionSet = namedtuple('PredictionSet', [ 'classes', 'u' ])
PredictionSet.__doc__ = """
Prediction set of one example.
  classes: tuple of class indices, most to least likely (a prefix of the sorted permutation)
  u:       the uniform variate used, None for deterministic sets
"""

###############################################################################

class PredictionBatch(object):
  """
  Prediction sets for every row of a SortedScores matrix, stored as prefix sizes.
  Set i is perm[i][:sizes[i]]. Indexing yields PredictionSet objects.
  """

  __slots__ = [ '__sizes', '__perm', '__u', '__ranks' ]

  def __init__(self, sizes, perm, u=None, ranks=None):
    self.__sizes = np.asarray(sizes, dtype=np.int64)
    self.__perm  = np.asarray(perm, dtype=np.int64)
    self.__u     = None if u is None else np.asarray(u, dtype=np.float64)
    self.__ranks = None if ranks is None else np.asarray(ranks, dtype=np.int64)
    if self.__sizes.shape[0] != self.__perm.shape[0]:
      raise ValueError("Got %d set sizes for %d rows" % (self.__sizes.shape[0], self.__perm.shape[0]))
    #fi
  #edef

  @property
  def sizes(self):
    return self.__sizes
  #edef

  @property
  def perm(self):
    return self.__perm
  #edef

  @property
  def u(self):
    return self.__u
  #edef

  @property
  def K(self):
    return self.__perm.shape[1]
  #edef

  def __len__(self):
    return len(self.__sizes)
  #edef

  def __getitem__(self, i):
    return PredictionSet(tuple(int(c) for c in self.__perm[i, :self.__sizes[i]]),
                         None if self.__u is None else float(self.__u[i]))
  #edef

  def __iter__(self):
    for i in range(len(self)):
      yield self[i]
    #efor
  #edef

  def label_ranks(self, labels=None):
    """1-based position of each label in its row's permutation"""
    if labels is None:
      if self.__ranks is None:
        raise ValueError("No labels known for this batch, pass them explicitly")
      #fi
      return self.__ranks
    #fi
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(self):
      raise ValueError("Got %d labels for %d prediction sets" % (len(labels), len(self)))
    #fi
    return np.argmax(self.__perm == labels[:, None], axis=1) + 1
  #edef

  def covered(self, labels=None):
    """Boolean array: is the label inside its set"""
    return self.label_ranks(labels) <= self.__sizes
  #edef

#eclass

###############################################################################

def as_sizes_and_covered(sets, labels=None):
  """
  (sizes, covered) arrays from either a PredictionBatch or a list of PredictionSet.
  labels may be omitted for a batch built from labelled scores.
  """
  if isinstance(sets, PredictionBatch):
    return sets.sizes, sets.covered(labels)
  #fi
  if labels is None:
    raise ValueError("labels are required for a list of prediction sets")
  #fi
  labels = list(labels)
  if len(labels) != len(sets):
    raise ValueError("Got %d labels for %d prediction sets" % (len(labels), len(sets)))
  #fi
  sizes   = np.array([ len(s.classes) if isinstance(s, PredictionSet) else len(s) for s in sets ], dtype=np.int64)
  covered = np.array([ int(y) in (s.classes if isinstance(s, PredictionSet) else s) for (s, y) in zip(sets, labels) ], dtype=bool)
  return sizes, covered
#edef

###############################################################################
