import numpy as np
import pytest

import cset
from cset import structures, ops, synth

###############################################################################

def pytest_configure(config):
  config.addinivalue_line('markers', 'slow: long Monte-Carlo checks (deselect with -m "not slow")')
#edef

@pytest.fixture(autouse=True)
def default_settings():
  """Every test starts from the packaged defaults, quiet"""
  cset.settings.reset()
  cset.settings.quiet()
  yield cset.settings
  cset.settings.reset()
#edef

###############################################################################

def sorted_row(probs, label=None):
  """SortedRow of one descending probability vector"""
  m = structures.ScoreMatrix([ probs ], [ 0 if label is None else label ])
  return ops.sort_scores(m, seed=0).row(0)
#edef

def sorted_matrix(rows, labels):
  return ops.sort_scores(structures.ScoreMatrix(rows, labels), seed=0)
#edef

def ranked(ranks, K=5):
  """SortedScores whose labels sit at the given 1-based ranks (identity permutation, uniform rows)"""
  n = len(ranks)
  srt = np.tile(np.full(K, 1.0 / K), (n, 1))
  perm = np.tile(np.arange(K), (n, 1))
  return structures.SortedScores(srt, perm, labels=np.asarray(ranks) - 1)
#edef

###############################################################################

@pytest.fixture
def tail_problem():
  """K=100 synthetic problem whose observed tail ranks are shuffled beyond the top 10"""
  return synth.generate(synth.SynthSpec(6000, 100, corruption=synth.TAIL_PERMUTE, param=10, seed=11))
#edef

@pytest.fixture
def clean_problem():
  return synth.generate(synth.SynthSpec(4000, 20, seed=5))
#edef
