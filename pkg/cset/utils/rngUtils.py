"""
Seed derivation.

Every random quantity in cset is drawn from a generator keyed by the master seed plus a tuple of
integer counters (stream, trial, split, ...). Draws therefore never depend on the order in which
trials, splits or methods are processed, and a partial rerun reproduces the matching part of a full run.
"""

from . import pyUtils as py

np = py.loadExternalModule('numpy')

###############################################################################

# Stream identifiers. Never renumber these: they are part of the reproducibility contract.
STREAM_SPLIT  = 1
STREAM_TIES   = 2
STREAM_U      = 3
STREAM_TRIAL  = 4
STREAM_SYNTH  = 5
STREAM_TUNE   = 6
STREAM_ORACLE = 7

# Split identifiers
SPLIT_TUNE = 0
SPLIT_CAL  = 1
SPLIT_EVAL = 2

###############################################################################

def _keys(seed, keys):
  return [ int(seed) & 0xFFFFFFFFFFFFFFFF ] + [ int(k) for k in keys ]
#edef

def generator(seed, *keys):
  """
  A numpy Generator for the counter tuple (seed, *keys)
  """
  return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_keys(seed, keys))))
#edef

def derive_seed(seed, *keys):
  """
  A 63-bit integer seed for the counter tuple (seed, *keys)
  """
  state = np.random.SeedSequence(_keys(seed, keys)).generate_state(1, dtype=np.uint64)[0]
  return int(state) >> 1
#edef

###############################################################################
