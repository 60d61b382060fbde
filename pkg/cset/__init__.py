"""
cset: conformal prediction sets from classifier score matrices.

cset turns the precomputed scores of any classifier into prediction sets with a finite-sample
coverage guarantee. It provides:

  * Score matrices (`cset.structures`, `cset.formats`)
    * ScoreMatrix / SortedScores / SplitSpec
    * CSV and binary score files, JSON model files, report tables

  * Matrix operations (`cset.ops`)
    * softmax at a temperature, per-row sorting with seeded tie-breaking, seeded splits
    * order statistics (`cset.ops.array`)

  * Statistics (`cset.stats`)
    * Temperature (Platt) scaling (`cset.stats.platt`)
    * binomial standard errors, median-of-means

  * Prediction sets (`cset.conformal`)
    * naive, APS, RAPS, LAC and conformalized fixed-k sets, randomized or deterministic
    * split-conformal calibration of the set threshold

  * Tuning (`cset.tuning`)
    * k* for fixed-size sets, lambda for RAPS (by set size or by size-stratified coverage)

  * Evaluation (`cset.evaluation`)
    * coverage, size, size-stratified coverage violation, difficulty tables, histograms
    * repeated random-split trials with median-of-means aggregation

  * Synthetic problems with known conditional probabilities (`cset.synth`)

  * A command line (`cset.cli`, `python -m cset`)

cset loads even when a dependency is missing; functionality needing it raises an ImportError.
Required: numpy, scipy, pandas. Tests additionally use pytest and hypothesis.
"""

# Make settings available
from .config import config
from .config import settings

# Make internal structures and utilities available
from . import utils as utils
from . import structures as structures

# Make data structure ops and statistics available
from . import ops as ops
from . import stats as stats

# Prediction sets, evaluation and tuning (evaluation before tuning: tuning scores lambdas with evaluation.metrics)
from . import conformal as conformal
from . import evaluation as evaluation
from . import tuning as tuning

# File formats and report tables
from . import formats as formats

from . import synth as synth
from . import cli as cli

def __version__():
  print("cset (conformal prediction sets) python module")
  print(config.settings.dumps())
#edef

__missingDependencies = settings.missingDependencies()
if len(__missingDependencies[0]) > 0:
  utils.msg.warning("The following dependencies of cset are missing. Functionality of cset will be affected.\n  %s" % ', '.join(__missingDependencies[0]))
#fi

if len(__missingDependencies[1]) > 0:
  utils.msg.dbm("Some optional dependencies of cset are missing (only needed for the test suite).\n  %s" % ', '.join(__missingDependencies[1]))
#fi
