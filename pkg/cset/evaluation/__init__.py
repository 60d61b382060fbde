from . import strata as strata
from . import metrics as metrics

from .strata import parse_strata
from .metrics import EvalReport, StratumRow, DifficultyRow
from .metrics import coverage_and_size, sscv, stratified_coverage, difficulty_table, size_histogram, expected_size, evaluate

from . import trials as trials
from .trials import TrialProtocol, TuningPolicy, TrialAggregate, run_trials, run_sweep, prepare_trial
from .trials import protocol_from_settings, policy_from_settings
