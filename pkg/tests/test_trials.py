import numpy as np
import pandas as pd
import pytest

from cset import structures, synth, evaluation, formats, utils
from cset.evaluation import TrialProtocol
from cset.synth import SynthSpec

###############################################################################

def protocol(n_trials=3, tune_size=400, cal_size=400, eval_size=800, **kw):
  values = dict(n_trials=n_trials, tune_size=tune_size, cal_size=cal_size, eval_size=eval_size, seed=17,
                platt=True, platt_split='calibration', temperature=None, t_bounds=(0.05, 20.0), t_tol=1e-4)
  values.update(kw)
  return TrialProtocol(**values)
#edef

@pytest.fixture
def problem():
  return synth.generate(SynthSpec(2000, 20, corruption=synth.TAIL_PERMUTE, param=5, seed=21))[1]
#edef

###############################################################################

def test_single_trial_median_is_the_trial(problem):
  aggs = evaluation.run_trials(problem, protocol(n_trials=1), evaluation.policy_from_settings(), methods=['aps', 'raps'])
  for agg in aggs.values():
    assert agg.n_trials == 1
    row = agg.trials.iloc[0]
    for metric in [ 'coverage', 'size', 'sscv', 'top1', 'top5' ]:
      assert agg.median_of_means[metric] == row[metric]
    #efor
  #efor
#edef

def test_execution_order_does_not_matter(problem):
  policy = evaluation.policy_from_settings()
  a = evaluation.run_trials(problem, protocol(), policy, methods=['naive', 'raps', 'fixed_k'])
  b = evaluation.run_trials(problem, protocol(), policy, methods=['naive', 'raps', 'fixed_k'], order=[2, 0, 1])
  for method in a:
    pd.testing.assert_frame_equal(a[method].trials, b[method].trials)
    assert a[method].histogram == b[method].histogram
    assert a[method].per_stratum == b[method].per_stratum
    assert a[method].per_difficulty == b[method].per_difficulty
    assert a[method].median_of_means == b[method].median_of_means
  #efor
#edef

def test_trials_use_distinct_splits(problem):
  agg = evaluation.run_trials(problem, protocol(), evaluation.policy_from_settings(), methods=['aps'])['aps']
  assert agg.trials['seed'].nunique() == 3
  assert agg.trials['trial'].tolist() == [0, 1, 2]
  assert agg.trials['coverage'].nunique() > 1
#edef

def test_tuned_raps_records_its_penalty(problem):
  agg = evaluation.run_trials(problem, protocol(), evaluation.policy_from_settings(), methods=['raps'])['raps']
  assert set(agg.trials['lambda']) <= set([ 0.001, 0.01, 0.1, 0.2, 0.5 ])
  assert (agg.trials['k_reg'] >= 1).all()
#edef

def test_fixed_lambda_uses_settings_k_reg(problem):
  policy = evaluation.policy_from_settings(lam=0.2)
  agg = evaluation.run_trials(problem, protocol(tune_size=0), policy, methods=['raps'])['raps']
  assert (agg.trials['lambda'] == 0.2).all()
  assert (agg.trials['k_reg'] == 5).all()
#edef

def test_tuning_needs_a_tuning_split(problem):
  with pytest.raises(utils.ConfigError):
    evaluation.run_trials(problem, protocol(tune_size=0), evaluation.policy_from_settings(), methods=['raps'])
  #ewith
#edef

def test_unknown_method(problem):
  with pytest.raises(utils.ConfigError):
    evaluation.run_trials(problem, protocol(), evaluation.policy_from_settings(), methods=['aps', 'top1'])
  #ewith
#edef

def test_logits_are_temperature_scaled():
  true, _ = synth.generate(SynthSpec(3000, 10, concentration=5.0, seed=4))
  logits = structures.ScoreMatrix(2.0 * np.log(true.scores), true.labels, kind=structures.LOGITS)
  aggs = evaluation.run_trials(logits, protocol(n_trials=2, cal_size=1500, eval_size=1000, tune_size=0),
                               evaluation.policy_from_settings(lam=0.0), methods=['aps'])
  temperatures = aggs['aps'].trials['temperature']
  assert np.all(np.abs(temperatures - 2.0) < 0.3)
#edef

def test_fixed_temperature_skips_fitting():
  true, _ = synth.generate(SynthSpec(1000, 5, seed=4))
  logits = structures.ScoreMatrix(np.log(true.scores), true.labels, kind=structures.LOGITS)
  aggs = evaluation.run_trials(logits, protocol(n_trials=1, tune_size=0, cal_size=300, eval_size=600, temperature=1.0),
                               evaluation.policy_from_settings(lam=0.0), methods=['lac'])
  assert aggs['lac'].trials['temperature'].tolist() == [1.0]
#edef

def test_probabilities_are_not_rescaled(problem):
  agg = evaluation.run_trials(problem, protocol(n_trials=1), evaluation.policy_from_settings(), methods=['lac'])['lac']
  assert np.isnan(agg.trials['temperature'].iloc[0])
#edef

def test_pooled_tables(problem):
  agg = evaluation.run_trials(problem, protocol(), evaluation.policy_from_settings(), methods=['aps'])['aps']
  assert sum(r.count for r in agg.per_stratum) == pytest.approx(800)
  assert sum(r.count for r in agg.per_difficulty) == pytest.approx(800)
  assert sum(agg.histogram.values()) == 3 * 800
#edef

###############################################################################

def test_sweep_grid(problem):
  table = evaluation.run_sweep(problem, protocol(n_trials=2, tune_size=0), evaluation.policy_from_settings(),
                               lambdas=[0.0, 0.01, 1.0], kregs=[1, 5])
  assert table.shape == (2, 3)
  assert table.index.name == 'k_reg'
  assert list(table.columns) == [0.0, 0.01, 1.0]
  assert (table.values > 0).all()
  assert table.loc[1, 1.0] <= table.loc[1, 0.0]
#edef

###############################################################################

def test_experiment_tables(problem, tmp_path):
  aggs = evaluation.run_trials(problem, protocol(n_trials=2), evaluation.policy_from_settings())
  results = formats.tableUtils.results_table(aggs)
  assert list(results.columns.get_level_values(0)) == ['Accuracy'] * 2 + ['Coverage'] * 5 + ['Size'] * 5
  assert list(results[ 'Coverage' ].columns) == ['Naive', 'APS', 'RAPS', 'LAC', 'Top K']
  written = formats.tableUtils.writeExperiment(str(tmp_path), aggs)
  names = sorted(p.split('/')[-1] for p in written)
  assert 'results.txt' in names and 'results.csv' in names and 'histogram_fixed_k.csv' in names
  hist = pd.read_csv(str(tmp_path / 'histogram_raps.csv'))
  assert list(hist.columns) == ['size', 'count']
  assert hist['count'].sum() == 2 * 800
#edef

###############################################################################
