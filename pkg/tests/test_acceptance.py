"""
End-to-end guarantees on synthetic problems with known conditional probabilities.
"""

import filecmp
import os

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from cset import cli, conformal, evaluation, ops, stats, structures, synth, tuning
from cset.conformal import MethodSpec, ConformalModel, PredictionSet
from cset.evaluation import TrialProtocol

from test_platt import planted

###############################################################################

ALPHA = 0.1

def protocol(n_trials, tune_size=0, cal_size=1000, eval_size=10000, seed=0):
  return TrialProtocol(n_trials=n_trials, tune_size=tune_size, cal_size=cal_size, eval_size=eval_size, seed=seed,
                       platt=False, platt_split='calibration', temperature=None, t_bounds=(0.05, 20.0), t_tol=1e-4)
#edef

def sandwich(agg, n_cal):
  mean, se = agg.mean_se('coverage')
  return (1 - ALPHA) - 3 * se <= mean <= (1 - ALPHA) + 1.0 / (n_cal + 1) + 3 * se
#edef

@pytest.fixture(scope='module')
def tail_noise():
  """K=100, default concentration, observed ranks shuffled beyond the top 10"""
  return synth.generate(synth.SynthSpec(11000, 100, corruption=synth.TAIL_PERMUTE, param=10, seed=2024))[1]
#edef

@pytest.fixture(scope='module')
def mixed_noise():
  """K=100, tail_permute(10): nine rows in ten nearly one-hot, the rest flat"""
  return synth.generate_mixture([ synth.SynthSpec(9900, 100, concentration=0.2, corruption=synth.TAIL_PERMUTE, param=10, seed=2025),
                                  synth.SynthSpec(1100, 100, concentration=100.0, corruption=synth.TAIL_PERMUTE, param=10, seed=2026) ])[1]
#edef

@pytest.fixture(scope='module')
def coverage_run(tail_noise):
  policy = evaluation.policy_from_settings(alpha=ALPHA, lam=0.01, k_reg=5, randomized=True)
  return evaluation.run_trials(tail_noise, protocol(100), policy, methods=['raps', 'aps', 'lac', 'naive'])
#edef

###############################################################################
# coverage

@pytest.mark.slow
def test_raps_coverage_sandwich(coverage_run):
  assert sandwich(coverage_run['raps'], 1000)
#edef

@pytest.mark.slow
@pytest.mark.parametrize('method', [ 'aps', 'lac' ])
def test_aps_and_lac_coverage_sandwich(coverage_run, method):
  assert sandwich(coverage_run[method], 1000)
#edef

@pytest.mark.slow
def test_naive_undercovers_under_tail_noise(coverage_run):
  mean, se = coverage_run['naive'].mean_se('coverage')
  assert mean < (1 - ALPHA) - 3 * se
#edef

###############################################################################
# set sizes

def test_heavy_penalty_never_exceeds_k_star(tail_noise):
  policy = evaluation.policy_from_settings(alpha=ALPHA)
  for t in range(10):
    trial = evaluation.prepare_trial(tail_noise, protocol(10, cal_size=1000, eval_size=5000), t)
    k_star = tuning.fixed_k_star(trial.cal, ALPHA)
    spec = MethodSpec('raps', ALPHA, lam=1.0, k_reg=k_star, randomized=policy.randomized)
    model = conformal.calibrate(trial.cal, spec, seed=trial.seed)
    sizes = conformal.predict_batch(model, trial.eval).sizes
    assert sizes.max() <= k_star
  #efor
#edef

@pytest.mark.slow
def test_tuned_raps_shrinks_sets(mixed_noise):
  policy = evaluation.policy_from_settings(alpha=ALPHA, objective=tuning.SIZE, grid=[ 0.001, 0.01, 0.1, 0.2, 0.5 ])
  aggs = evaluation.run_trials(mixed_noise, protocol(20, tune_size=1000, cal_size=1000, eval_size=5000), policy,
                               methods=['aps', 'raps'])
  assert aggs['raps'].median_of_means['size'] <= 0.7 * aggs['aps'].median_of_means['size']
#edef

def test_aps_equals_unpenalized_raps():
  rng = np.random.default_rng(6)
  probs = rng.dirichlet(np.full(50, 0.1), size=2000)
  ss = ops.sort_scores(structures.ScoreMatrix(probs, rng.integers(0, 50, size=2000)), seed=6)
  cal, ev = ss.subset(np.arange(1000)), ss.subset(np.arange(1000, 2000))
  aps  = conformal.calibrate(cal, MethodSpec('aps', ALPHA), seed=8)
  raps = conformal.calibrate(cal, MethodSpec('raps', ALPHA, lam=0.0, k_reg=7), seed=8)
  assert aps.tau_hat == raps.tau_hat
  a, r = conformal.predict_batch(aps, ev), conformal.predict_batch(raps, ev)
  np.testing.assert_array_equal(a.sizes, r.sizes)
  assert [ s.classes for s in a ] == [ s.classes for s in r ]
#edef

###############################################################################
# size-stratified coverage

def brute_force_sscv(sets, labels, strata, alpha):
  worst = None
  for (lo, hi) in strata:
    hits, count = 0, 0
    for (s, y) in zip(sets, labels):
      size = len(s.classes)
      if lo <= size <= hi or (size == 0 and lo == 1 and (lo, hi) == strata[0]):
        count += 1
        hits += 1 if y in s.classes else 0
      #fi
    #efor
    if count > 0:
      gap = abs(hits / count - (1 - alpha))
      worst = gap if worst is None else max(worst, gap)
    #fi
  #efor
  return worst
#edef

@st.composite
def tiny_instances(draw):
  K = draw(st.integers(min_value=2, max_value=6))
  n = draw(st.integers(min_value=1, max_value=20))
  sets, labels = [], []
  for i in range(n):
    classes = draw(st.permutations(range(K)))
    size = draw(st.integers(min_value=0, max_value=K))
    sets.append(PredictionSet(tuple(classes[:size]), None))
    labels.append(draw(st.integers(min_value=0, max_value=K - 1)))
  #efor
  cut = draw(st.integers(min_value=1, max_value=K))
  strata = [ (1, cut) ] + ([ (cut + 1, K) ] if cut < K else [])
  alpha = draw(st.sampled_from([ 0.05, 0.1, 0.2, 0.5 ]))
  return sets, labels, strata, alpha
#edef

@hsettings(max_examples=50, deadline=None)
@given(tiny_instances())
def test_sscv_matches_brute_force(instance):
  sets, labels, strata, alpha = instance
  assert abs(evaluation.sscv(sets, labels, strata, alpha) - brute_force_sscv(sets, labels, strata, alpha)) <= 1e-12
#edef

@pytest.mark.slow
@pytest.mark.parametrize('seed', range(3))
def test_oracle_aps_covers_within_every_stratum(seed):
  true, _ = synth.generate(synth.SynthSpec(100000, 100, seed=seed))
  ss = ops.sort_scores(true, seed=seed)
  model = ConformalModel(MethodSpec('aps', ALPHA, randomized=True), 1 - ALPHA, 0, seed=seed, K=100)
  sets = conformal.predict_batch(model, ss)
  checked = 0
  for row in evaluation.stratified_coverage(sets, ss.labels, '0-1,2-3,4-10,11-100'):
    if row.count >= 500:
      assert abs(row.coverage - (1 - ALPHA)) <= 3 * stats.binomial_se(1 - ALPHA, row.count), row
      checked += 1
    #fi
  #efor
  assert checked >= 2
#edef

def test_plateau_oracle_sets_cover_within_every_stratum():
  probs, widths = synth.generate_plateau(synth.SynthSpec(20000, 10, seed=77), 1 - ALPHA)
  ss = ops.sort_scores(probs, seed=77)
  model = ConformalModel(MethodSpec('aps', ALPHA, randomized=False), (1 - ALPHA) + 1e-9, 0, K=10)
  sets = conformal.predict_batch(model, ss)
  np.testing.assert_array_equal(sets.sizes, widths)
  for row in evaluation.stratified_coverage(sets, ss.labels, '0-1,2-3,4-10'):
    if row.count >= 500:
      assert abs(row.coverage - (1 - ALPHA)) <= 3 * stats.binomial_se(1 - ALPHA, row.count)
    #fi
  #efor
#edef

@pytest.mark.slow
def test_adaptiveness_tuning_does_not_lose_to_aps(tail_noise):
  policy = evaluation.policy_from_settings(alpha=ALPHA, objective=tuning.ADAPTIVENESS,
                                           grid=[ 0.00001, 0.0001, 0.0008, 0.001, 0.0015, 0.002 ])
  aggs = evaluation.run_trials(tail_noise, protocol(10, tune_size=2000, cal_size=1000, eval_size=8000), policy,
                               methods=['aps', 'raps'])
  raps = stats.median_of_means(aggs['raps'].values('sscv'))
  aps  = stats.median_of_means(aggs['aps'].values('sscv'))
  assert raps <= aps
#edef

###############################################################################
# hand fixtures, one place

def _row(values, label=0):
  return ops.sort_scores(structures.ScoreMatrix([ values ], [ label ]), seed=0).row(0)
#edef

def test_hand_fixtures():
  row = _row([0.5, 0.3, 0.2])
  assert conformal.conformity_score(row, 2, 1.0, MethodSpec('raps', ALPHA, lam=0.1, k_reg=1)) == pytest.approx(0.9, abs=1e-9)
  assert conformal.conformity_score(row, 2, 0.5, MethodSpec('aps', ALPHA)) == pytest.approx(0.65, abs=1e-9)
  assert conformal.conformity_score(_row([0.7, 0.2, 0.1]), 2, 1.0, MethodSpec('lac', ALPHA)) == pytest.approx(0.8, abs=1e-9)

  assert ops.array.conformal_quantile([0.2, 0.5, 0.7, 0.9], 0.5) == pytest.approx(0.7, abs=1e-9)

  aps = ConformalModel(MethodSpec('aps', ALPHA), 0.85, 10, K=3)
  assert len(conformal.predict(aps, row, u=1.0).classes) == 2
  assert len(conformal.predict(aps, row, u=0.0).classes) == 3
  raps = ConformalModel(MethodSpec('raps', ALPHA, lam=1.0, k_reg=1), 1.2, 10, K=3)
  assert len(conformal.predict(raps, row, u=1.0).classes) == 1
  naive = ConformalModel(MethodSpec('naive', 0.05, randomized=False), 0.95, 10, K=3)
  assert len(conformal.predict(naive, _row([0.6, 0.3, 0.1])).classes) == 3
  assert conformal.set_size_given_u(aps, row)[2] == pytest.approx(0.25, abs=1e-9)

  ranks = structures.SortedScores(np.full((5, 5), 0.2), np.tile(np.arange(5), (5, 1)), labels=np.array([1, 1, 2, 3, 1]) - 1)
  assert tuning.fixed_k_star(ranks, 0.4) == 2
  assert tuning.mix_probability(0.85, 0.95, ALPHA) == pytest.approx(0.5, abs=1e-9)

  sets = [ PredictionSet((0,), None), PredictionSet((0,), None), PredictionSet((0, 1), None), PredictionSet((0, 1, 2), None) ]
  assert evaluation.sscv(sets, [0, 1, 1, 2], [(1, 1), (2, 3)], ALPHA) == pytest.approx(0.4, abs=1e-9)

  assert stats.nll(structures.ScoreMatrix([[0.0, 0.0]], [0], kind=structures.LOGITS)) == pytest.approx(np.log(2), abs=1e-9)
  assert stats.nll(structures.ScoreMatrix([[np.log(3), 0.0]], [0], kind=structures.LOGITS)) == pytest.approx(-np.log(0.75), abs=1e-9)
#edef

###############################################################################
# temperature recovery

@pytest.mark.slow
@pytest.mark.parametrize('seed', range(5))
def test_planted_temperature_is_recovered(seed):
  fit = stats.fit_temperature(planted(2.5, 50000, 10, seed))
  assert fit.temperature == pytest.approx(2.5, abs=0.1)
#edef

def test_fit_matches_grid_search():
  m = planted(2.5, 5000, 10, 11)
  grid = np.linspace(0.05, 20.0, 2000)
  best = grid[np.argmin([ stats.nll(m, T) for T in grid ])]
  fit = stats.fit_temperature(m)
  assert abs(fit.temperature - best) <= grid[1] - grid[0]
#edef

###############################################################################
# reproducibility

def test_experiment_is_byte_identical(tmp_path):
  data = str(tmp_path / 'synth')
  assert cli.main([ 'synth', '--n', '2500', '--K', '30', '--corruption', 'tail_permute(5)', '--seed', '9', '--out', data ]) == cli.EXIT_OK
  args = [ 'experiment', os.path.join(data, 'observed.bin'), '--trials', '3', '--tune-size', '400', '--cal-size', '400',
           '--eval-size', '1000', '--seed', '4' ]
  outputs = []
  for name in [ 'a', 'b' ]:
    out = str(tmp_path / name)
    assert cli.main(args + [ '--out', out ]) == cli.EXIT_OK
    outputs.append(out)
  #efor
  names = sorted(f for f in os.listdir(outputs[0]) if f.endswith('.csv'))
  assert 'results.csv' in names and 'sweep.csv' in names
  match, mismatch, errors = filecmp.cmpfiles(outputs[0], outputs[1], names, shallow=False)
  assert mismatch == [] and errors == []
#edef

###############################################################################
