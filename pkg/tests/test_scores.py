import gzip
import struct

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from cset import structures, ops, formats, utils

###############################################################################

def _write(path, text):
  path.write_text(text)
  return str(path)
#edef

###############################################################################
# ScoreMatrix

def test_score_matrix_shape_and_kind():
  m = structures.ScoreMatrix([[0.6, 0.4], [0.3, 0.7], [0.5, 0.5]], [0, 1, 0])
  assert (m.n, m.K) == (3, 2)
  assert m.kind == structures.PROBABILITIES
  assert m.scores.dtype == np.float64
  with pytest.raises(ValueError):
    m.scores[0, 0] = 1.0
  #ewith
#edef

@pytest.mark.parametrize('scores, labels, message', [
  ([[0.6, 0.4], [0.3, 0.7], [0.5, 0.5]], [0, 1, 2], 'label out of range at row 2'),
  ([[0.6, 0.4], [0.3, 0.7]], [0, -1], 'label out of range at row 1'),
  ([[0.6, 0.4], [np.nan, 0.7]], [0, 1], 'non-finite value at row 1'),
  ([[0.6, 0.4], [0.3, 0.8]], [0, 1], 'probabilities do not sum to 1 at row 1'),
  ([[1.2, -0.2], [0.3, 0.7]], [0, 1], 'probability outside [0,1] at row 0'),
  ([[1.0], [1.0]], [0, 0], 'at least 2 classes'),
  (np.zeros((0, 3)), [], 'empty matrix'),
])
def test_score_matrix_rejects(scores, labels, message):
  with pytest.raises(utils.DataError) as err:
    structures.ScoreMatrix(scores, labels)
  #ewith
  assert message in str(err.value)
#edef

def test_score_matrix_renormalizes_small_deviations():
  m = structures.ScoreMatrix([[0.5004, 0.5]], [0])
  assert abs(m.scores.sum() - 1) < 1e-12
  assert m.scores[0, 0] > m.scores[0, 1]
#edef

def test_logits_accept_any_finite_value():
  m = structures.ScoreMatrix([[-3.0, 12.5, 0.0]], [1], kind=structures.LOGITS)
  assert m.kind == structures.LOGITS
#edef

def test_top_k_accuracy():
  m = structures.ScoreMatrix([[0.6, 0.3, 0.1], [0.6, 0.3, 0.1], [0.6, 0.3, 0.1]], [0, 1, 2])
  assert m.top_k_accuracy(1) == pytest.approx(1 / 3)
  assert m.top_k_accuracy(2) == pytest.approx(2 / 3)
  assert m.top_k_accuracy(5) == 1.0
#edef

###############################################################################
# softmax

@pytest.mark.parametrize('logits, temperature, expected', [
  ([0.0, 0.0], 1.0, [0.5, 0.5]),
  ([np.log(3), 0.0], 1.0, [0.75, 0.25]),
  ([2.0, 0.0], 1e6, [0.5, 0.5]),
])
def test_softmax(logits, temperature, expected):
  m = structures.ScoreMatrix([ logits ], [0], kind=structures.LOGITS)
  p = ops.softmax(m, temperature)
  assert p.kind == structures.PROBABILITIES
  np.testing.assert_allclose(p.scores[0], expected, atol=1e-9 if temperature == 1.0 else 1e-5)
#edef

def test_softmax_is_stable_for_large_logits():
  m = structures.ScoreMatrix([[1000.0, 999.0, -1000.0]], [0], kind=structures.LOGITS)
  p = ops.softmax(m).scores[0]
  assert np.all(np.isfinite(p))
  assert p.sum() == pytest.approx(1.0, abs=1e-12)
#edef

@pytest.mark.parametrize('temperature', [ 0.0, -1.0, np.inf, np.nan ])
def test_softmax_rejects_bad_temperature(temperature):
  m = structures.ScoreMatrix([[1.0, 0.0]], [0], kind=structures.LOGITS)
  with pytest.raises(utils.ConfigError):
    ops.softmax(m, temperature)
  #ewith
#edef

def test_softmax_needs_logits():
  with pytest.raises(ValueError):
    ops.softmax(structures.ScoreMatrix([[0.5, 0.5]], [0]))
  #ewith
#edef

###############################################################################
# sort_scores

def test_sort_scores_example():
  ss = ops.sort_scores(structures.ScoreMatrix([[0.2, 0.5, 0.3]], [2]), seed=0)
  np.testing.assert_array_equal(ss.sorted[0], [0.5, 0.3, 0.2])
  np.testing.assert_array_equal(ss.perm[0], [1, 2, 0])
  np.testing.assert_allclose(ss.cumsum[0], [0.5, 0.8, 1.0])
  assert ss.ranks[0] == 2
#edef

def test_sort_scores_ties_are_seeded():
  m = structures.ScoreMatrix([[0.5, 0.5]] * 50, [0] * 50)
  a = ops.sort_scores(m, seed=3)
  b = ops.sort_scores(m, seed=3)
  np.testing.assert_array_equal(a.perm, b.perm)
  # both orders occur across rows
  assert len(set(tuple(p) for p in a.perm)) == 2
  c = ops.sort_scores(m, seed=4)
  assert not np.array_equal(a.perm, c.perm)
#edef

def test_sort_scores_needs_probabilities():
  with pytest.raises(ValueError):
    ops.sort_scores(structures.ScoreMatrix([[1.0, 2.0]], [0], kind=structures.LOGITS))
  #ewith
#edef

@st.composite
def probability_rows(draw, max_rows=6, max_K=8):
  K = draw(st.integers(min_value=2, max_value=max_K))
  n = draw(st.integers(min_value=1, max_value=max_rows))
  # a coarse grid of values makes ties frequent
  raw = np.array(draw(st.lists(st.lists(st.integers(min_value=1, max_value=4), min_size=K, max_size=K), min_size=n, max_size=n)), dtype=np.float64)
  labels = draw(st.lists(st.integers(min_value=0, max_value=K - 1), min_size=n, max_size=n))
  return raw / raw.sum(axis=1, keepdims=True), labels
#edef

@hsettings(max_examples=60, deadline=None)
@given(probability_rows(), st.integers(min_value=0, max_value=2**32))
def test_sort_scores_is_a_descending_bijection(rows, seed):
  probs, labels = rows
  m = structures.ScoreMatrix(probs, labels)
  ss = ops.sort_scores(m, seed=seed)
  assert np.all(np.diff(ss.sorted, axis=1) <= 0)
  for p in ss.perm:
    assert sorted(p) == list(range(m.K))
  #efor
  np.testing.assert_array_equal(ss.unsorted(), m.scores)
  np.testing.assert_array_equal(ss.perm[np.arange(m.n), ss.ranks - 1], m.labels)
#edef

###############################################################################
# split

def test_split_partitions_rows():
  spec = structures.SplitSpec(7, sizes=(2, 4, 4))
  parts = ops.split_indices(10, spec)
  assert [ len(p) for p in parts ] == [2, 4, 4]
  assert sorted(np.concatenate(parts).tolist()) == list(range(10))
  again = ops.split_indices(10, spec)
  for (a, b) in zip(parts, again):
    np.testing.assert_array_equal(a, b)
  #efor
#edef

def test_split_is_seeded():
  a = ops.split_indices(100, structures.SplitSpec(1, sizes=(0, 50, 50)))
  b = ops.split_indices(100, structures.SplitSpec(2, sizes=(0, 50, 50)))
  assert not np.array_equal(a[1], b[1])
#edef

def test_split_infeasible():
  m = structures.ScoreMatrix(np.full((10, 2), 0.5), np.zeros(10, dtype=int))
  with pytest.raises(utils.ConfigError) as err:
    ops.split(m, structures.SplitSpec(0, sizes=(5, 5, 5)))
  #ewith
  assert 'infeasible split' in str(err.value)
#edef

def test_split_fractions_and_empty_tuning():
  m = structures.ScoreMatrix(np.full((10, 2), 0.5), np.arange(10) % 2)
  tune, cal, ev = ops.split(m, structures.SplitSpec(0, fractions=(0.0, 0.5, 0.5)))
  assert tune is None
  assert (cal.n, ev.n) == (5, 5)
#edef

###############################################################################
# score files

def test_load_csv_example(tmp_path):
  path = _write(tmp_path / 'scores.csv', 'scores,K=2\n0.6,0.4,0\n0.3,0.7,1\n0.5,0.5,0\n')
  m = formats.load_scores(path)
  assert (m.n, m.K) == (3, 2)
  assert m.kind == structures.PROBABILITIES
  np.testing.assert_array_equal(m.labels, [0, 1, 0])
  np.testing.assert_array_equal(m.scores, [[0.6, 0.4], [0.3, 0.7], [0.5, 0.5]])
#edef

def test_load_csv_infers_logits(tmp_path):
  path = _write(tmp_path / 'logits.csv', 'scores,K=3\n2.5,-1,0,0\n0,0,7,2\n')
  assert formats.load_scores(path).kind == structures.LOGITS
#edef

@pytest.mark.parametrize('text, message', [
  ('scores,K=2\n0.6,0.4,2\n', 'label out of range at row 0'),
  ('scores,K=2\n0.6,0.4,0\n0.6,0.4\n', 'row-length mismatch at row 1'),
  ('scores,K=2\n0.6,abc,0\n', 'unparseable value at row 0'),
  ('K=2\n0.6,0.4,0\n', 'malformed header'),
  ('scores,K=2\n', 'empty matrix'),
])
def test_load_csv_errors(tmp_path, text, message):
  path = _write(tmp_path / 'bad.csv', text)
  with pytest.raises(utils.DataError) as err:
    formats.load_scores(path)
  #ewith
  assert message in str(err.value)
#edef

def test_load_binary_empty(tmp_path):
  path = tmp_path / 'empty.bin'
  path.write_bytes(struct.pack('<5sBQQ', b'CSET1', 1, 0, 3))
  with pytest.raises(utils.DataError) as err:
    formats.load_scores(str(path))
  #ewith
  assert 'empty matrix' in str(err.value)
#edef

def test_load_binary_truncated(tmp_path):
  path = tmp_path / 'short.bin'
  path.write_bytes(struct.pack('<5sBQQ', b'CSET1', 1, 2, 3) + b'\x00' * 8)
  with pytest.raises(utils.DataError) as err:
    formats.load_scores(str(path))
  #ewith
  assert 'row-length mismatch' in str(err.value)
#edef

def test_load_missing_file(tmp_path):
  with pytest.raises(FileNotFoundError) as err:
    formats.load_scores(str(tmp_path / 'nope.csv'))
  #ewith
  assert 'nope.csv' in str(err.value)
#edef

def test_csv_keeps_full_precision(tmp_path):
  rng = np.random.default_rng(0)
  probs = rng.dirichlet(np.ones(7), size=40)
  m = structures.ScoreMatrix(probs, rng.integers(0, 7, size=40))
  path = str(tmp_path / 'p.csv')
  formats.save_scores(m, path)
  back = formats.load_scores(path)
  np.testing.assert_allclose(back.scores, m.scores, rtol=0, atol=1e-12)
  np.testing.assert_array_equal(back.labels, m.labels)
  assert back.kind == m.kind
#edef

def test_binary_stores_float32(tmp_path):
  rng = np.random.default_rng(1)
  logits = rng.normal(size=(25, 4)).astype(np.float32).astype(np.float64)
  m = structures.ScoreMatrix(logits, rng.integers(0, 4, size=25), kind=structures.LOGITS)
  path = str(tmp_path / 'l.bin')
  formats.save_scores(m, path)
  back = formats.load_scores(path)
  np.testing.assert_array_equal(back.scores, m.scores)
  np.testing.assert_array_equal(back.labels, m.labels)
  assert back.kind == structures.LOGITS
#edef

def test_gzipped_csv(tmp_path):
  path = tmp_path / 'scores.csv.gz'
  with gzip.open(str(path), 'wt') as ofd:
    ofd.write('scores,K=2,kind=probabilities\n0.6,0.4,0\n0.3,0.7,1\n')
  #ewith
  m = formats.load_scores(str(path))
  assert (m.n, m.K) == (2, 2)
#edef

def test_gzipped_binary_is_rejected(tmp_path):
  m = structures.ScoreMatrix([[0.6, 0.4]], [0])
  with pytest.raises(utils.ConfigError):
    formats.save_scores(m, str(tmp_path / 'scores.bin.gz'), format=formats.BINARY)
  #ewith
#edef

###############################################################################
