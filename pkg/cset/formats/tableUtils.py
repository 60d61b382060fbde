"""
Report tables, built as pandas DataFrames and written both as aligned text and as CSV.
All floats are written with a fixed format, so identical results give byte-identical files.
"""

from .. import utils
from ..evaluation import strata as strataUtils

import os

pd = utils.py.loadExternalModule('pandas')
np = utils.py.loadExternalModule('numpy')

###############################################################################

FLOAT_FORMAT = '%.6f'

METHOD_NAMES = { 'naive': 'Naive', 'aps': 'APS', 'raps': 'RAPS', 'lac': 'LAC', 'fixed_k': 'Top K' }

def methodName(method):
  return METHOD_NAMES.get(method, method)
#edef

###############################################################################

def results_table(aggregates, name='scores'):
  """
  One row per score matrix: Top-1, Top-5 accuracy, then Coverage and Size per method
  (median-of-means over trials).
  """
  first = next(iter(aggregates.values()))
  mom = first.median_of_means
  columns = [ ('Accuracy', 'Top-1'), ('Accuracy', 'Top-5') ]
  values  = [ mom['top1'], mom['top5'] ]
  for (method, agg) in aggregates.items():
    mom = agg.median_of_means
    columns += [ ('Coverage', methodName(method)) ]
    values  += [ mom['coverage'] ]
  #efor
  for (method, agg) in aggregates.items():
    columns += [ ('Size', methodName(method)) ]
    values  += [ agg.median_of_means['size'] ]
  #efor
  return pd.DataFrame([ values ], index=pd.Index([ name ], name='Model'), columns=pd.MultiIndex.from_tuples(columns))
#edef

def trials_table(aggregates):
  """Every per-trial metric of every method, long format"""
  frames = []
  for (method, agg) in aggregates.items():
    frame = agg.trials.copy()
    frame.insert(0, 'method', method)
    frames.append(frame)
  #efor
  return pd.concat(frames, ignore_index=True)
#edef

def stratified_table(aggregates):
  """Set-size strata as rows, (method, cnt/cvg) as columns. Empty strata have a blank coverage."""
  first = next(iter(aggregates.values()))
  index = pd.Index([ strataUtils.stratum_name(s) for s in first.strata ], name='size')
  data = {}
  for (method, agg) in aggregates.items():
    data[(methodName(method), 'cnt')] = [ r.count for r in agg.per_stratum ]
    data[(methodName(method), 'cvg')] = [ r.coverage for r in agg.per_stratum ]
  #efor
  return pd.DataFrame(data, index=index)
#edef

def difficulty_table(aggregates):
  """True-label rank bins as rows, (method, cnt/cvg/sz) as columns"""
  first = next(iter(aggregates.values()))
  index = pd.Index([ strataUtils.stratum_name(b) for b in first.bins ], name='difficulty')
  data = {}
  for (method, agg) in aggregates.items():
    data[(methodName(method), 'cnt')] = [ r.count for r in agg.per_difficulty ]
    data[(methodName(method), 'cvg')] = [ r.coverage for r in agg.per_difficulty ]
    data[(methodName(method), 'sz')]  = [ r.avg_size for r in agg.per_difficulty ]
  #efor
  return pd.DataFrame(data, index=index)
#edef

def histogram_table(histogram):
  return pd.DataFrame({ 'size': list(histogram.keys()), 'count': list(histogram.values()) })
#edef

def report_table(report):
  """The summary of a single EvalReport"""
  return pd.DataFrame([ [ report.n, report.coverage, report.avg_size, report.sscv ] ],
                      index=pd.Index([ methodName(report.method) ], name='method'),
                      columns=[ 'n', 'coverage', 'size', 'sscv' ])
#edef

def report_strata_table(report):
  return pd.DataFrame({ 'cnt': [ r.count for r in report.per_stratum ], 'cvg': [ r.coverage for r in report.per_stratum ] },
                      index=pd.Index([ strataUtils.stratum_name(r.stratum) for r in report.per_stratum ], name='size'))
#edef

def report_difficulty_table(report):
  return pd.DataFrame({ 'cnt': [ r.count for r in report.per_difficulty ],
                        'cvg': [ r.coverage for r in report.per_difficulty ],
                        'sz':  [ r.avg_size for r in report.per_difficulty ] },
                      index=pd.Index([ strataUtils.stratum_name(r.bin) for r in report.per_difficulty ], name='difficulty'))
#edef

###############################################################################

def writeTable(table, outdir, stem, text=True, index=True):
  """
  Write <outdir>/<stem>.csv and (optionally) <outdir>/<stem>.txt
  """
  utils.fs.mkdirp(outdir)
  csvFile = os.path.join(outdir, '%s.csv' % stem)
  table.to_csv(csvFile, float_format=FLOAT_FORMAT, index=index, na_rep='')
  written = [ csvFile ]
  if text:
    txtFile = os.path.join(outdir, '%s.txt' % stem)
    with open(txtFile, 'w') as ofd:
      ofd.write(table.to_string(float_format=lambda v: FLOAT_FORMAT % v, na_rep='', index=index))
      ofd.write('\n')
    #ewith
    written.append(txtFile)
  #fi
  utils.msg.dbm("Wrote %s" % ', '.join(written))
  return written
#edef

def writeExperiment(outdir, aggregates, sweep=None, name='scores'):
  """
  All experiment outputs:
    results.{txt,csv}, trials.csv, stratified.{txt,csv}, difficulty.{txt,csv},
    histogram_<method>.csv and (when given) sweep.{txt,csv}
  """
  written = []
  written += writeTable(results_table(aggregates, name=name), outdir, 'results')
  written += writeTable(trials_table(aggregates), outdir, 'trials', text=False, index=False)
  written += writeTable(stratified_table(aggregates), outdir, 'stratified')
  written += writeTable(difficulty_table(aggregates), outdir, 'difficulty')
  for (method, agg) in aggregates.items():
    written += writeTable(histogram_table(agg.histogram), outdir, 'histogram_%s' % method, text=False, index=False)
  #efor
  if sweep is not None:
    written += writeTable(sweep, outdir, 'sweep')
  #fi
  return written
#edef

def writeReport(outdir, report):
  """Outputs of a single evaluation: report, stratified, difficulty tables and the size histogram"""
  written = []
  written += writeTable(report_table(report), outdir, 'report')
  written += writeTable(report_strata_table(report), outdir, 'stratified')
  written += writeTable(report_difficulty_table(report), outdir, 'difficulty')
  written += writeTable(histogram_table(report.size_hist), outdir, 'histogram_%s' % report.method, text=False, index=False)
  return written
#edef

###############################################################################
