"""
cset command line.

  cset ingest     SCORES                 validate (and convert) a score file
  cset synth      --n --K ... --out DIR  write a synthetic problem
  cset fit-temp   SCORES                 fit a temperature on logits
  cset tune       SCORES                 choose (k_reg, lambda) for raps on a tuning split
  cset calibrate  SCORES                 calibrate a method, write the model file
  cset predict    --model M SCORES       write one prediction set per example
  cset evaluate   --model M SCORES       coverage, size, sscv and tables on labelled scores
  cset experiment SCORES                 repeated random-split trials for several methods

Settings precedence: packaged defaults < --config FILE.json < command-line flags.
Exit codes: 0 success, 2 usage or configuration error, 3 I/O error, 4 data error.
"""

from .. import utils
from .. import structures
from .. import ops
from .. import stats
from .. import conformal
from .. import tuning
from .. import evaluation
from .. import formats
from .. import synth

from ..config import settings as settings

from collections import namedtuple
import argparse
import json
import os
import sys

###############################################################################

EXIT_OK     = 0
EXIT_CONFIG = 2
EXIT_IO     = 3
EXIT_DATA   = 4

RunConfig = namedtuple('RunConfig', [ 'command', 'scores', 'model', 'out', 'format', 'kind', 'to',
                                      'spec', 'protocol', 'policy', 'methods', 'sweep', 'seed', 'synth', 'deterministic' ])

###############################################################################

def _csvFloats(text):
  try:
    return [ float(v) for v in text.split(',') if v.strip() != '' ]
  except ValueError:
    raise argparse.ArgumentTypeError("expected comma separated numbers, got '%s'" % text)
  #etry
#edef

def _csvStrings(text):
  return [ v.strip() for v in text.split(',') if v.strip() != '' ]
#edef

def _commonParser():
  common = argparse.ArgumentParser(add_help=False)
  group = common.add_argument_group('common')
  group.add_argument('--config', default=None, help='JSON settings file, merged over the packaged defaults')
  group.add_argument('--alpha', type=float, default=None, help='miscoverage level in (0,1) (default 0.1)')
  group.add_argument('--seed', type=int, default=None, help='master seed of every random draw (default 0)')
  group.add_argument('--out', default=None, help='output directory')
  group.add_argument('--format', choices=formats.FORMATS, default=None, help='score file format (default: from the extension)')
  group.add_argument('--quiet', action='store_true', default=False, help='only print errors')
  group.add_argument('--debug', action='store_true', default=False, help='print debug messages')

  group = common.add_argument_group('method')
  group.add_argument('--method', choices=conformal.METHODS, default=None, help='prediction-set method (default raps)')
  group.add_argument('--methods', type=_csvStrings, default=None, help='comma separated methods for experiment')
  group.add_argument('--lambda', dest='lam', type=float, default=None, help='raps penalty weight; fixes lambda instead of tuning it')
  group.add_argument('--k-reg', dest='k_reg', type=int, default=None, help='raps penalty-free ranks; overrides k* of the tuning split')
  group.add_argument('--deterministic', action='store_true', default=None, help='u = 1 everywhere (no randomization)')
  group.add_argument('--boundary-inclusive', dest='boundary_inclusive', action='store_true', default=None,
                     help='deterministic sets also take the first class above the threshold')

  group = common.add_argument_group('splits and trials')
  group.add_argument('--trials', type=int, default=None, help='number of random-split trials (default 100)')
  group.add_argument('--tune-size', dest='tune_size', type=int, default=None, help='tuning split size (default 1000)')
  group.add_argument('--cal-size', dest='cal_size', type=int, default=None, help='calibration split size (default 1000)')
  group.add_argument('--eval-size', dest='eval_size', type=int, default=None, help='evaluation split size (default 10000)')

  group = common.add_argument_group('temperature scaling')
  group.add_argument('--temperature', type=float, default=None, help='use this temperature instead of fitting one')
  group.add_argument('--t-lo', dest='t_lo', type=float, default=None, help='lower end of the temperature bracket (default 0.05)')
  group.add_argument('--t-hi', dest='t_hi', type=float, default=None, help='upper end of the temperature bracket (default 20)')
  group.add_argument('--t-tol', dest='t_tol', type=float, default=None, help='temperature tolerance (default 1e-4)')
  group.add_argument('--no-platt', dest='platt', action='store_false', default=None, help='do not temperature scale logits (T = 1)')
  group.add_argument('--platt-split', dest='platt_split', choices=[ 'calibration', 'tuning' ], default=None,
                     help='split the temperature is fitted on (default calibration)')

  group = common.add_argument_group('tuning')
  group.add_argument('--tune-objective', dest='tune_objective', choices=tuning.OBJECTIVES, default=None, help='lambda tuning objective (default size)')
  group.add_argument('--lambda-grid', dest='lambda_grid', type=_csvFloats, default=None, help='comma separated lambda candidates')
  group.add_argument('--strata', default=None, help='set-size strata, e.g. 0-1,2-3,4-10,11-100,101-1000')
  group.add_argument('--bins', dest='difficulty_bins', default=None, help='true-label rank bins of the difficulty table')
  group.add_argument('--no-sweep', dest='sweep', action='store_false', default=None, help='skip the (k_reg, lambda) sweep in experiment')
  return common
#edef

def _addScores(p, help):
  p.add_argument('scores', nargs='?', default=None, help=help)
  p.add_argument('--scores', dest='scores_flag', default=None, help='same as the positional score file')
#edef

def buildParser():
  common = _commonParser()
  parser = argparse.ArgumentParser(prog='cset', description='Conformal prediction sets from classifier score matrices')
  sub = parser.add_subparsers(dest='command', metavar='command')
  sub.required = True

  p = sub.add_parser('ingest', parents=[ common ], help='validate (and convert) a score file')
  _addScores(p, 'score file')
  p.add_argument('--kind', choices=structures.KINDS, default=None, help='override the score kind of the file')
  p.add_argument('--to', choices=formats.FORMATS, default=None, help='convert to this format (written to --out)')

  p = sub.add_parser('synth', parents=[ common ], help='write a synthetic problem (true and observed scores)')
  p.add_argument('--n', type=int, default=20000, help='rows')
  p.add_argument('--K', type=int, default=100, help='classes')
  p.add_argument('--concentration', type=float, default=None, help='Dirichlet concentration (default 0.05*K)')
  p.add_argument('--corruption', default='none', help='none | temperature(t) | tail_permute(top_m)')

  p = sub.add_parser('fit-temp', parents=[ common ], help='fit a temperature on logits')
  _addScores(p, 'logits file')

  p = sub.add_parser('tune', parents=[ common ], help='choose (k_reg, lambda) on a tuning split')
  _addScores(p, 'tuning score file')

  p = sub.add_parser('calibrate', parents=[ common ], help='calibrate a method and write the model file')
  _addScores(p, 'calibration score file')
  p.add_argument('--model', default=None, help='model file to write (default <out>/model.json)')

  p = sub.add_parser('predict', parents=[ common ], help='write one prediction set per example')
  _addScores(p, 'score file')
  p.add_argument('--model', required=True, help='model file')

  p = sub.add_parser('evaluate', parents=[ common ], help='evaluate a model on labelled scores')
  _addScores(p, 'evaluation score file')
  p.add_argument('--model', required=True, help='model file')

  p = sub.add_parser('experiment', parents=[ common ], help='repeated random-split trials for several methods')
  _addScores(p, 'score file')
  return parser
#edef

###############################################################################

_SETTING_FLAGS = [ 'alpha', 'seed', 'method', 'k_reg', 'trials', 'tune_size', 'cal_size', 'eval_size', 'temperature',
                   't_lo', 't_hi', 't_tol', 'platt', 'platt_split', 'tune_objective', 'strata', 'difficulty_bins',
                   'methods', 'sweep', 'boundary_inclusive' ]

def applySettings(args):
  """
  Fold the --config file and the given flags into the settings. Validation happens here, before any I/O
  on score or model files.
  Returns the set of setting keys given explicitly (in the config file or as flags).
  """
  settings.reset()
  explicit = set()
  if args.config is not None:
    utils.fs.requireFile(args.config)
    try:
      explicit.update(settings.loadSettings(args.config))
    except ValueError as e:
      raise utils.ConfigError("config file '%s' is not a valid JSON settings object: %s" % (args.config, str(e)))
    #etry
  #fi

  overrides = { key: getattr(args, key) for key in _SETTING_FLAGS if getattr(args, key, None) is not None }
  if args.lam is not None:
    overrides['lambda'] = args.lam
  #fi
  if args.deterministic:
    overrides['randomized'] = False
  #fi
  settings.setSettings(**overrides)
  explicit.update(overrides)
  if args.lambda_grid is not None:
    settings.setSettings(**{ 'lambda_grid_%s' % settings.getSetting('tune_objective'): args.lambda_grid })
  #fi

  if args.quiet:
    settings.quiet()
  #fi
  if args.debug:
    settings.setDebugState(True)
  #fi

  utils.errors.check_alpha(settings.getAlpha())
  evaluation.parse_strata(settings.getSetting('strata'))
  evaluation.parse_strata(settings.getSetting('difficulty_bins'))
  if settings.getSetting('tune_objective') not in tuning.OBJECTIVES:
    raise utils.ConfigError("Unknown tuning objective '%s'" % settings.getSetting('tune_objective'))
  #fi
  for key in [ 'trials', 'cal_size', 'eval_size' ]:
    if settings.getSetting(key) < 1:
      raise utils.ConfigError("%s must be at least 1, got '%s'" % (key, settings.getSetting(key)))
    #fi
  #efor
  if settings.getSetting('tune_size') < 0:
    raise utils.ConfigError("tune_size must be nonnegative")
  #fi
  return explicit
#edef

def buildConfig(args):
  """RunConfig from the parsed arguments and the (already updated) settings"""
  explicit = applySettings(args)

  randomized = settings.getSetting('randomized')
  method = settings.getSetting('method')
  spec = conformal.MethodSpec(method, settings.getAlpha(), lam=settings.getSetting('lambda'), k_reg=settings.getSetting('k_reg'),
                              randomized=randomized, boundary_inclusive=settings.getSetting('boundary_inclusive'))

  protocol = evaluation.protocol_from_settings()
  # an explicit lambda (flag or config file) fixes it, otherwise a tuning split chooses it and k_reg
  tuned = protocol.tune_size > 0 and 'lambda' not in explicit
  k_reg = settings.getSetting('k_reg') if ('k_reg' in explicit or not tuned) else None
  policy = evaluation.policy_from_settings(lam=None if tuned else settings.getSetting('lambda'), k_reg=k_reg)

  synthSpec = None
  if args.command == 'synth':
    corruption, param = synth.parse_corruption(args.corruption)
    synthSpec = synth.SynthSpec(args.n, args.K, concentration=args.concentration, corruption=corruption,
                                param=param, seed=settings.getSeed())
  #fi

  scores = getattr(args, 'scores', None) or getattr(args, 'scores_flag', None)
  if scores is None and args.command != 'synth':
    raise utils.ConfigError("%s needs a score file" % args.command)
  #fi
  model  = getattr(args, 'model', None)
  if scores is not None:
    utils.fs.requireFile(scores)
  #fi
  if model is not None and args.command in [ 'predict', 'evaluate' ]:
    utils.fs.requireFile(model)
  #fi

  return RunConfig(command=args.command, scores=scores, model=model, out=args.out, format=args.format,
                   kind=getattr(args, 'kind', None), to=getattr(args, 'to', None),
                   spec=spec, protocol=protocol, policy=policy, methods=settings.getSetting('methods'),
                   sweep=settings.getSetting('sweep'), seed=settings.getSeed(), synth=synthSpec,
                   deterministic=bool(args.deterministic))
#edef

###############################################################################

def _write(line):
  sys.stdout.write(line + '\n')
#edef

def _outdir(config, default='.'):
  out = config.out if config.out is not None else default
  utils.fs.mkdirp(out)
  return out
#edef

def _echoConfig(outdir):
  with open(os.path.join(outdir, 'config.json'), 'w') as ofd:
    ofd.write(settings.dumps())
    ofd.write('\n')
  #ewith
#edef

def _toProbabilities(m, config, temperature=None):
  """
  Logits are scaled by the given temperature, else --temperature, else a temperature fitted on m itself
  (or 1 with --no-platt). Returns (probabilities, temperature or None).
  """
  if m.kind == structures.PROBABILITIES:
    return m, None
  #fi
  if temperature is None:
    temperature = config.protocol.temperature
  #fi
  if temperature is None:
    temperature = stats.fit_temperature(m, bounds=config.protocol.t_bounds, tol=config.protocol.t_tol).temperature if config.protocol.platt else 1.0
  #fi
  return ops.softmax(m, temperature), temperature
#edef

###############################################################################

def cmd_ingest(config):
  m = formats.load_scores(config.scores, format=config.format, kind=config.kind)
  _write("n=%d K=%d kind=%s" % (m.n, m.K, m.kind))
  _write("top1=%.6f top5=%.6f" % (m.top_k_accuracy(1), m.top_k_accuracy(5)))
  if config.to is not None:
    outdir = _outdir(config)
    stem = os.path.splitext(os.path.basename(config.scores[:-3] if utils.fs.isGzipped(config.scores) else config.scores))[0]
    target = os.path.join(outdir, '%s.%s' % (stem, 'csv' if config.to == formats.CSV else 'bin'))
    formats.save_scores(m, target, format=config.to)
    _write("wrote %s" % target)
  #fi
  return EXIT_OK
#edef

def cmd_synth(config):
  outdir = _outdir(config)
  spec = config.synth
  true, observed = synth.generate(spec)
  fmt = config.format or formats.BINARY
  ext = 'csv' if fmt == formats.CSV else 'bin'
  formats.save_scores(true, os.path.join(outdir, 'true.%s' % ext), format=fmt)
  formats.save_scores(observed, os.path.join(outdir, 'observed.%s' % ext), format=fmt)
  with open(os.path.join(outdir, 'manifest.json'), 'w') as ofd:
    json.dump(dict(spec._asdict(), corruption_string=spec.corruption_string, format=fmt), ofd, indent=2, sort_keys=True)
    ofd.write('\n')
  #ewith
  _echoConfig(outdir)
  _write("wrote %s (n=%d K=%d corruption=%s)" % (outdir, spec.n, spec.K, spec.corruption_string))
  return EXIT_OK
#edef

def cmd_fit_temp(config):
  m = formats.load_scores(config.scores, format=config.format)
  if m.kind != structures.LOGITS:
    raise utils.DataError("fit-temp needs logits, '%s' holds %s" % (config.scores, m.kind))
  #fi
  fit = stats.fit_temperature(m, bounds=config.protocol.t_bounds, tol=config.protocol.t_tol)
  _write("temperature=%.6f nll_before=%.6f nll_after=%.6f iterations=%d" % (fit.temperature, fit.nll_before, fit.nll_after, fit.iterations))
  if config.out is not None:
    outdir = _outdir(config)
    with open(os.path.join(outdir, 'temperature.json'), 'w') as ofd:
      json.dump(fit._asdict(), ofd, indent=2)
      ofd.write('\n')
    #ewith
    _echoConfig(outdir)
  #fi
  return EXIT_OK
#edef

def cmd_tune(config):
  m, _ = _toProbabilities(formats.load_scores(config.scores, format=config.format), config)
  ss = ops.sort_scores(m, config.seed, key=utils.rng.SPLIT_TUNE)
  policy = config.policy
  result = tuning.tune(ss, policy.alpha, objective=policy.objective, grid=policy.grid, strata=policy.strata,
                       seed=config.seed, randomized=policy.randomized, k_reg=policy.k_reg)
  _write("k_star=%d k_reg=%d lambda=%g objective=%s" % (result.k_star, result.k_reg, result.lam, result.objective))
  if config.out is not None:
    outdir = _outdir(config)
    with open(os.path.join(outdir, 'tune.json'), 'w') as ofd:
      json.dump(result._asdict(), ofd, indent=2)
      ofd.write('\n')
    #ewith
    _echoConfig(outdir)
  #fi
  return EXIT_OK
#edef

def cmd_calibrate(config):
  """Writes the model file and prints: method, tau_hat, n_cal"""
  m, temperature = _toProbabilities(formats.load_scores(config.scores, format=config.format), config)
  ss = ops.sort_scores(m, config.seed, key=utils.rng.SPLIT_CAL)
  model = tuning.fit_model(ss, config.spec, seed=config.seed)._replace(temperature=temperature)

  if config.model is not None:
    target = config.model
  else:
    target = os.path.join(_outdir(config), 'model.json')
  #fi
  formats.save_model(model, target)
  if config.out is not None:
    _echoConfig(_outdir(config))
  #fi
  _write("method=%s tau_hat=%r n_cal=%d" % (model.spec.method, model.tau_hat, model.n_cal))
  return EXIT_OK
#edef

def _loadModel(config):
  model = formats.load_model(config.model)
  if config.deterministic and model.spec.randomized:
    utils.msg.dbm("--deterministic: predicting with u = 1 instead of the randomized sets of '%s'" % config.model)
    model = model._replace(spec=model.spec.with_(randomized=False))
  #fi
  return model
#edef

def _loadForModel(config, model):
  m, _ = _toProbabilities(formats.load_scores(config.scores, format=config.format), config,
                          temperature=model.temperature if model.temperature is not None else None)
  if model.K is not None and model.K != m.K:
    raise utils.DataError("K mismatch: model '%s' was calibrated on %d classes, '%s' has %d" % (config.model, model.K, config.scores, m.K))
  #fi
  # tie order comes from the model seed, so deterministic output does not depend on --seed
  return ops.sort_scores(m, model.seed, key=utils.rng.SPLIT_EVAL)
#edef

def cmd_predict(config):
  """One line per example: index, set size, comma separated classes in rank order"""
  model = _loadModel(config)
  ss = _loadForModel(config, model)
  sets = conformal.predict_batch(model, ss)

  outdir = _outdir(config)
  target = os.path.join(outdir, 'predictions.txt')
  with open(target, 'w') as ofd:
    for (i, s) in enumerate(sets):
      ofd.write('%d\t%d\t%s\n' % (i, len(s.classes), ','.join(str(c) for c in s.classes)))
    #efor
  #ewith
  _write("wrote %d prediction sets to %s" % (len(sets), target))
  return EXIT_OK
#edef

def cmd_evaluate(config):
  model = _loadModel(config)
  ss = _loadForModel(config, model)
  report = evaluation.evaluate(model, ss, config.policy.strata, config.policy.bins)
  outdir = _outdir(config)
  formats.tableUtils.writeReport(outdir, report)
  _echoConfig(outdir)
  _write("method=%s coverage=%.6f size=%.6f sscv=%.6f n=%d" % (report.method, report.coverage, report.avg_size, report.sscv, report.n))
  return EXIT_OK
#edef

def cmd_experiment(config):
  m = formats.load_scores(config.scores, format=config.format)
  aggregates = evaluation.run_trials(m, config.protocol, config.policy, methods=config.methods)
  sweep = evaluation.run_sweep(m, config.protocol, config.policy) if config.sweep else None

  outdir = _outdir(config)
  formats.tableUtils.writeExperiment(outdir, aggregates, sweep=sweep, name=os.path.basename(config.scores))
  _echoConfig(outdir)
  for (method, agg) in aggregates.items():
    mom = agg.median_of_means
    _write("%s coverage=%.6f size=%.6f sscv=%.6f" % (method, mom['coverage'], mom['size'], mom['sscv']))
  #efor
  return EXIT_OK
#edef

COMMANDS = { 'ingest': cmd_ingest, 'synth': cmd_synth, 'fit-temp': cmd_fit_temp, 'tune': cmd_tune,
             'calibrate': cmd_calibrate, 'predict': cmd_predict, 'evaluate': cmd_evaluate, 'experiment': cmd_experiment }

###############################################################################

def main(argv=None):
  parser = buildParser()
  args = parser.parse_args(argv)
  try:
    config = buildConfig(args)
    return COMMANDS[config.command](config)
  except utils.ConfigError as e:
    utils.msg.error(str(e))
    return EXIT_CONFIG
  except utils.DataError as e:
    utils.msg.error(str(e))
    return EXIT_DATA
  except (FileNotFoundError, PermissionError, IsADirectoryError) as e:
    utils.msg.error(str(e))
    return EXIT_IO
  except OSError as e:
    utils.msg.error("%s: '%s'" % (e.strerror or str(e), e.filename))
    return EXIT_IO
  except ValueError as e:
    utils.msg.error(str(e))
    return EXIT_DATA
  #etry
#edef

###############################################################################
