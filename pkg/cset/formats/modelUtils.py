"""
Calibrated model files: a small JSON document.

  method, alpha, lambda, k_reg, randomized, boundary_inclusive, tau_hat, n_cal, seed, K, k_star, mix_prob, temperature

tau_hat is written as the string "inf" when infinite. Floats are written with repr precision, so a
save/load round trip reproduces every field exactly.
"""

from .. import utils
from .. import conformal

import json

###############################################################################

FIELDS = [ 'method', 'alpha', 'lambda', 'k_reg', 'randomized', 'boundary_inclusive', 'tau_hat', 'n_cal', 'seed', 'K', 'k_star', 'mix_prob', 'temperature' ]

###############################################################################

def model_to_dict(model):
  spec = model.spec
  tau = 'inf' if model.tau_hat == float('inf') else model.tau_hat
  return { 'method': spec.method, 'alpha': spec.alpha, 'lambda': spec.lam, 'k_reg': spec.k_reg,
           'randomized': spec.randomized, 'boundary_inclusive': spec.boundary_inclusive,
           'tau_hat': tau, 'n_cal': model.n_cal, 'seed': model.seed, 'K': model.K,
           'k_star': model.k_star, 'mix_prob': model.mix_prob,
           'temperature': model.temperature }
#edef

def model_from_dict(d, source='<model>'):
  missing = [ f for f in [ 'method', 'alpha', 'tau_hat', 'n_cal' ] if f not in d ]
  if len(missing) > 0:
    raise utils.DataError("model file '%s' lacks fields: %s" % (source, ', '.join(missing)))
  #fi
  unknown = sorted(set(d) - set(FIELDS))
  if len(unknown) > 0:
    utils.msg.warning("Ignoring unknown fields in model file '%s': %s" % (source, ', '.join(unknown)))
  #fi
  tau = d['tau_hat']
  if isinstance(tau, str):
    if tau != 'inf':
      raise utils.DataError("model file '%s': tau_hat must be a number or 'inf', got '%s'" % (source, tau))
    #fi
    tau = float('inf')
  #fi
  try:
    spec = conformal.MethodSpec(d['method'], d['alpha'], lam=d.get('lambda', 0.0), k_reg=d.get('k_reg', 1),
                                randomized=d.get('randomized', True), boundary_inclusive=d.get('boundary_inclusive', False))
  except utils.ConfigError as e:
    raise utils.DataError("model file '%s': %s" % (source, str(e)))
  #etry
  return conformal.ConformalModel(spec, tau, d['n_cal'], seed=d.get('seed', 0), K=d.get('K'),
                                  k_star=d.get('k_star'), mix_prob=d.get('mix_prob'),
                                  temperature=d.get('temperature'))
#edef

###############################################################################

def save_model(model, fileName):
  utils.fs.mkdirname(fileName)
  with open(fileName, 'w') as ofd:
    json.dump(model_to_dict(model), ofd, indent=2)
    ofd.write('\n')
  #ewith
  utils.msg.dbm("Wrote model to '%s'" % fileName)
  return fileName
#edef

def load_model(fileName):
  utils.fs.requireFile(fileName)
  with open(fileName, 'r') as ifd:
    try:
      d = json.load(ifd)
    except ValueError as e:
      raise utils.DataError("model file '%s' is not valid JSON: %s" % (fileName, str(e)))
    #etry
  #ewith
  return model_from_dict(d, source=fileName)
#edef

###############################################################################
