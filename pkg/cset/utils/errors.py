"""
Exception types raised by cset.

Both derive from ValueError, so callers that only care about "bad input" can keep catching ValueError.
The command line maps them onto distinct exit codes.
"""

class DataError(ValueError):
  """The contents of a score matrix, label vector or model file are invalid"""
  pass
#eclass

class ConfigError(ValueError):
  """A parameter or configuration value is outside its allowed range"""
  pass
#eclass

###############################################################################

def check_alpha(alpha):
  if not (0 < alpha < 1):
    raise ConfigError("alpha must be in (0,1), got '%s'" % str(alpha))
  #fi
  return float(alpha)
#edef
