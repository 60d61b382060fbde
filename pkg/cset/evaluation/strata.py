from .. import utils

np = utils.py.loadExternalModule('numpy')

###############################################################################

def parse_strata(strata):
  """
  Inclusive integer ranges, as a string "0-1,2-3,4-10" (a single value "5" means 5-5)
  or an iterable of (lo, hi) pairs.
  Outputs: sorted list of (lo, hi) tuples. Ranges must be disjoint.
  """
  if isinstance(strata, str):
    pairs = []
    for field in [ f.strip() for f in strata.split(',') if f.strip() != '' ]:
      parts = field.split('-')
      try:
        if len(parts) == 1:
          lo = hi = int(parts[0])
        elif len(parts) == 2:
          lo, hi = int(parts[0]), int(parts[1])
        else:
          raise ValueError(field)
        #fi
      except ValueError:
        raise utils.ConfigError("Cannot parse stratum '%s' (expected lo-hi)" % field)
      #etry
      pairs.append((lo, hi))
    #efor
  else:
    pairs = [ (int(lo), int(hi)) for (lo, hi) in strata ]
  #fi

  if len(pairs) == 0:
    raise utils.ConfigError("No strata given")
  #fi
  pairs = sorted(pairs)
  for (lo, hi) in pairs:
    if lo < 0 or hi < lo:
      raise utils.ConfigError("Invalid stratum %d-%d" % (lo, hi))
    #fi
  #efor
  for (a, b) in zip(pairs[:-1], pairs[1:]):
    if b[0] <= a[1]:
      raise utils.ConfigError("Strata %d-%d and %d-%d overlap" % (a + b))
    #fi
  #efor
  return pairs
#edef

###############################################################################

def stratum_name(stratum):
  lo, hi = stratum
  return ('%d' % lo) if lo == hi else ('%d to %d' % (lo, hi))
#edef

def assign(values, strata):
  """
  Index of the stratum holding each value.
  A value of 0 below the first stratum joins the first stratum when that stratum starts at 1
  (empty sets belong with size-1 sets). Any other value outside every stratum is an error.
  """
  values = np.asarray(values, dtype=np.int64)
  lows  = np.array([ lo for (lo, hi) in strata ])
  highs = np.array([ hi for (lo, hi) in strata ])
  if lows[0] == 1:
    lows = lows.copy()
    lows[0] = 0
  #fi
  idx = np.searchsorted(lows, values, side='right') - 1
  valid = (idx >= 0) & (values <= highs[np.maximum(idx, 0)])
  if not valid.all():
    raise ValueError("size %d falls in no stratum of %s" % (values[~valid][0], ', '.join(stratum_name(s) for s in strata)))
  #fi
  return idx
#edef

###############################################################################
