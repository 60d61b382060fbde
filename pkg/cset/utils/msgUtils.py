import sys

from ..config import settings as settings

###############################################################################

def _emit(prefix, message, stream):
  for line in str(message).split('\n'):
    stream.write('%s: %s\n' % (prefix, line))
  #efor
  stream.flush()
#edef

###############################################################################

def dbm(message):
  if settings.getDebugState():
    _emit('D', message, sys.stdout if settings.getDebugStream() == 'stdout' else sys.stderr)
  #fi
#edef

###############################################################################

def error(message):
  if settings.getErrorState():
    _emit('E', message, sys.stderr)
  #fi
#edef

###############################################################################

def warning(message):
  if settings.getWarningState():
    _emit('W', message, sys.stderr)
  #fi
#edef

###############################################################################

def progress(i, n, what="trial"):
  """
  Per-trial counter. Overwrites itself on a terminal, ends the line after the last item.
  """
  if settings.getProgressState():
    sys.stderr.write('\rP: %s %d/%d' % (what, i, n))
    if i >= n:
      sys.stderr.write('\n')
    #fi
    sys.stderr.flush()
  #fi
#edef

###############################################################################
