## File system utilities

import os
import gzip
import pathlib

from . import msgUtils as msg

###############################################################################

def mkdirname(fileName):
  dirname = os.path.dirname(fileName)
  if dirname == '':
    return 0
  #fi
  return mkdirp(dirname)
#edef

###############################################################################

def mkdirp(directory):
  pathlib.Path(directory).mkdir(parents=True, exist_ok=True)
  return 0
#edef

###############################################################################

def isGzipped(fileName):
  return str(fileName)[-3:] == ".gz"
#edef

###############################################################################

def gzopen(fileName, mode="r", gzmode='t', **kwargs):
  """
  Open a file, transparently (de)compressing it when the name ends in .gz
  mode: 'r' | 'w', gzmode: 't' (text) | 'b' (binary)
  """
  if isGzipped(fileName):
    return gzip.open(fileName, mode + gzmode, **kwargs)
  else:
    return open(fileName, mode + ('b' if gzmode == 'b' else ''), **kwargs)
  #fi
#edef

###############################################################################

def requireFile(fileName):
  """Raise FileNotFoundError naming the path if it does not exist"""
  if not os.path.isfile(fileName):
    msg.dbm("Missing input file '%s'" % fileName)
    raise FileNotFoundError("No such file: '%s'" % fileName)
  #fi
  return fileName
#edef

###############################################################################
