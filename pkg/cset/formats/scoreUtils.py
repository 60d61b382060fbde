"""
Score matrix files.

CSV:    header `scores,K=<K>[,kind=<logits|probabilities>]`, then one line per example:
        K comma separated scores followed by the integer label.
Binary: `CSET1`, u8 kind (0=logits, 1=probabilities), u64 n, u64 K, n*K <f4 scores (row-major), n <u4 labels.
        All little-endian.
"""

from .. import utils
from .. import structures

import re
import struct

np = utils.py.loadExternalModule('numpy')

###############################################################################

CSV    = 'csv'
BINARY = 'binary'
FORMATS = [ CSV, BINARY ]

MAGIC = b'CSET1'
_BINARY_HEADER = struct.Struct('<5sBQQ')
_KIND_FLAGS = { structures.LOGITS: 0, structures.PROBABILITIES: 1 }

_HEADER_RE = re.compile(r'^scores,K=(\d+)(?:,kind=(logits|probabilities))?$')

###############################################################################

def guessFormat(fileName):
  name = str(fileName)
  name = name[:-3] if utils.fs.isGzipped(name) else name
  return CSV if name.lower().endswith('.csv') else BINARY
#edef

def _checkFormat(fileName, format):
  format = guessFormat(fileName) if format is None else format
  if format not in FORMATS:
    raise utils.ConfigError("Unknown score format '%s'. Choose from %s" % (format, ', '.join(FORMATS)))
  #fi
  if format == BINARY and utils.fs.isGzipped(fileName):
    raise utils.ConfigError("Gzip compression is only supported for csv score files, not '%s'" % fileName)
  #fi
  return format
#edef

###############################################################################

def inferKind(scores):
  """probabilities iff every entry is in [0,1] and every row sums to 1 within 1e-3"""
  if np.all((scores >= 0) & (scores <= 1)) and np.all(np.abs(scores.sum(axis=1) - 1) <= structures.scoreMatrix.RENORM_TOLERANCE):
    return structures.PROBABILITIES
  #fi
  return structures.LOGITS
#edef

###############################################################################

def _readCSV(fileName):
  with utils.fs.gzopen(fileName, 'r') as ifd:
    header = ifd.readline().strip()
    match = _HEADER_RE.match(header.replace(' ', ''))
    if match is None:
      raise utils.DataError("malformed header in '%s': expected 'scores,K=<K>', got '%s'" % (fileName, header))
    #fi
    K = int(match.group(1))
    kind = match.group(2)

    scores = []
    labels = []
    for lineno, line in enumerate(ifd):
      line = line.strip()
      if line == '':
        continue
      #fi
      row = len(scores)
      fields = line.split(',')
      if len(fields) != K + 1:
        raise utils.DataError("row-length mismatch at row %d: expected %d scores and a label, got %d fields" % (row, K, len(fields)))
      #fi
      try:
        values = [ float(f) for f in fields[:K] ]
        label  = int(fields[K])
      except ValueError:
        raise utils.DataError("unparseable value at row %d: '%s'" % (row, line))
      #etry
      scores.append(values)
      labels.append(label)
    #efor
  #ewith

  if len(scores) == 0:
    raise utils.DataError("empty matrix")
  #fi
  scores = np.array(scores, dtype=np.float64)
  labels = np.array(labels, dtype=np.int64)
  return scores, labels, kind
#edef

def _readBinary(fileName):
  with open(fileName, 'rb') as ifd:
    data = ifd.read()
  #ewith
  if len(data) < _BINARY_HEADER.size:
    raise utils.DataError("malformed header in '%s': file too short" % fileName)
  #fi
  magic, flag, n, K = _BINARY_HEADER.unpack_from(data, 0)
  if magic != MAGIC:
    raise utils.DataError("malformed header in '%s': bad magic bytes" % fileName)
  #fi
  kinds = { v: k for (k, v) in _KIND_FLAGS.items() }
  if flag not in kinds:
    raise utils.DataError("malformed header in '%s': unknown kind flag %d" % (fileName, flag))
  #fi
  if n == 0:
    raise utils.DataError("empty matrix")
  #fi
  expected = _BINARY_HEADER.size + 4 * n * K + 4 * n
  if len(data) != expected:
    raise utils.DataError("row-length mismatch in '%s': header declares %d x %d, expected %d bytes, file has %d" % (fileName, n, K, expected, len(data)))
  #fi
  offset = _BINARY_HEADER.size
  scores = np.frombuffer(data, dtype='<f4', count=n * K, offset=offset).reshape(n, K)
  labels = np.frombuffer(data, dtype='<u4', count=n, offset=offset + 4 * n * K)
  return scores.astype(np.float64), labels.astype(np.int64), kinds[flag]
#edef

###############################################################################

def load_scores(fileName, format=None, kind=None):
  """
  Load and validate a score matrix.
  Inputs:
    fileName: path (csv paths may end in .gz)
    format: 'csv' | 'binary' | None (guessed from the extension)
    kind: force the score kind, overriding the file
  Outputs:
    ScoreMatrix
  """
  utils.fs.requireFile(fileName)
  format = _checkFormat(fileName, format)
  utils.msg.dbm("Loading %s scores from '%s'" % (format, fileName))

  if format == CSV:
    scores, labels, fileKind = _readCSV(fileName)
  else:
    scores, labels, fileKind = _readBinary(fileName)
  #fi

  kind = kind or fileKind or inferKind(scores)
  return structures.ScoreMatrix(scores, labels, kind=kind, name=str(fileName))
#edef

###############################################################################

def save_scores(m, fileName, format=None):
  """
  Write a ScoreMatrix. CSV keeps 17 significant digits, binary stores 32-bit floats.
  """
  format = _checkFormat(fileName, format)
  utils.fs.mkdirname(fileName)
  utils.msg.dbm("Writing %s scores (%d x %d) to '%s'" % (format, m.n, m.K, fileName))

  if format == CSV:
    with utils.fs.gzopen(fileName, 'w') as ofd:
      ofd.write('scores,K=%d,kind=%s\n' % (m.K, m.kind))
      table = np.column_stack([ m.scores, m.labels ])
      np.savetxt(ofd, table, fmt=['%.17g'] * m.K + ['%d'], delimiter=',')
    #ewith
  else:
    with open(fileName, 'wb') as ofd:
      ofd.write(_BINARY_HEADER.pack(MAGIC, _KIND_FLAGS[m.kind], m.n, m.K))
      ofd.write(np.ascontiguousarray(m.scores, dtype='<f4').tobytes())
      ofd.write(np.ascontiguousarray(m.labels, dtype='<u4').tobytes())
    #ewith
  #fi
  return fileName
#edef

###############################################################################
