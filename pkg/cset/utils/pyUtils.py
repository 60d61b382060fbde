import importlib

from . import msgUtils as msg
from ..config import settings

###############################################################################

class AbsentModule(object):
  """
  Stand-in for a module that could not be imported.
  Any attribute access, indexing or call raises an ImportError naming the missing module.
  """
  def __init__(self, module, exception):
    self.__module = module
    self.__exception = exception
  #edef

  def __re__(self, *pargs, **kwargs):
    msg.error("For this functionality, you need to install '%s'" % self.__module)
    raise ImportError("cset needs '%s' for this functionality" % self.__module) from self.__exception
  #edef

  def __bool__(self):
    return False
  #edef

  __getattr__ = __re__
  __getitem__ = __re__
  __call__    = __re__
#eclass

###############################################################################

def loadExternalModule(module, attr=None):
    """
    Load a python module. If the module does not exist, an AbsentModule is returned instead,
    which raises an error only when the module is actually used. cset therefore still imports
    with a dependency missing, and the missing dependency is registered in the settings.
    Inputs:
    module : String. Name of the module to import
    attr: String. name of the attribute in the module to import (default None)

    Output:
    Imported Module

    This translates into the usual import utility:

    from modx import a as x  -> x = loadExternalModule('modx', 'a')
    import mody as mody      -> mody = loadExternalModule('mody')
    """

    lmod = None
    try:
        lmod = importlib.import_module(module)
        if attr is not None:
            lmod = getattr(lmod, attr)
        #fi
    except (ImportError, AttributeError) as e:
        settings.registerMissingDependency(module)
        lmod = AbsentModule(module if attr is None else '%s.%s' % (module, attr), e)
    #etry

    return lmod
#edef

###############################################################################
