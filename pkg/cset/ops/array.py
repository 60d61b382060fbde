from .. import utils

np = utils.py.loadExternalModule("numpy")

#################################################################

# Absorbs representation error in (n+1)(1-alpha), e.g. 5*0.6 = 3.0000000000000004
CEIL_SLACK = 1e-10

def conformal_rank(n, alpha):
    """
    The 1-based order-statistic index ceil((n+1)(1-alpha)) used by every split-conformal threshold.
    May exceed n, in which case no finite threshold achieves the corrected level.
    """
    alpha = utils.errors.check_alpha(alpha)
    return int(np.ceil((n + 1) * (1 - alpha) - CEIL_SLACK))
#edef

def kth_smallest(values, k, default=np.inf):
    """
    The k-th smallest (1-based) element of values, or default when k > len(values).
    Uses a deterministic introselect (np.partition).
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        raise ValueError("Cannot take an order statistic of an empty array")
    #fi
    if k < 1:
        raise ValueError("Order statistic index must be >= 1, got '%s'" % str(k))
    #fi
    if k > len(values):
        return default
    #fi
    return float(np.partition(values, k - 1)[k - 1])
#edef

def conformal_quantile(values, alpha, default=np.inf):
    """
    ceil((n+1)(1-alpha))-th smallest of values (default if that index exceeds n)
    """
    return kth_smallest(values, conformal_rank(len(values), alpha), default=default)
#edef

#################################################################

def positive_part(arr):
    return np.maximum(arr, 0)
#edef

def first_exceeding(matrix, threshold):
    """
    Per row, the 0-based position of the first entry exceeding the threshold, or the row length if none does.
    On a row-wise nondecreasing matrix this is the number of leading entries <= threshold.
    threshold: scalar or one value per row
    """
    matrix = np.atleast_2d(matrix)
    threshold = np.asarray(threshold, dtype=np.float64)
    if threshold.ndim == 1:
        threshold = threshold[:, None]
    #fi
    exceeds = matrix > threshold
    return np.where(exceeds.any(axis=1), exceeds.argmax(axis=1), matrix.shape[1])
#edef

#################################################################
