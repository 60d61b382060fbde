from .. import utils

np = utils.py.loadExternalModule('numpy')

#################################################################################

def binomial_se(p, n):
    """
    Standard error of a proportion p estimated from n Bernoulli draws
    """
    if n <= 0:
        return np.nan
    #fi
    return float(np.sqrt(p * (1 - p) / n))
#edef

#################################################################################

def mean_se(values):
    """
    (mean, standard error of the mean) of a 1-D sample. SE is 0 for a single value.
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        raise ValueError("Cannot summarize an empty sample")
    #fi
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, 0.0
    #fi
    return mean, float(np.std(values, ddof=1) / np.sqrt(len(values)))
#edef

#################################################################################

def median_of_means(per_trial_means):
    """
    Median over trials of per-trial means. Input order does not matter.
    """
    values = np.sort(np.asarray(per_trial_means, dtype=np.float64))
    if len(values) == 0:
        raise ValueError("Cannot aggregate zero trials")
    #fi
    return float(np.median(values))
#edef

#################################################################################
