from . import array as array
from . import matrix as matrix

from .matrix import softmax, sort_scores, split, split_indices, true_label_ranks
