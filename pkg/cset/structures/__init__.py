from .scoreMatrix import ScoreMatrix, SortedScores, SortedRow, SplitSpec
from .scoreMatrix import LOGITS, PROBABILITIES, KINDS
