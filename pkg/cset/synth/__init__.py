from .generator import SynthSpec, generate, generate_mixture, generate_plateau, parse_corruption, corrupt
from .generator import NONE, TEMPERATURE, TAIL_PERMUTE, CORRUPTIONS
from .oracle import OracleCoverage, oracle_coverage, set_mass
