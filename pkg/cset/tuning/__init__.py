from .fixedK import fixed_k_star, mix_probability, make_fixed_k_model, fit_model
from .lambdaTuning import TuneResult, tune_for_size, tune_for_adaptiveness, tune, nested_split
from .lambdaTuning import SIZE, ADAPTIVENESS, OBJECTIVES
