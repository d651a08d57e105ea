"""Error-exponent and ensemble-simulation toolkit for probabilistic amplitude
shaping (PAS): systematic, mismatched and type-permuted random coding."""
from .channel import (Dmc, FactoredDmc, factor, make_ask_awgn, make_bsc, make_identity,
                      make_parallel, maxwell_boltzmann, product_input)
from .exponents import (ExponentResult, PreconditionError, RateThresholds, RhoCurve,
                        exponent_eg, exponent_em, exponent_es, exponent_esm, gallager_e0,
                        maximize_over_rho, rate_thresholds_em, rate_thresholds_es)
from .optimize import blahut_arimoto, maximize_product_mi, project_to_ntype_design
from .prob import (AlphabetMismatch, JointPmf, Pmf, arimoto_cond_renyi, conditional_entropy,
                   entropy, kl_divergence, mutual_information, renyi_entropy)
from .simulate import InfeasibleConfig, SimConfig, SimReport, run_ensemble_experiment
from .typeclass import NType, quantize_to_ntype

__version__ = "0.1.0"
