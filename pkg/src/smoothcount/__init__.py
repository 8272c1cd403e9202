"""Smoothed counting of 0-1 solutions to linear systems.

Instead of counting exact solutions, the library computes the Bernoulli
expectation of exp(-sum_i gamma_i (l_i(x) - beta_i)^2): solutions contribute
weight 1, near-solutions exponentially damped weight.  Evaluation goes
through a truncated series certified by a zero-free polydisc condition, with
front-ends for hypergraph matchings, spin-system conversion, maximum-entropy
count bounds, and derandomized rounding.
"""
from .errors import (CertificationError, FactorizationError, InputError,
                     SmoothcountError, SolverError, WorkLimitError)
from .evaluator import (EvaluationResult, conditional_expectation,
                        smoothed_expectation, smoothed_expectation_geometric)
from .hypergraph import (Hypergraph, coverage_penalty, incidence_system,
                         matching_instance, perfect_matching_instance,
                         validate_uniform_regular)
from .interpolation import (CoefficientSeries, evaluate_g1, log_taylor,
                            required_degree, taylor_coefficients,
                            taylor_coefficients_geometric)
from .ising import (IsingModel, from_ising, lipschitz_condition,
                    partition_bruteforce, to_ising)
from .maxent import (MaxEntSolution, count_bound, entropy,
                     smoothed_count_bound, solve_maxent)
from .model import (PartialAssignment, ProbabilityVector, SparseSystem,
                    column_max_nonzeros, penalty, restrict)
from .oracle import (brute_force_P, brute_force_expectation, count_solutions,
                     phase_product_sum)
from .rounding import RoundingResult, derandomize, tail_bound
from .zerofree import (Certificate, MatchingGamma, PolydiscFailure,
                       check_polydisc, max_delta, max_gamma_matching,
                       max_gamma_uniform, suggest_gamma_sparse)

__version__ = "0.1.0"

__all__ = [
    "CertificationError", "FactorizationError", "InputError",
    "SmoothcountError", "SolverError", "WorkLimitError",
    "EvaluationResult", "conditional_expectation", "smoothed_expectation",
    "smoothed_expectation_geometric",
    "Hypergraph", "coverage_penalty", "incidence_system", "matching_instance",
    "perfect_matching_instance", "validate_uniform_regular",
    "CoefficientSeries", "evaluate_g1", "log_taylor", "required_degree",
    "taylor_coefficients", "taylor_coefficients_geometric",
    "IsingModel", "from_ising", "lipschitz_condition", "partition_bruteforce",
    "to_ising",
    "MaxEntSolution", "count_bound", "entropy", "smoothed_count_bound",
    "solve_maxent",
    "PartialAssignment", "ProbabilityVector", "SparseSystem",
    "column_max_nonzeros", "penalty", "restrict",
    "brute_force_P", "brute_force_expectation", "count_solutions",
    "phase_product_sum",
    "RoundingResult", "derandomize", "tail_bound",
    "Certificate", "MatchingGamma", "PolydiscFailure", "check_polydisc",
    "max_delta", "max_gamma_matching", "max_gamma_uniform",
    "suggest_gamma_sparse",
]
