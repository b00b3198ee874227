"""Exact finite-blocklength analysis of variable-length coding with errors.

The package works at the granularity of type classes: every distinct
per-sequence probability at blocklength n is one spectrum atom with an exact
integer count.  Overflow tradeoffs, code constructions, bound sandwiches and
Gaussian comparisons are all evaluated from that spectrum without sampling.
"""

from .asymptotics import (AsymptoticReport, ConvergenceSample, OptimisticReport,
                          OptimisticSample, convergence_study, entropy,
                          mean_length_constants, optimistic_study, q_upper,
                          q_upper_inv, second_order_at_mean_length,
                          second_order_threshold, varentropy)
from .bounds import (BoundReport, achievability_bound, converse_bound,
                     first_order_slack, sandwich_sweep, second_order_slack)
from .codes import (Assignment, CodeSpec, CountingReport, TradeoffPoint,
                    code_overflow, construct_code, optimal_threshold,
                    optimal_tradeoff, simulate_roundtrip, string_budget,
                    validate_counting_condition)
from .errors import (CeilingExceeded, NumericError, OverflowLabError,
                     TheoremViolation, ValidationError)
from .sources import (DEFAULT_TYPE_CEILING, Distribution, Spectrum, SpectrumAtom,
                      SwitchingSchedule, ceil_log2_parity, iid_spectrum,
                      make_distribution, mixed_spectrum, sample_sequences,
                      switching_spectrum)
from .tails import (Comparator, PrefixSelection, RestrictedTailResult,
                    finite_n_first_order, finite_n_second_order,
                    restricted_tail_inf, selection_log_mass, smooth_max_entropy,
                    tail_mass, top_probability_prefix)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticReport", "ConvergenceSample", "OptimisticReport", "OptimisticSample",
    "convergence_study", "entropy", "mean_length_constants", "optimistic_study",
    "q_upper", "q_upper_inv", "second_order_at_mean_length", "second_order_threshold",
    "varentropy",
    "BoundReport", "achievability_bound", "converse_bound", "first_order_slack",
    "sandwich_sweep", "second_order_slack",
    "Assignment", "CodeSpec", "CountingReport", "TradeoffPoint", "code_overflow",
    "construct_code", "optimal_threshold", "optimal_tradeoff", "simulate_roundtrip",
    "string_budget", "validate_counting_condition",
    "CeilingExceeded", "NumericError", "OverflowLabError", "TheoremViolation",
    "ValidationError",
    "DEFAULT_TYPE_CEILING", "Distribution", "Spectrum", "SpectrumAtom",
    "SwitchingSchedule", "ceil_log2_parity", "iid_spectrum", "make_distribution",
    "mixed_spectrum", "sample_sequences", "switching_spectrum",
    "Comparator", "PrefixSelection", "RestrictedTailResult", "finite_n_first_order",
    "finite_n_second_order", "restricted_tail_inf", "smooth_max_entropy",
    "selection_log_mass", "tail_mass", "top_probability_prefix",
    "__version__",
]
