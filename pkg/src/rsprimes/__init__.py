"""Rudin-Shapiro block-digital calculus and correlation sums along primes."""

__version__ = "0.1.0"

from .dfao import Dfao, count_word_occurrences, dfao_eval, rudin_shapiro_dfao, to_binary
from .digital import (AlphaVector, ValuationCase, delta, delta_case, nearest_int_norm,
                      phase_decompose, r01, r11, r11_iterate, r11_step, s2, v2, v2_factorial)
from .primes import PrimeTable, build_table, mangoldt
from .congruence import (CongruenceSystem, ResidueClass, build_paper_system, crt_solve,
                         enumerate_lambda_k, valuation_profile)
from .corrmeasure import (CorrelationQuery, CorrelationReport, consecutive_product_sum,
                          correlation_measure, pair_correlation_sum, subword_complexity,
                          sup_norm_grid, v_sum)
from .primecorr import (ConvergencePoint, convergence_table, odd_integer_sum, psi_sum,
                        s_alpha_sum, s_k_sum, u_k_sum, v_ba_sum)
