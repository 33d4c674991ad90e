"""Heavy-tailed linear processes, self-normalized partial-sum paths, and
exact graph-distance verification of their stable limits."""

from .backend import BACKEND
from .cadlag import CadlagStep, CompletedGraph, completed_graph, make_step
from .coefficients import (CoefModel, CoefSeq, sample_coefs, tail_sums,
                           validate_moments, validate_sandwich)
from .harness import (ExperimentSpec, run_karamata_suite,
                      run_marginal_convergence, run_self_normalized)
from .heavy_tail import TailModel, norm_seq, sample_innovations, truncated_moment
from .ksstats import KsReport, ks_report, ks_statistic
from .limit_process import (CharTriple, LimitSample, char_exponent,
                            limit_statistic, sample_limit_increments,
                            sample_limit_series)
from .linear_process import PathPair, ProcessRealization, paths, realize, self_normalized
from .pointproc import PointConfig, empirical_pp, perturbation_continuity_check, summation_functional
from .skorokhod import (MetricResult, dist_m1_monotone, dist_m2, dist_m2_oracle,
                        dist_product, dist_uniform)

__version__ = "0.1.0"
