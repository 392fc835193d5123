"""Approximation algorithms for p-mean welfare (Nash, egalitarian, utilitarian)
with indivisible goods and subadditive valuations, plus brute-force checkers."""

from .allocator import (
    Allocation,
    RunTrace,
    alg_iteration_bound,
    alg_solve,
    combined_solve,
    gamma_init,
    matching_baseline,
    moving_knife,
    singleton_phase,
)
from .errors import BudgetExceededError, DivergenceError, InfeasibleError, InputError
from .exact import exact_ell, exact_optimum, measure_ratio
from .generators import gen_partition_reduction, gen_random, gen_xos_hard
from .matching import bottleneck_matching, max_weight_matching, min_weight_matching
from .serialization import load_instance, save_instance
from .valuations import (
    AdditiveOracle,
    BudgetAdditiveOracle,
    CountingOracle,
    CoverageOracle,
    Instance,
    XOSOracle,
    check_axioms,
)
from .welfare import WelfareParam, effective_p, nsw, p_mean

__version__ = "0.1.0"
