"""Weighted-L1 nonnegative matrix factorization with a sparse CD solver."""

from .analysis import (
    BernoulliLADSetting,
    DegenerateInputError,
    ErrorReport,
    error_report,
    prob_alpha1_positive,
    prob_alpha2_positive,
    prob_mc_estimate,
    sigma_gain,
)
from .datagen import (
    FalseZeroSpec,
    LaplaceNoiseSpec,
    gen_bernoulli,
    gen_lowrank_falsezeros,
    gen_saltpepper,
    gen_uniform_sparse,
    sample_laplace,
)
from .dense_cd import cd_dense, update_h_dense
from .hals import hals_init, hals_sweep
from .io_formats import (
    MatrixMarketError,
    read_dense_csv,
    read_matrix_market,
    write_dense_csv,
    write_matrix_market,
    write_trace_csv,
)
from .reduction import (
    ReducedInstance,
    SignMatrix,
    best_binary_rank1,
    embed_solution,
    encode,
    extract_solution,
    verify_reduction,
)
from .scd_solver import objective, scd, update_h, zero_update_predicate
from .sparse_core import (
    FactorPair,
    SolveTrace,
    SparseNonnegMatrix,
    SweepRecord,
    WL1Problem,
    factor_sparsity,
    from_coo,
    from_dense,
    transpose,
)
from .wmedian import (
    BreakpointProblem,
    IndeterminateSubproblem,
    constrained_weighted_median,
    lad_objective,
    nnls_scalar,
)

__version__ = "0.1.0"
