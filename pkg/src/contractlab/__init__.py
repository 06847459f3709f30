"""contractlab: a numerical laboratory for contractive adapted processes.

The package simulates filtered stochastic processes whose predictable
one-step means are known exactly, verifies nonexpansive/contractive drift
conditions pathwise, runs Robbins-Monro root solvers and controlled
least-squares estimators, and renders almost-sure convergence claims as
seeded Monte Carlo acceptance checks.
"""
from .verdict import ConditionVerdict
from .process import (
    CrossingReport,
    GrowthKernel,
    ProcessPath,
    SignClass,
    StepRecord,
    VectorProcessPath,
    check_segment_peak_bound,
    crossing_report,
    doob_decompose,
    growth_factor,
    kronecker_path,
    max_growth_factor,
    partial_sums,
    reconstruct,
    vector_doob_decompose,
    zero_state_means,
)
from .conditions import (
    ContractiveProfile,
    NonexpansiveProfile,
    NormConditionReport,
    check_contractive,
    check_nonexpansive,
    check_norm_conditions,
    check_variance_summability,
    check_zero_state_decay,
)
from .approximation import (
    DomainExitError,
    EnvelopeReport,
    NoiseModel,
    RootProblem,
    Schedule,
    TruncatedPath,
    center_path,
    check_linear_envelope,
    check_norm_envelope,
    check_ratio_sandwich,
    check_regularity,
    check_truncated_contractive,
    check_truncated_zero_mean_bound,
    contraction_factor,
    derive_truncated,
    rm_solve,
    rm_solve_nd,
    truncated_nonexpansive_verdict,
)
from .least_squares import (
    DesignConditionReport,
    GWeight,
    IntegralBoundResult,
    LsRun,
    LsState,
    PartitionReport,
    RegressionModel,
    check_design_conditions,
    integral_bound,
    ls_update,
    matrix_norm_inf,
    partition_analysis,
    simulate_ls_run,
    z_process,
)
from .harness import (
    ConvergenceClass,
    ConvergenceVerdict,
    EnsembleConfig,
    EnsembleStats,
    convergence_verdict,
    limit_dispersion,
    run_ensemble,
)

__version__ = "0.1.0"
