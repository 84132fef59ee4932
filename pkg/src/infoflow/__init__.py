"""Discrete information flow: exact measures, estimators, and dynamics.

The package splits into exact machinery (``table``, ``measures``,
``lattice``, ``flows``) operating on explicit joint distributions, and the
empirical side (``estimation``, ``significance``, ``dynamics``, ``bench``)
that symbolizes recordings, counts windows, and tests directed flows
against circular-shift surrogate nulls.  ``cli`` wires both into the
``infoflow`` command.
"""

from .errors import (
    AbsoluteContinuityViolation,
    ConstantSeries,
    DegenerateNull,
    DivergedTrajectory,
    EmptyAxisSet,
    IndexOutOfRange,
    InfoflowError,
    InputDataError,
    NTooLarge,
    OutOfDomain,
    OverlappingAxisSets,
    SelfPair,
    SeriesTooShort,
    ShapeMismatch,
    SystemTooLarge,
    TooFewParts,
    TupleOutOfRange,
    UnfittedNull,
    ZeroTotalCount,
)
from .table import AxisLabel, JointTable, marginalize, normalize
from .measures import (
    EntropyCache,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    kl_divergence,
    marginal_entropy,
    multivariate_conditional_mi,
    multivariate_mutual_information,
    mutual_information,
    total_correlation,
)
from .lattice import (
    LatticeIndex,
    SystemView,
    VerificationReport,
    lattice_term,
    random_system,
    system_axes,
    verify_chain_rule_lemma2,
    verify_entropy_chain_rule,
    verify_identity_lemma1,
    verify_information_chain_rule,
    verify_joint_entropy_decomposition,
    verify_partial_expansion,
)
from .flows import (
    CERTIFIED_CHECKS,
    Conditioning,
    InfoNetwork,
    ProcessModel,
    build_network,
    entropy_rate,
    free_entropy,
    residual_global,
    residual_pair,
    residual_single,
    transfer_entropy,
    verify_network_theorems,
    window_axes,
)
from .estimation import (
    RealSeries,
    SymbolSeries,
    WindowCounts,
    count_windows,
    estimate_network,
    fit_mle,
    merge_counts,
    read_series_csv,
    read_symbols_csv,
    symbolize_median,
    symbolize_quantile,
    window_codes,
    write_series_csv,
    write_symbols_csv,
)
from .dynamics import (
    CtmlConfig,
    DependencyGraph,
    LorenzParams,
    TopologyClass,
    ctml_generate,
    enumerate_topologies,
    lorenz_ensemble,
    lorenz_generate,
    tent_map,
)
from .significance import (
    InferenceScore,
    NullModel,
    PairTest,
    PValueMethod,
    infer_details,
    infer_graph,
    p_value,
    score_inference,
    surrogate_null,
    worker_count,
)
from .bench import (
    LagSweepResult,
    SweepRow,
    Table1Result,
    run_lorenz_sweep,
    run_series_sweep,
    run_table1_bench,
    select_cases,
)

__version__ = "0.1.0"

__all__ = [
    "AbsoluteContinuityViolation",
    "AxisLabel",
    "CERTIFIED_CHECKS",
    "Conditioning",
    "ConstantSeries",
    "CtmlConfig",
    "DegenerateNull",
    "DependencyGraph",
    "DivergedTrajectory",
    "EmptyAxisSet",
    "EntropyCache",
    "IndexOutOfRange",
    "InferenceScore",
    "InfoNetwork",
    "InfoflowError",
    "InputDataError",
    "JointTable",
    "LagSweepResult",
    "LatticeIndex",
    "LorenzParams",
    "NTooLarge",
    "NullModel",
    "OutOfDomain",
    "OverlappingAxisSets",
    "PValueMethod",
    "PairTest",
    "ProcessModel",
    "RealSeries",
    "SelfPair",
    "SeriesTooShort",
    "ShapeMismatch",
    "SweepRow",
    "SymbolSeries",
    "SystemTooLarge",
    "SystemView",
    "Table1Result",
    "TooFewParts",
    "TopologyClass",
    "TupleOutOfRange",
    "UnfittedNull",
    "VerificationReport",
    "WindowCounts",
    "ZeroTotalCount",
    "build_network",
    "conditional_entropy",
    "conditional_mutual_information",
    "count_windows",
    "ctml_generate",
    "entropy",
    "entropy_rate",
    "enumerate_topologies",
    "estimate_network",
    "fit_mle",
    "free_entropy",
    "infer_details",
    "infer_graph",
    "kl_divergence",
    "lattice_term",
    "lorenz_ensemble",
    "lorenz_generate",
    "marginal_entropy",
    "marginalize",
    "merge_counts",
    "multivariate_conditional_mi",
    "multivariate_mutual_information",
    "mutual_information",
    "normalize",
    "p_value",
    "random_system",
    "read_series_csv",
    "read_symbols_csv",
    "residual_global",
    "residual_pair",
    "residual_single",
    "run_lorenz_sweep",
    "run_series_sweep",
    "run_table1_bench",
    "score_inference",
    "select_cases",
    "surrogate_null",
    "symbolize_median",
    "symbolize_quantile",
    "system_axes",
    "tent_map",
    "total_correlation",
    "transfer_entropy",
    "verify_chain_rule_lemma2",
    "verify_entropy_chain_rule",
    "verify_identity_lemma1",
    "verify_information_chain_rule",
    "verify_joint_entropy_decomposition",
    "verify_partial_expansion",
    "verify_network_theorems",
    "window_axes",
    "window_codes",
    "worker_count",
    "write_series_csv",
    "write_symbols_csv",
]
