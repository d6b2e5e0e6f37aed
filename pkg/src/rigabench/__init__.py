"""rigabench: interactive preference-elicitation optimization workbench.

The package solves multi-objective combinatorial problems for decision
makers whose aggregation parameters are unknown: a genetic algorithm breeds
candidate solutions while pairwise comparison queries, chosen by minimax
regret, narrow the admissible parameter region until the recommendation is
provably good enough.
"""

from .baselines import IlsConfig, SimulatedDm, gen_hidden, ils_run, two_phase_run
from .bench import (
    ExperimentConfig,
    ExperimentResult,
    MetricsRow,
    RunRow,
    error_pct,
    format_table,
    rows_from_csv,
    rows_to_csv,
    run_experiment,
)
from .core import (
    Answer,
    DmOracle,
    GenerationRecord,
    QueryContext,
    QueryObserver,
    QueryRecord,
    RigaConfig,
    RunTrace,
    elicitation_phase,
    riga_kcss_run,
    riga_run,
    riga_s_run,
)
from .prefs import (
    Capacity,
    CostVector,
    Family,
    MobiusMasses2,
    Monotone,
    Orientation,
    OwaWeights,
    PreferenceModel,
    capacity_from_mobius,
    eval_choquet_capacity,
    eval_choquet_mobius,
    eval_owa,
    eval_ws,
    mobius_from_capacity,
    model_from_coords,
)
from .problems import (
    CatalogInstance,
    InstanceTooLargeError,
    KnapsackInstance,
    Solution,
    TspInstance,
    enumerate_pareto_small,
    gen_knapsack,
    gen_tsp,
    load_instance,
    save_instance,
    solve_exact_small,
    solve_fixed,
)
from .regret import (
    InconsistentPreferenceError,
    ParameterPolytope,
    PreferenceStatement,
    css_query,
    enumerate_vertices,
    mmr,
    mr,
    pmr,
)
from .service import build_app

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Capacity",
    "CatalogInstance",
    "CostVector",
    "DmOracle",
    "ExperimentConfig",
    "ExperimentResult",
    "Family",
    "GenerationRecord",
    "IlsConfig",
    "InconsistentPreferenceError",
    "InstanceTooLargeError",
    "KnapsackInstance",
    "MetricsRow",
    "MobiusMasses2",
    "Monotone",
    "Orientation",
    "OwaWeights",
    "ParameterPolytope",
    "PreferenceModel",
    "PreferenceStatement",
    "QueryContext",
    "QueryObserver",
    "QueryRecord",
    "RigaConfig",
    "RunRow",
    "RunTrace",
    "SimulatedDm",
    "Solution",
    "TspInstance",
    "build_app",
    "capacity_from_mobius",
    "css_query",
    "elicitation_phase",
    "enumerate_pareto_small",
    "enumerate_vertices",
    "error_pct",
    "eval_choquet_capacity",
    "eval_choquet_mobius",
    "eval_owa",
    "eval_ws",
    "format_table",
    "gen_hidden",
    "gen_knapsack",
    "gen_tsp",
    "ils_run",
    "load_instance",
    "mmr",
    "mobius_from_capacity",
    "model_from_coords",
    "mr",
    "pmr",
    "riga_kcss_run",
    "riga_run",
    "riga_s_run",
    "rows_from_csv",
    "rows_to_csv",
    "run_experiment",
    "save_instance",
    "solve_exact_small",
    "solve_fixed",
    "two_phase_run",
]
