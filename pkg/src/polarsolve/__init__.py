"""Solvers for a dynamic model of elite persuasion under majority rule."""

from .config import ExperimentConfig, ConfigError, load_config, parse_config
from .grids import Grid, build_grid, nearest_index
from .model import (
    CostSpec,
    ModelParams,
    PolarizationReport,
    PublicState,
    cost_dominates,
    delta_threshold,
    evaluate_cost,
    implemented_policy,
    polarization_indices,
    stage_payoff,
)
from .oracle import (
    OracleResult,
    brute_force_one_step,
    brute_force_stackelberg,
    brute_force_two_period_single,
)
from .runner import emit_policy_csv, emit_value_csv, read_table_csv, run_config
from .single_elite import (
    CandidateEvaluation,
    InfiniteHorizonSolution,
    Period1Solution,
    PolicyTable,
    RegionPartition,
    ValueTable,
    bellman_apply,
    compare_cost_technologies,
    expected_continuation_2,
    interior_minimizer_B,
    interior_minimizer_C,
    intervention_measure,
    period1_solve,
    period2_solve,
    region_partition,
    solve_infinite,
    verify_polarization_pull,
)
from .two_elite import (
    MpeSolution,
    StackelbergSolution,
    check_no_deviation,
    elite_b_response,
    mpe_solve,
    phi_continuation,
    stackelberg_solve,
)

__version__ = "0.1.0"
