"""Signed-graph balance measurement, greedy sign-flip attacks, and link
sign prediction evaluation."""

from .graph import (
    LoadOptions,
    LoadStats,
    ParseError,
    SignedGraph,
    load_edge_list,
    load_rating_csv,
    write_edge_list,
)
from .balance import (
    BalanceReport,
    TwoPathTable,
    balance_degree,
    count_signed_triangles,
    flip_delta,
    two_path_sum,
)
from .attack import (
    MODE_BALANCE_BATCHED,
    MODE_BALANCE_SEQUENTIAL,
    MODE_RANDOM,
    STATUS_ALREADY_MINIMAL,
    STATUS_BUDGET_EXHAUSTED,
    STATUS_NO_CANDIDATES,
    AttackConfig,
    AttackTrace,
    FlipRecord,
    PerturbationReport,
    run_attack,
    run_balance_attack,
    run_random_attack,
    select_candidates,
    verify_perturbation,
)
from .prediction import (
    EdgeSplit,
    EvalReport,
    PipelineRow,
    attack_eval_pipeline,
    evaluate,
    split_edges,
    triad_vote_predict,
    write_pipeline_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackTrace",
    "BalanceReport",
    "EdgeSplit",
    "EvalReport",
    "FlipRecord",
    "LoadOptions",
    "LoadStats",
    "MODE_BALANCE_BATCHED",
    "MODE_BALANCE_SEQUENTIAL",
    "MODE_RANDOM",
    "ParseError",
    "PerturbationReport",
    "PipelineRow",
    "STATUS_ALREADY_MINIMAL",
    "STATUS_BUDGET_EXHAUSTED",
    "STATUS_NO_CANDIDATES",
    "SignedGraph",
    "TwoPathTable",
    "attack_eval_pipeline",
    "balance_degree",
    "count_signed_triangles",
    "evaluate",
    "flip_delta",
    "load_edge_list",
    "load_rating_csv",
    "run_attack",
    "run_balance_attack",
    "run_random_attack",
    "select_candidates",
    "split_edges",
    "triad_vote_predict",
    "two_path_sum",
    "verify_perturbation",
    "write_edge_list",
    "write_pipeline_csv",
]
