"""Rankings from weighted pairwise comparisons via minimum weighted feedback arc sets."""

from ._backend import DEFAULT as backend
from .bench import BenchRecord, PipelineOptions, run_graph, run_oracle_check, run_pipeline, run_suite
from .graph import (
    CyclicGraphError,
    EdgeListError,
    EdgeListParseError,
    EdgeWeightError,
    WeightedDigraph,
    WeightedEdge,
    find_cycle,
    is_acyclic,
    parse_edge_list,
    read_edge_list,
    would_create_cycle,
)
from .losses import (
    ComparisonMatrix,
    LossReport,
    NumericDomainError,
    UndefinedMetricError,
    evaluate,
    loss_margin,
    loss_naive,
    loss_ratio,
    loss_simple,
    loss_weighted,
)
from .optimizer import OptimizerConfig, minimize_ratio_loss, ternary_search_vertex
from .ranking import Ranking, read_ranking, tiebreak_score, topological_rank, write_ranking
from .solver import (
    FeedbackArcResult,
    GraphTooLargeError,
    SolverStrategy,
    solve_exact,
    solve_local_ratio,
)

__version__ = "0.1.0"
