"""Greedy graph coarsening by minimum neighborhood interference."""

from .coarsen import (
    EngineConfig,
    CoarseningResult,
    MergeRecord,
    ScoredCandidate,
    coarsen,
    run_nope,
    run_nope_star,
    run_selfish_cosine,
    stop_target,
)
from .graph import (
    CapacityError,
    CoarsenedGraph,
    CoarseningState,
    ContractViolation,
    Partition,
    StaticGraph,
    coarsening_rate,
    extract_coarse_graph,
    validate_partition,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CoarsenedGraph",
    "CoarseningResult",
    "CoarseningState",
    "ContractViolation",
    "EngineConfig",
    "MergeRecord",
    "Partition",
    "ScoredCandidate",
    "StaticGraph",
    "coarsen",
    "coarsening_rate",
    "extract_coarse_graph",
    "run_nope",
    "run_nope_star",
    "run_selfish_cosine",
    "stop_target",
    "validate_partition",
]
